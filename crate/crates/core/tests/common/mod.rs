#![allow(dead_code)]

use coherence_lab::int_lattice::IntVector;
use coherence_lab::root_datum::{validate, GradedLieAlgebraQ, PadicFieldParams, SolvableGroupDatum, Weight, Q};
use coherence_lab::skew_engine::{SkewContext1, SkewPoly1, TruncSeries};
use rand::seq::SliceRandom;
use rand::Rng;

/// A random valid datum with torus rank <= 3, at most 6 weights and Lie
/// dimension <= 8. Brackets are drawn between basis vectors whose weights add
/// up to another weight; draws that break Jacobi or nilpotency are retried.
pub fn random_datum<R: Rng>(rng: &mut R) -> SolvableGroupDatum {
    loop {
        if let Some(d) = try_random_datum(rng) {
            return d;
        }
    }
}

fn try_random_datum<R: Rng>(rng: &mut R) -> Option<SolvableGroupDatum> {
    let d = rng.gen_range(1..=3usize);
    // Only 5^d distinct exponent vectors exist with entries in -2..=2.
    let nweights = rng.gen_range(1..=6usize.min(5usize.pow(d as u32)));
    let mut exps: Vec<Vec<i64>> = Vec::new();
    while exps.len() < nweights {
        let e: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
        if !exps.contains(&e) {
            exps.push(e);
        }
    }
    let mut weight_of = Vec::new();
    let mut weights = Vec::new();
    for (w, e) in exps.iter().enumerate() {
        let room = 8 - weight_of.len();
        let left = nweights - w - 1;
        let m = rng.gen_range(1..=2usize).min(room - left);
        weights.push(Weight::new(e, m));
        weight_of.extend(std::iter::repeat(w).take(m));
    }
    let dim = weight_of.len();
    let labels = (0..dim).map(|i| format!("e{i}")).collect();
    let mut lie = GradedLieAlgebraQ::abelian(labels, weight_of.clone());
    for i in 0..dim {
        for j in i + 1..dim {
            let sum: Vec<i64> = exps[weight_of[i]].iter().zip(&exps[weight_of[j]]).map(|(a, b)| a + b).collect();
            let Some(w) = exps.iter().position(|e| *e == sum) else { continue };
            if rng.gen_bool(0.5) {
                let targets: Vec<usize> = (0..dim).filter(|&k| weight_of[k] == w).collect();
                let k = *targets.choose(rng).unwrap();
                let c = Q::from_integer(rng.gen_range(1..=3i64).into());
                lie.set_bracket(i, j, &[(k, c)]);
            }
        }
    }
    let ngens = rng.gen_range(1..=3usize);
    let torus_generators = (0..ngens)
        .map(|_| IntVector::from_i64(&(0..d).map(|_| rng.gen_range(-3..=3)).collect::<Vec<_>>()))
        .collect();
    let datum = SolvableGroupDatum {
        field: PadicFieldParams::qp(*[2u64, 3, 5].choose(rng).unwrap()),
        torus_rank: d,
        torus_generators,
        weights,
        lie,
    };
    validate(&datum).ok().map(|_| datum)
}

/// A random element of R with terms t^e F^i, e < max_exp, i <= max_f.
pub fn random_poly1<R: Rng>(rng: &mut R, ctx: SkewContext1, max_exp: u64, max_f: u32) -> SkewPoly1 {
    let mut x = SkewPoly1::zero(ctx);
    for _ in 0..rng.gen_range(1..=2) {
        let e = rng.gen_range(0..max_exp);
        let i = rng.gen_range(0..=max_f);
        let c = rng.gen_range(1..ctx.series.p);
        let term = SkewPoly1::term(TruncSeries::var(ctx.series, 0, e).scale(c), i, ctx).unwrap();
        x = x.add(&term).unwrap();
    }
    x
}

/// One or two random generators of a submodule of R^2.
pub fn random_submodule<R: Rng>(rng: &mut R, ctx: SkewContext1) -> Vec<Vec<SkewPoly1>> {
    (0..rng.gen_range(1..=2))
        .map(|_| (0..2).map(|_| random_poly1(rng, ctx, 4, 1)).collect())
        .collect()
}
