#[path = "../tests/common/mod.rs"]
mod common;

use crate::coherence_engine::{decide_solvable, verify_certificate};
use crate::descriptor::SolvableDescriptor;
use crate::fp_linalg::FpMatrix;
use crate::int_lattice::{hnf, contains_in_basis, merge_pair, IntVector, PairMerge};
use crate::skew_engine::{
    apply_endo, ideal_membership_bounded, one_var_free_decomposition, Bounds, Membership, SeriesContext,
    SkewContext1, SkewContext2, SkewParams, SkewPoly1, SkewPoly2, TruncSeries,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 101])
}

fn matrix(max: usize) -> impl Strategy<Value = (u64, Vec<Vec<i64>>)> {
    (prime(), 1..=max, 1..=max).prop_flat_map(|(p, r, c)| {
        (Just(p), prop::collection::vec(prop::collection::vec(-20i64..20, c), r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rank_plus_nullity((p, rows) in matrix(6)) {
        let m = FpMatrix::from_rows(p, &rows).unwrap();
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn solve_hits_the_image((p, rows) in matrix(6), seed in any::<u64>()) {
        let m = FpMatrix::from_rows(p, &rows).unwrap();
        let x: Vec<u64> = (0..m.cols() as u64).map(|i| seed.wrapping_mul(i + 7) % p).collect();
        let b = m.mul_vec(&x).unwrap();
        let sol = m.solve(&b).unwrap().expect("b lies in the image");
        prop_assert_eq!(m.mul_vec(&sol).unwrap(), b);
    }

    #[test]
    fn merge_on_a_ray_generates(g in prop::collection::vec(0i64..=10, 1..=6), a in 0i64..=5, b in 0i64..=5) {
        let x = IntVector::from_i64(&g.iter().map(|v| v * a).collect::<Vec<_>>());
        let y = IntVector::from_i64(&g.iter().map(|v| v * b).collect::<Vec<_>>());
        let PairMerge::Generator(c) = merge_pair(&x, &y).unwrap() else {
            return Err(TestCaseError::fail("proportional pair reported as a cone violation"));
        };
        prop_assert_eq!(x.combine(&c.x_coeff, &y, &c.y_coeff), c.vector.clone());
        let basis = hnf(&[c.vector.clone()]).unwrap();
        prop_assert!(contains_in_basis(&basis, &x) && contains_in_basis(&basis, &y));
    }

    #[test]
    fn hnf_spans_its_generators(rows in prop::collection::vec(prop::collection::vec(-30i64..30, 4), 1..=5)) {
        let gens: Vec<IntVector> = rows.iter().map(|r| IntVector::from_i64(r)).collect();
        let basis = hnf(&gens).unwrap();
        for g in &gens {
            prop_assert!(contains_in_basis(&basis, g));
        }
        for b in &basis {
            prop_assert!(contains_in_basis(&hnf(&gens).unwrap(), b));
        }
    }
}

type Terms2 = Vec<(u64, u64, u64, i64, i64)>;

fn terms2(p: u64) -> impl Strategy<Value = Terms2> {
    prop::collection::vec((1..p, 0u64..3, 0u64..3, 0i64..2, 0i64..2), 1..=3)
}

fn poly2(ctx: SkewContext2, terms: &Terms2) -> SkewPoly2 {
    let mut x = SkewPoly2::zero(ctx);
    for &(c, es, et, a, b) in terms {
        let coeff = TruncSeries::var(ctx.series, 0, es).mul(&TruncSeries::var(ctx.series, 1, et)).unwrap().scale(c);
        x = x.add(&SkewPoly2::term(coeff, a, b, ctx).unwrap()).unwrap();
    }
    x
}

fn ctx2(p: u64, n_u: u32, n_v: u32) -> SkewContext2 {
    let series = SeriesContext::untruncated(p, 2, 0).unwrap();
    SkewContext2::new(series, n_u, n_v, 8).unwrap()
}

fn triple() -> impl Strategy<Value = (u64, u32, u32, Terms2, Terms2, Terms2)> {
    (prop::sample::select(vec![2u64, 3]), 1u32..=2, 1u32..=2)
        .prop_flat_map(|(p, nu, nv)| (Just(p), Just(nu), Just(nv), terms2(p), terms2(p), terms2(p)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn skew_ring_axioms((p, nu, nv, x, y, z) in triple()) {
        let ctx = ctx2(p, nu, nv);
        let (x, y, z) = (poly2(ctx, &x), poly2(ctx, &y), poly2(ctx, &z));
        let left = x.mul(&y).unwrap().mul(&z).unwrap();
        let right = x.mul(&y.mul(&z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let dist = x.mul(&y.add(&z).unwrap()).unwrap();
        prop_assert_eq!(dist, x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap());
        let dist = x.add(&y).unwrap().mul(&z).unwrap();
        prop_assert_eq!(dist, x.mul(&z).unwrap().add(&y.mul(&z).unwrap()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn twist_law_two_variables((p, nu, nv, x, _y, _z) in triple(), a in 0i64..3, b in 0i64..3) {
        let ctx = ctx2(p, nu, nv);
        let c = poly2(ctx, &x).coefficient(x[0].3, x[0].4);
        let shift = SkewPoly2::term(TruncSeries::one(ctx.series), a, b, ctx).unwrap();
        let lhs = shift.mul(&SkewPoly2::constant(c.clone(), ctx)).unwrap();
        let rhs = SkewPoly2::constant(apply_endo(&ctx.sigma(a, b), &c).unwrap(), ctx).mul(&shift).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn twist_law_one_variable(p in prop::sample::select(vec![2u64, 3, 5]), e in 0u64..6, k in 0u32..4) {
        let ctx = SkewContext1::new(SeriesContext::untruncated(p, 1, 0).unwrap(), 8).unwrap();
        let a = TruncSeries::var(ctx.series, 0, e).add(&TruncSeries::one(ctx.series)).unwrap();
        let fk = SkewPoly1::term(TruncSeries::one(ctx.series), k, ctx).unwrap();
        let lhs = fk.mul(&SkewPoly1::constant(a.clone(), ctx)).unwrap();
        let rhs = SkewPoly1::constant(apply_endo(&ctx.sigma(k), &a).unwrap(), ctx).mul(&fk).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn frobenius_is_multiplicative((p, nu, nv, x, y, _z) in triple(), a in -1i64..3, b in -1i64..3) {
        // Precision 2 leaves room for the inverse twists.
        let series = SeriesContext::untruncated(p, 2, 2).unwrap();
        let ctx = SkewContext2::new(series, nu, nv, 8).unwrap();
        let scale = series.scale();
        let scaled: Terms2 = x.iter().chain(&y).map(|&(c, es, et, i, j)| (c, es * scale, et * scale, i, j)).collect();
        let (u, v) = (poly2(ctx, &scaled[..x.len()].to_vec()), poly2(ctx, &scaled[x.len()..].to_vec()));
        let (u, v) = (u.coefficient(x[0].3, x[0].4), v.coefficient(y[0].3, y[0].4));
        let sigma = ctx.sigma(a, b);
        match (apply_endo(&sigma, &u.mul(&v).unwrap()), apply_endo(&sigma, &u), apply_endo(&sigma, &v)) {
            (Ok(uv), Ok(su), Ok(sv)) => prop_assert_eq!(uv, su.mul(&sv).unwrap()),
            _ => {}
        }
    }

    #[test]
    fn free_decomposition_is_bijective(p in prop::sample::select(vec![2u64, 3, 5]), precision in 0u32..2, trunc in 1u64..10) {
        let r = one_var_free_decomposition(p, precision, trunc).unwrap();
        prop_assert!(r.bijective && r.reconstructed && r.pass);
        prop_assert!(r.per_residue.iter().sum::<usize>() == r.monomials);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn membership_certificates_reproduce(p in prop::sample::select(vec![2u64, 3]), x in terms2(2), y in terms2(2)) {
        let params = SkewParams { p, truncation: 8, window: 4, ..SkewParams::default() };
        let ctx = params.context().unwrap();
        let gens = [ctx.s(), ctx.t()];
        let elem = poly2(ctx, &x).mul(&gens[0]).unwrap().add(&poly2(ctx, &y).mul(&gens[1]).unwrap()).unwrap();
        let m = ideal_membership_bounded(&elem, &gens, Bounds { window: 4, truncation: 8 }).unwrap();
        let Membership::Member { certificate } = m else {
            return Err(TestCaseError::fail("constructed member not found"));
        };
        // Certificates live in the untruncated context the search evaluates in.
        let eval = certificate[0].context();
        let mut sum = SkewPoly2::zero(eval);
        for (c, g) in certificate.iter().zip(&gens) {
            sum = sum.add(&c.mul(&g.with_context(eval).unwrap()).unwrap()).unwrap();
        }
        prop_assert_eq!(sum, elem.with_context(eval).unwrap());
    }

    #[test]
    fn verdicts_ignore_generator_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_datum(&mut rng);
        let v = decide_solvable(&d).unwrap();
        prop_assert!(verify_certificate(&d, &v).is_ok());
        let mut r = d.clone();
        r.torus_generators.reverse();
        prop_assert_eq!(decide_solvable(&r).unwrap().is_coherent(), v.is_coherent());
        let back = SolvableDescriptor::from_datum(&d).to_datum().unwrap();
        prop_assert_eq!(back, d);
    }
}
