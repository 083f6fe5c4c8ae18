//! Acceptance run: one line per criterion, exit status 1 if any fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use coherence_lab::catalog::check_catalog;
use coherence_lab::coherence_engine::{
    borel_datum_type_a, decide_semisimple, decide_solvable, verify_certificate, Family, RootSystemLabel, Verdict,
};
use coherence_lab::finite_group_lab::{
    coset_rep_check, commutator_identity_check, mackey_check, random_two_dim_module, seeded_rng, FinModule,
    FiniteGroup,
};
use coherence_lab::int_lattice::{in_sign_cone, merge_pair, IntLattice, IntVector, PairMerge};
use coherence_lab::root_datum::{f_matrix, PadicFieldParams};
use coherence_lab::skew_engine::{
    filtration_identity_check, mjm_degree_detect, monomial_obstruction, not_fg_demonstration, obstruction_context,
    one_var_free_decomposition, st_monomial, verify_relations, RelationFamily, SeriesContext, SkewContext1,
    SkewParams, SkewPoly1, TruncSeries,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;

// Time limits per criterion; exactness criteria have no numeric tolerance.
const LIMIT_CATALOG: Duration = Duration::from_secs(5);
const LIMIT_LATTICE: Duration = Duration::from_secs(10);
const LIMIT_SKEW: Duration = Duration::from_secs(60);
const LIMIT_MACKEY: Duration = Duration::from_secs(30);

const LATTICE_CASES: usize = 1000;
const LATTICE_MAX_DIM: usize = 6;
const LATTICE_MAX_ENTRY: i64 = 50;
const RANDOM_DATA: usize = 200;
const RANDOM_SUBMODULES: usize = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
            o.detail = format!("{}; took {took:.2?}, limit {limit:?}", o.detail);
            return o;
        }
    }
    o.detail = format!("{} [{took:.2?}]", o.detail);
    o
}

fn catalog_verdicts() -> Outcome {
    let checks = check_catalog();
    let bad: Vec<_> = checks.iter().filter(|c| !c.matches).map(|c| c.name).collect();
    outcome(bad.is_empty(), format!("{} entries, mismatches {bad:?}", checks.len()))
}

fn semisimple_vs_borel() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for r in 1..=3 {
        let ss = decide_semisimple(RootSystemLabel::new(Family::A, r).unwrap()).unwrap();
        let borel = decide_solvable(&borel_datum_type_a(r as usize, PadicFieldParams::qp(3))).unwrap();
        pass &= ss.coherent == borel.is_coherent();
        lines.push(format!("A{r}: {}/{}", ss.coherent, borel.is_coherent()));
    }
    outcome(pass, lines.join(", "))
}

fn divides_all(g: &IntVector, v: &IntVector) -> bool {
    let Some(c) = g.coords().iter().position(|x| !x.is_zero()) else { return v.is_zero() };
    let (q, r) = v.coords()[c].div_rem(&g.coords()[c]);
    r.is_zero() && g.scale(&q) == *v
}

fn proportional(x: &IntVector, y: &IntVector) -> bool {
    let n = x.len();
    (0..n).all(|i| (0..n).all(|j| &x.coords()[i] * &y.coords()[j] == &x.coords()[j] * &y.coords()[i]))
}

fn lattice_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = 0;
    let (mut on_ray, mut off_ray) = (0, 0);
    for _ in 0..LATTICE_CASES {
        let n = rng.gen_range(1..=LATTICE_MAX_DIM);
        // On-ray pair: multiples of one nonnegative vector.
        let g: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=10)).collect();
        let (a, b) = (rng.gen_range(0..=5), rng.gen_range(0..=5));
        let x = IntVector::from_i64(&g.iter().map(|v| v * a).collect::<Vec<_>>());
        let y = IntVector::from_i64(&g.iter().map(|v| v * b).collect::<Vec<_>>());
        on_ray += 1;
        match merge_pair(&x, &y).unwrap() {
            PairMerge::Generator(c) => {
                let z = &c.vector;
                let ok = x.combine(&c.x_coeff, &y, &c.y_coeff) == *z
                    && z.is_nonnegative()
                    && divides_all(z, &x)
                    && divides_all(z, &y);
                failures += usize::from(!ok);
            }
            PairMerge::ConeViolation(_) => failures += 1,
        }
        // Independent nonnegative pair; off-ray unless it happens to be proportional.
        let x: IntVector =
            IntVector::from_i64(&(0..n).map(|_| rng.gen_range(0..=LATTICE_MAX_ENTRY)).collect::<Vec<_>>());
        let y: IntVector =
            IntVector::from_i64(&(0..n).map(|_| rng.gen_range(0..=LATTICE_MAX_ENTRY)).collect::<Vec<_>>());
        let result = merge_pair(&x, &y).unwrap();
        let c = result.combination();
        let in_lattice = x.combine(&c.x_coeff, &y, &c.y_coeff) == c.vector;
        if proportional(&x, &y) {
            failures += usize::from(!matches!(result, PairMerge::Generator(_)) || !in_lattice);
        } else {
            off_ray += 1;
            let ok = matches!(result, PairMerge::ConeViolation(_)) && in_lattice && !in_sign_cone(&c.vector);
            failures += usize::from(!ok);
        }
    }
    outcome(failures == 0, format!("{on_ray} on-ray, {off_ray} off-ray pairs, {failures} failures"))
}

/// Coherent iff the image lattice is zero, or cyclic with a generator in the sign cone.
fn lattice_oracle(images: &[IntVector], n: usize) -> bool {
    let lat = IntLattice::new(n, images.to_vec()).unwrap();
    match lat.rank() {
        0 => true,
        1 => in_sign_cone(&lat.hnf_basis()[0]),
        _ => false,
    }
}

fn certificate_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let (mut coherent, mut g3, mut h3, mut failures) = (0, 0, 0, Vec::new());
    for case in 0..RANDOM_DATA {
        let d = common::random_datum(&mut rng);
        let images: Vec<IntVector> = d.torus_generators.iter().map(|v| d.f_of(v).unwrap()).collect();
        let verdict = decide_solvable(&d).unwrap();
        let oracle = lattice_oracle(&images, d.weights.len());
        let cert = verify_certificate(&d, &verdict);
        if oracle != verdict.is_coherent() || cert.is_err() {
            failures.push(format!("case {case}: oracle {oracle}, certificate {cert:?}"));
            continue;
        }
        match &verdict {
            Verdict::Coherent { generator, .. } => {
                coherent += 1;
                if !images.iter().all(|img| divides_all(generator, img)) {
                    failures.push(format!("case {case}: image not divisible by {generator}"));
                }
            }
            Verdict::NotCoherent { mixed_witness, torus_element, embedded, .. } => {
                match embedded.kind {
                    coherence_lab::root_datum::WitnessKind::G3 => g3 += 1,
                    coherence_lab::root_datum::WitnessKind::H3 => h3 += 1,
                }
                let rows = f_matrix(&d);
                let ft: Vec<BigInt> = rows.iter().map(|r| r.dot(torus_element).unwrap()).collect();
                let mixed = ft.iter().any(|x| x.is_positive()) && ft.iter().any(|x| x.is_negative());
                if IntVector(ft) != *mixed_witness || !mixed || !(embedded.n_alpha.is_positive() && embedded.n_beta.is_negative()) {
                    failures.push(format!("case {case}: witness does not reproduce"));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{RANDOM_DATA} data: {coherent} coherent, {g3} G3, {h3} H3; failures {failures:?}"),
    )
}

fn skew_suite() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for p in [2, 3] {
        for n_u in [1, 2] {
            for n_v in [1, 2] {
                let params = SkewParams { p, n_u, n_v, truncation: 8, window: 4, m_max: 3, ..SkewParams::default() };
                let r = verify_relations(&params).unwrap();
                pass &= r.pass;
                lines.push(format!("({p},{n_u},{n_v}) {}", if r.pass { "ok" } else { "FAIL" }));
            }
        }
    }
    // Controls: a wrong S1 and a missing S3 family must both be caught.
    let corrupt = verify_relations(&SkewParams { p: 3, corrupt_s1: true, ..SkewParams::default() }).unwrap();
    let omitted =
        verify_relations(&SkewParams { p: 2, omit_family: Some(RelationFamily::S3), ..SkewParams::default() }).unwrap();
    let controls = !corrupt.soundness_pass && !omitted.completeness_pass;
    pass &= controls;
    lines.push(format!("controls {}", if controls { "caught" } else { "MISSED" }));
    outcome(pass, lines.join(", "))
}

fn obstruction_suite() -> Outcome {
    const WINDOW: i64 = 8;
    let mut bad = Vec::new();
    for p in [2, 3] {
        for n_u in 1..=3 {
            for n_v in 1..=3 {
                let ctx = obstruction_context(p, n_u, n_v, WINDOW).unwrap();
                if monomial_obstruction(&st_monomial(&ctx), &ctx, n_u, n_v, WINDOW).unwrap() {
                    bad.push(format!("s*t obstructed at p={p} ({n_u},{n_v})"));
                }
            }
        }
        let ctx = obstruction_context(p, 0, 1, WINDOW).unwrap();
        if !monomial_obstruction(&st_monomial(&ctx), &ctx, 0, 1, WINDOW).unwrap() {
            bad.push(format!("n_u = 0 control not obstructed at p={p}"));
        }
        let chain = not_fg_demonstration(p, 1, 1, 6, WINDOW).unwrap();
        if !chain.all_strict {
            bad.push(format!("chain not strict at p={p}"));
        }
    }
    outcome(bad.is_empty(), format!("p in {{2,3}}, n_u, n_v <= 3, window {WINDOW}; problems {bad:?}"))
}

fn one_variable_suite() -> Outcome {
    let mut problems = Vec::new();
    for p in [2, 3, 5] {
        let r = one_var_free_decomposition(p, 0, 16).unwrap();
        if !r.pass {
            problems.push(format!("free decomposition p={p}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    for case in 0..RANDOM_SUBMODULES {
        let p = [2, 3][case % 2];
        let ctx = SkewContext1::new(SeriesContext::new(p, 1, 0, 8).unwrap(), 8).unwrap();
        let gens = common::random_submodule(&mut rng, ctx);
        let r = filtration_identity_check(&gens, 4).unwrap();
        if !r.pass {
            problems.push(format!("filtration case {case} (p={p})"));
        }
    }
    let ctx = SkewContext1::new(SeriesContext::new(2, 1, 0, 8).unwrap(), 8).unwrap();
    let mono = |e: u64, i: u32| SkewPoly1::term(TruncSeries::var(ctx.series, 0, e), i, ctx).unwrap();
    let hand = [(vec![vec![mono(1, 0)]], 0), (vec![vec![mono(1, 2)]], 2), (vec![vec![mono(1, 0)], vec![mono(0, 1)]], 1)];
    for (gens, want) in &hand {
        let got = mjm_degree_detect(gens, 4).unwrap().d;
        if got != *want {
            problems.push(format!("mjm degree {got}, expected {want}"));
        }
    }
    outcome(
        problems.is_empty(),
        format!("free decomposition p in {{2,3,5}}, {RANDOM_SUBMODULES} submodules, 3 degree examples; problems {problems:?}"),
    )
}

const SUBGROUP_PAIRS: [(&str, &str); 6] =
    [("x", "y"), ("row", "column"), ("center", "row"), ("diagonal-free", "x"), ("y", "center"), ("column", "trivial")];

fn mackey_suite() -> Outcome {
    let mut problems = Vec::new();
    let mut runs = 0;
    for (p, a) in [(2, 1), (3, 1), (2, 2)] {
        let g = FiniteGroup::unitriangular(p, a).unwrap();
        let mut rng = seeded_rng(SEED);
        for (h_name, g1_name) in SUBGROUP_PAIRS {
            let h = g.named_subgroup(h_name).unwrap();
            let g1 = g.named_subgroup(g1_name).unwrap();
            let modules = [FinModule::trivial(&g, &g1, p, 1).unwrap(), random_two_dim_module(&g, &g1, p, &mut rng).unwrap()];
            for m in &modules {
                runs += 1;
                let r = mackey_check(&g, &h, m).unwrap();
                let ok = r.left_dim == r.right_dim && r.psi_equivariant && r.psi_bijective && r.pass;
                if !ok {
                    problems.push(format!("{} H={h_name} G1={g1_name} dim {}", g.name(), m.dim()));
                }
            }
            if !coset_rep_check(&g, &h, &g1).unwrap().pass {
                problems.push(format!("{} cosets H={h_name} G1={g1_name}", g.name()));
            }
        }
    }
    outcome(problems.is_empty(), format!("{runs} Mackey checks over 3 groups; problems {problems:?}"))
}

fn commutator_suite() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (p, a) in [(2, 1), (3, 1), (2, 2)] {
        let r = commutator_identity_check(p, a).unwrap();
        pass &= r.s_first_form;
        lines.push(format!(
            "({p},{a}) st-ts=(1+s)(1+t)w {}, =(1+t)(1+s)w {}",
            r.s_first_form, r.t_first_form
        ));
    }
    outcome(pass, lines.join("; "))
}

const CLI_RUNS: [&[&str]; 8] = [
    &["decide", "H3"],
    &["decide", "B2"],
    &["catalog", "--check"],
    &["verify-skew", "--p", "3"],
    &["obstruction", "--control"],
    &["obstruction", "--nu", "2"],
    &["mackey", "--p", "3", "--dim", "2", "--seed", "11"],
    &["mackey", "--p", "2", "--a", "2", "--H", "center", "--G1", "row", "--dim", "2"],
];

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_coherence-lab");
    let mut bad = Vec::new();
    for args in CLI_RUNS {
        let run = || Command::new(bin).args(args).arg("--json").output().expect("binary runs");
        let (a, b) = (run(), run());
        if a.stdout != b.stdout || a.stdout.is_empty() || a.status != b.status {
            bad.push(args.join(" "));
        }
    }
    outcome(bad.is_empty(), format!("{} commands run twice; differing {bad:?}", CLI_RUNS.len()))
}

fn main() {
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("catalog verdicts", Some(LIMIT_CATALOG), catalog_verdicts),
        ("semisimple rule agrees with type A Borel", None, semisimple_vs_borel),
        ("pair merge on random lattices", Some(LIMIT_LATTICE), lattice_suite),
        ("certificates on random solvable data", None, certificate_suite),
        ("skew relation module", Some(LIMIT_SKEW), skew_suite),
        ("monomial obstruction", None, obstruction_suite),
        ("one-variable machinery", None, one_variable_suite),
        ("Mackey restriction", Some(LIMIT_MACKEY), mackey_suite),
        ("commutator identity st-ts=(1+s)(1+t)w", None, commutator_suite),
        ("CLI determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let o = timed(limit, f);
        failed += usize::from(!o.pass);
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
