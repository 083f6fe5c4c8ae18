//! The one-variable ring R = k[[t]][F; sigma]: k[[t]] is free of rank p over
//! its Frobenius image, the filtration identity holds, and the degree d with
//! M = M^{<=d} + JM is found by span comparison.

use coherence_lab::skew_engine::{
    filtration_identity_check, mjm_degree_detect, one_var_free_decomposition, SeriesContext, SkewContext1,
    SkewPoly1, TruncSeries,
};

fn main() {
    let free = one_var_free_decomposition(3, 0, 9).unwrap();
    println!("p=3: {} monomials, per residue {:?}", free.monomials, free.per_residue);
    for e in free.examples.iter().take(4) {
        println!("  {e}");
    }

    let ctx = SkewContext1::new(SeriesContext::new(2, 1, 0, 8).unwrap(), 8).unwrap();
    let t = SkewPoly1::constant(TruncSeries::var(ctx.series, 0, 1), ctx);
    let f = ctx.f();
    let r = filtration_identity_check(&[vec![t.clone(), f.clone()]], 4).unwrap();
    for l in &r.levels {
        println!("k={}: dim (JM)^k = {}, dim AFM^(k-1) = {}", l.k, l.lhs_dim, l.rhs_dim);
    }

    let tf2 = t.mul(&f).unwrap().mul(&f).unwrap();
    println!("d for (t F^2): {}", mjm_degree_detect(&[vec![tf2]], 4).unwrap().d);
    println!("d for (t), (F): {}", mjm_degree_detect(&[vec![t], vec![f]], 4).unwrap().d);
}
