//! Bounded relation module of the augmentation ideal of the two-variable
//! skew ring, checked against the three relation families.

use coherence_lab::skew_engine::{verify_relations, SkewParams};

fn main() {
    for (p, n_u, n_v) in [(2, 1, 1), (3, 1, 2), (2, 2, 2)] {
        let params = SkewParams { p, n_u, n_v, ..SkewParams::default() };
        let r = verify_relations(&params).unwrap();
        println!(
            "p={p} n_u={n_u} n_v={n_v}: {} unknowns, kernel {}, {} relation multiples, sound {}, complete {}",
            r.unknowns, r.kernel_dim, r.s_multiples_in_box, r.soundness_pass, r.completeness_pass
        );
        for s in &r.soundness {
            println!("  {:<6} lambda = {}", s.label, s.relation[0]);
        }
    }
}
