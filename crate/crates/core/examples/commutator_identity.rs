//! In F_p[U_3(Z/p^a)] with s = x-1, t = y-1, w = z-1: which ordering of the
//! factors in st - ts = (1+?)(1+?)w actually holds.

use coherence_lab::finite_group_lab::commutator_identity_check;

fn main() {
    for (p, a) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let r = commutator_identity_check(p, a).unwrap();
        println!(
            "p={p} a={a}: xyx^-1y^-1 = z {}, (1+s)(1+t)w {}, (1+t)(1+s)w {}, w central {}",
            r.group_commutator, r.s_first_form, r.t_first_form, r.w_central
        );
    }
}
