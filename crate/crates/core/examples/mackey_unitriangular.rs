//! Res_H Ind_{G1} M against the sum over double cosets, for a random
//! two-dimensional module on U_3(Z/9).

use coherence_lab::finite_group_lab::{
    induction_transitivity_check, mackey_check, random_two_dim_module, seeded_rng, FiniteGroup,
};

fn main() {
    let g = FiniteGroup::unitriangular(3, 2).unwrap();
    let h = g.named_subgroup("center").unwrap();
    let g1 = g.named_subgroup("x").unwrap();
    let m = random_two_dim_module(&g, &g1, 3, &mut seeded_rng(7)).unwrap();
    let r = mackey_check(&g, &h, &m).unwrap();
    println!("|G| = {}, |H| = {}, |G1| = {}", r.group_order, r.h_order, r.g1_order);
    for t in &r.terms {
        println!("  double coset of {:?}: intersection index {}, dimension {}", t.representative, t.index, t.dim);
    }
    println!("left {} right {} equivariant {} bijective {}", r.left_dim, r.right_dim, r.psi_equivariant, r.psi_bijective);

    let mid = g.named_subgroup("row").unwrap();
    let m = random_two_dim_module(&g, &g.named_subgroup("center").unwrap(), 3, &mut seeded_rng(8)).unwrap();
    let tr = induction_transitivity_check(&g, &mid, &m).unwrap();
    println!("induction in stages: {}", tr.pass);
}
