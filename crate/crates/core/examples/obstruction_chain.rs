//! s*t avoids every ideal (s^(p^(a n_u)))(t^(p^(b n_v))), so the chain
//! of submodules generated by s*t*z_1, ..., s*t*z_n never stabilizes.

use coherence_lab::skew_engine::{monomial_obstruction, not_fg_demonstration, obstruction_context, st_monomial};

fn main() {
    for (n_u, n_v) in [(1, 1), (2, 1), (3, 3), (0, 1)] {
        let ctx = obstruction_context(3, n_u, n_v, 8).unwrap();
        let hit = monomial_obstruction(&st_monomial(&ctx), &ctx, n_u, n_v, 8).unwrap();
        println!("n_u={n_u} n_v={n_v}: s*t obstructed = {hit}");
    }
    let chain = not_fg_demonstration(3, 1, 1, 6, 8).unwrap();
    for step in &chain.steps {
        println!("step {}: strict {}", step.step, step.strict);
    }
}
