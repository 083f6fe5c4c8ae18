//! Split semisimple groups: only rank one is coherent. The type A answer is
//! cross-checked against the solvable criterion on the Borel subgroup.

use coherence_lab::coherence_engine::{borel_datum_type_a, decide_semisimple, decide_solvable, RootSystemLabel};
use coherence_lab::root_datum::PadicFieldParams;

fn main() {
    for label in ["A1", "A2", "B2", "C3", "D4", "E6", "E8", "F4", "G2"] {
        let label: RootSystemLabel = label.parse().unwrap();
        let v = decide_semisimple(label).unwrap();
        println!("{label}: {}", if v.coherent { "coherent" } else { "not coherent" });
    }
    for r in 1..=4 {
        let borel = decide_solvable(&borel_datum_type_a(r, PadicFieldParams::qp(5))).unwrap();
        println!("Borel of SL_{}: {}", r + 1, if borel.is_coherent() { "coherent" } else { "not coherent" });
    }
}
