//! Lower central series of the strictly upper triangular 4x4 matrices.

use coherence_lab::coherence_engine::unipotent_datum;
use coherence_lab::root_datum::{lower_central_series, validate, PadicFieldParams};

fn main() {
    let datum = unipotent_datum(4, PadicFieldParams::qp(2));
    validate(&datum).expect("valid datum");
    let lie = &datum.lie;
    println!("basis: {}", lie.labels().join(" "));
    for (i, term) in lower_central_series(lie).unwrap().iter().enumerate() {
        println!("term {}: dimension {}", i + 1, term.len());
    }
    for i in 0..lie.dim() {
        for j in i + 1..lie.dim() {
            for (k, c) in lie.bracket_terms(i, j) {
                println!("[{}, {}] = {c} {}", lie.labels()[i], lie.labels()[j], lie.labels()[k]);
            }
        }
    }
}
