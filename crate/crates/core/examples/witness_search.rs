//! Non-coherent data come with an embedded minimal subgroup. Here the
//! upper Borel of GL_4 and the Heisenberg group over Q_3.

use coherence_lab::catalog::h3_datum;
use coherence_lab::coherence_engine::{borel_datum_gl, decide_solvable, verify_certificate, Verdict};
use coherence_lab::root_datum::{PadicFieldParams, SolvableGroupDatum};

fn report(name: &str, datum: &SolvableGroupDatum) {
    let verdict = decide_solvable(datum).unwrap();
    verify_certificate(datum, &verdict).expect("certificate checks out");
    match verdict {
        Verdict::Coherent { generator, .. } => println!("{name}: coherent, generator {generator}"),
        Verdict::NotCoherent { mixed_witness, torus_element, embedded, .. } => {
            println!("{name}: not coherent");
            println!("  torus element {torus_element} has valuations {mixed_witness}");
            println!(
                "  embedded {:?} between weights {} and {} with valuations {} and {}, found after {} steps",
                embedded.kind, embedded.alpha, embedded.beta, embedded.n_alpha, embedded.n_beta, embedded.recursion_steps
            );
            for v in &embedded.subalgebra_basis {
                let coords: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                println!("    [{}]", coords.join(", "));
            }
        }
    }
}

fn main() {
    let field = PadicFieldParams::qp(3);
    report("Borel of GL_4", &borel_datum_gl(4, field));
    report("Heisenberg", &h3_datum(field));
}
