//! Write a group descriptor to JSON, read it back and decide it.
//!
//!     cargo run --example descriptor_file > heis.json
//!     cargo run --bin coherence-lab -- decide heis.json

use coherence_lab::catalog::{decide, h3_datum};
use coherence_lab::descriptor::{parse_descriptor, DescriptorFile, SolvableDescriptor};
use coherence_lab::root_datum::PadicFieldParams;

fn main() {
    let datum = h3_datum(PadicFieldParams::qp(5));
    let file = DescriptorFile::solvable(SolvableDescriptor::from_datum(&datum));
    let text = file.to_json();
    println!("{text}");
    let back = parse_descriptor(&text).unwrap();
    assert_eq!(back, file);
    let decision = decide(&back).unwrap();
    eprintln!("coherent: {}", decision.is_coherent());
}
