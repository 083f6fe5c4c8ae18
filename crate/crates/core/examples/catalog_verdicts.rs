//! Decide every catalog group and print its verdict next to the recorded one.

use coherence_lab::catalog::{catalog, decide};

fn main() {
    for entry in catalog() {
        let decision = decide(&entry.descriptor).expect("catalog entries are valid");
        let got = decision.outcome();
        let mark = if entry.expected.accepts(&got) { "ok" } else { "MISMATCH" };
        let witness = got.witness.map(|w| format!(" ({w:?} witness)")).unwrap_or_default();
        println!(
            "{:<18} {}{witness}  [{mark}]",
            entry.name,
            if got.coherent { "coherent" } else { "not coherent" }
        );
    }
}
