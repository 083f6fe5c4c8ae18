pub mod catalog;
pub mod cli;
pub mod coherence_engine;
pub mod descriptor;
pub mod finite_group_lab;
pub mod fp_linalg;
pub mod int_lattice;
pub mod root_datum;
pub mod skew_engine;

#[cfg(test)]
extern crate self as coherence_lab;
#[cfg(test)]
mod proptests;
