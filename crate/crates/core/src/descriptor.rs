//! JSON group descriptors (schema "coherence-lab/1").

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coherence_engine::{EngineError, RootSystemLabel};
use crate::int_lattice::IntVector;
use crate::root_datum::{validate, GradedLieAlgebraQ, PadicFieldParams, SolvableGroupDatum, Violation, Weight, Q};

pub const SCHEMA: &str = "coherence-lab/1";

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("malformed descriptor at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("unsupported schema {0:?} (expected {SCHEMA:?})")]
    Schema(String),
    #[error("invalid descriptor: {0}")]
    Invalid(String),
    #[error("descriptor fails validation: {}", format_violations(.0))]
    Violations(Vec<Violation>),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| format!("[{}] {}", x.check, x.detail)).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorFile {
    pub schema: String,
    #[serde(flatten)]
    pub group: GroupDescriptor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupDescriptor {
    Solvable(SolvableDescriptor),
    Semisimple(SemisimpleDescriptor),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolvableDescriptor {
    pub p: u64,
    pub degree: u32,
    pub ramification: u32,
    pub residue_degree: u32,
    pub torus_rank: usize,
    pub torus_generators: Vec<IntVector>,
    pub weights: Vec<WeightEntry>,
    /// Weight index of each basis vector of the Lie algebra.
    pub basis_weights: Vec<usize>,
    pub brackets: Vec<BracketEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub exponents: IntVector,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<BracketTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketTerm {
    pub k: usize,
    /// Rational as "num/den" or "num".
    pub c: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemisimpleDescriptor {
    pub family: String,
    pub rank: u32,
}

impl DescriptorFile {
    pub fn solvable(d: SolvableDescriptor) -> Self {
        DescriptorFile { schema: SCHEMA.into(), group: GroupDescriptor::Solvable(d) }
    }

    pub fn semisimple(label: RootSystemLabel) -> Self {
        DescriptorFile {
            schema: SCHEMA.into(),
            group: GroupDescriptor::Semisimple(SemisimpleDescriptor {
                family: format!("{:?}", label.family),
                rank: label.rank,
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }
}

pub fn parse_descriptor(text: &str) -> Result<DescriptorFile, DescriptorError> {
    let file: DescriptorFile = serde_json::from_str(text).map_err(|e| DescriptorError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.schema != SCHEMA {
        return Err(DescriptorError::Schema(file.schema));
    }
    Ok(file)
}

pub fn parse_rational(s: &str) -> Result<Q, DescriptorError> {
    let q: Q = s.trim().parse().map_err(|_| DescriptorError::Invalid(format!("bad rational {s:?}")))?;
    Ok(q)
}

impl SemisimpleDescriptor {
    pub fn label(&self) -> Result<RootSystemLabel, DescriptorError> {
        let family = RootSystemLabel::family_from_letter(&self.family)?;
        Ok(RootSystemLabel::new(family, self.rank)?)
    }
}

impl SolvableDescriptor {
    /// Build and validate the datum. A bracket given only as [e_i, e_j] gets
    /// its mirror [e_j, e_i] = -[e_i, e_j]; mirrors given explicitly are kept
    /// as written, so inconsistent ones surface as antisymmetry violations.
    pub fn to_datum(&self) -> Result<SolvableGroupDatum, DescriptorError> {
        let dim = self.basis_weights.len();
        for (n, &w) in self.basis_weights.iter().enumerate() {
            if w >= self.weights.len() {
                return Err(DescriptorError::Invalid(format!("basis vector {n} refers to weight {w}, only {} weights", self.weights.len())));
            }
        }
        let labels = (0..dim).map(|i| format!("e{i}")).collect();
        let mut lie = GradedLieAlgebraQ::abelian(labels, self.basis_weights.clone());
        let given: std::collections::BTreeSet<(usize, usize)> = self.brackets.iter().map(|b| (b.i, b.j)).collect();
        for b in &self.brackets {
            if b.i >= dim || b.j >= dim {
                return Err(DescriptorError::Invalid(format!("bracket ({}, {}) outside dimension {dim}", b.i, b.j)));
            }
            if self.brackets.iter().filter(|o| (o.i, o.j) == (b.i, b.j)).count() > 1 {
                return Err(DescriptorError::Invalid(format!("bracket ({}, {}) given twice", b.i, b.j)));
            }
            let mut terms = Vec::new();
            for t in &b.terms {
                if t.k >= dim {
                    return Err(DescriptorError::Invalid(format!("bracket ({}, {}) has term index {} outside dimension {dim}", b.i, b.j, t.k)));
                }
                terms.push((t.k, parse_rational(&t.c)?));
            }
            if given.contains(&(b.j, b.i)) {
                for k in 0..dim {
                    lie.set_raw(b.i, b.j, k, Q::zero());
                }
                for (k, v) in terms {
                    let cur = lie.coeff(b.i, b.j, k).clone();
                    lie.set_raw(b.i, b.j, k, cur + v);
                }
            } else {
                lie.set_bracket(b.i, b.j, &terms);
            }
        }
        let datum = SolvableGroupDatum {
            field: PadicFieldParams {
                p: self.p,
                degree: self.degree,
                ramification: self.ramification,
                residue_degree: self.residue_degree,
            },
            torus_rank: self.torus_rank,
            torus_generators: self.torus_generators.clone(),
            weights: self
                .weights
                .iter()
                .map(|w| Weight { exponents: w.exponents.clone(), multiplicity: w.dim })
                .collect(),
            lie,
        };
        validate(&datum).map_err(DescriptorError::Violations)?;
        Ok(datum)
    }

    /// Inverse of `to_datum`: brackets listed once, for i < j, nonzero terms only.
    pub fn from_datum(d: &SolvableGroupDatum) -> Self {
        let dim = d.lie.dim();
        let mut brackets = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                let terms: Vec<BracketTerm> =
                    d.lie.bracket_terms(i, j).into_iter().map(|(k, c)| BracketTerm { k, c: c.to_string() }).collect();
                if !terms.is_empty() {
                    brackets.push(BracketEntry { i, j, terms });
                }
            }
        }
        SolvableDescriptor {
            p: d.field.p,
            degree: d.field.degree,
            ramification: d.field.ramification,
            residue_degree: d.field.residue_degree,
            torus_rank: d.torus_rank,
            torus_generators: d.torus_generators.clone(),
            weights: d.weights.iter().map(|w| WeightEntry { exponents: w.exponents.clone(), dim: w.multiplicity }).collect(),
            basis_weights: d.lie.weight_of().to_vec(),
            brackets,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEIS: &str = r#"{
  "schema": "coherence-lab/1",
  "kind": "solvable",
  "p": 3, "degree": 1, "ramification": 1, "residue_degree": 1,
  "torus_rank": 3,
  "torus_generators": [[1, 0, 1]],
  "weights": [
    {"exponents": [1, -1, 0], "dim": 1},
    {"exponents": [0, 1, -1], "dim": 1},
    {"exponents": [1, 0, -1], "dim": 1}
  ],
  "basis_weights": [0, 1, 2],
  "brackets": [{"i": 0, "j": 1, "terms": [{"k": 2, "c": "1"}]}]
}"#;

    #[test]
    fn parses_and_round_trips() {
        let f = parse_descriptor(HEIS).unwrap();
        let GroupDescriptor::Solvable(s) = &f.group else { panic!() };
        let d = s.to_datum().unwrap();
        assert_eq!(d.lie.bracket_terms(1, 0), vec![(2, -Q::from_integer(1.into()))]);
        let back = SolvableDescriptor::from_datum(&d);
        assert_eq!(&back, s);
        let again = parse_descriptor(&f.to_json()).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn errors_carry_positions() {
        let broken = HEIS.replace("\"dim\": 1},\n    {\"exponents\": [0, 1, -1]", "\"dim\": 1}\n    {\"exponents\": [0, 1, -1]");
        match parse_descriptor(&broken) {
            Err(DescriptorError::Json { line, .. }) => assert_eq!(line, 9),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_descriptor(&HEIS.replace("coherence-lab/1", "v0")), Err(DescriptorError::Schema(_))));
    }

    #[test]
    fn conflicting_mirror_is_a_violation() {
        let text = HEIS.replace(
            r#"[{"i": 0, "j": 1, "terms": [{"k": 2, "c": "1"}]}]"#,
            r#"[{"i": 0, "j": 1, "terms": [{"k": 2, "c": "1"}]}, {"i": 1, "j": 0, "terms": [{"k": 2, "c": "1/2"}]}]"#,
        );
        let f = parse_descriptor(&text).unwrap();
        let GroupDescriptor::Solvable(s) = &f.group else { panic!() };
        assert!(matches!(s.to_datum(), Err(DescriptorError::Violations(_))));
    }

    #[test]
    fn semisimple_labels() {
        let f = parse_descriptor(r#"{"schema": "coherence-lab/1", "kind": "semisimple", "family": "G", "rank": 2}"#).unwrap();
        let GroupDescriptor::Semisimple(s) = &f.group else { panic!() };
        assert_eq!(s.label().unwrap().to_string(), "G2");
        let bad = SemisimpleDescriptor { family: "G".into(), rank: 3 };
        assert!(bad.label().is_err());
    }
}
