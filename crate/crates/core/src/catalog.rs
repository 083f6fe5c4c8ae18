//! Named groups with their known verdicts, and the shared decide entry point.

use serde::Serialize;

use crate::coherence_engine::{
    borel_datum_gl, decide_semisimple, decide_solvable, unipotent_datum, verify_certificate, Family, RootSystemLabel,
    SemisimpleVerdict, Verdict,
};
use crate::descriptor::{DescriptorError, DescriptorFile, GroupDescriptor, SolvableDescriptor};
use crate::int_lattice::IntVector;
use crate::root_datum::{GradedLieAlgebraQ, PadicFieldParams, SolvableGroupDatum, WitnessKind, Weight, Q};

/// Residue characteristic used by every solvable catalog entry.
pub const CATALOG_PRIME: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub coherent: bool,
    /// `None` on a non-coherent entry accepts either witness kind.
    pub witness: Option<WitnessKind>,
}

impl Expected {
    pub fn accepts(&self, got: &Expected) -> bool {
        self.coherent == got.coherent && (self.witness.is_none() || self.witness == got.witness)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub expected: Expected,
    pub descriptor: DescriptorFile,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Decision {
    Solvable { verdict: Verdict, certificate_verified: bool },
    Semisimple { verdict: SemisimpleVerdict },
}

impl Decision {
    pub fn is_coherent(&self) -> bool {
        match self {
            Decision::Solvable { verdict, .. } => verdict.is_coherent(),
            Decision::Semisimple { verdict } => verdict.coherent,
        }
    }

    pub fn witness(&self) -> Option<WitnessKind> {
        match self {
            Decision::Solvable { verdict: Verdict::NotCoherent { embedded, .. }, .. } => Some(embedded.kind),
            _ => None,
        }
    }

    pub fn outcome(&self) -> Expected {
        Expected { coherent: self.is_coherent(), witness: self.witness() }
    }
}

pub fn decide(desc: &DescriptorFile) -> Result<Decision, DescriptorError> {
    match &desc.group {
        GroupDescriptor::Solvable(s) => {
            let datum = s.to_datum()?;
            let verdict = decide_solvable(&datum)?;
            let certificate_verified = verify_certificate(&datum, &verdict).is_ok();
            Ok(Decision::Solvable { verdict, certificate_verified })
        }
        GroupDescriptor::Semisimple(s) => Ok(Decision::Semisimple { verdict: decide_semisimple(s.label()?)? }),
    }
}

fn semisimple(name: &'static str, summary: &'static str, family: Family, rank: u32) -> CatalogEntry {
    let label = RootSystemLabel::new(family, rank).expect("catalog label");
    CatalogEntry {
        name,
        summary,
        expected: Expected { coherent: rank == 1, witness: None },
        descriptor: DescriptorFile::semisimple(label),
    }
}

fn solvable(name: &'static str, summary: &'static str, expected: Expected, d: &SolvableGroupDatum) -> CatalogEntry {
    CatalogEntry { name, summary, expected, descriptor: DescriptorFile::solvable(SolvableDescriptor::from_datum(d)) }
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

/// Q_p^m: no torus, one trivial weight of multiplicity m.
pub fn vector_group_datum(m: usize, field: PadicFieldParams) -> SolvableGroupDatum {
    SolvableGroupDatum {
        field,
        torus_rank: 0,
        torus_generators: Vec::new(),
        weights: vec![Weight { exponents: IntVector::zero(0), multiplicity: m }],
        lie: GradedLieAlgebraQ::abelian(labels(m), vec![0; m]),
    }
}

/// Q_p with diag(p, 1) acting: a single weight, valuation 1 on the generator.
pub fn semidirect_line_datum(field: PadicFieldParams) -> SolvableGroupDatum {
    SolvableGroupDatum {
        field,
        torus_rank: 1,
        torus_generators: vec![IntVector::from_i64(&[1])],
        weights: vec![Weight::new(&[1], 1)],
        lie: GradedLieAlgebraQ::abelian(labels(1), vec![0]),
    }
}

/// Q_p^2 with one torus element scaling the two lines by opposite valuations.
pub fn g3_datum(field: PadicFieldParams) -> SolvableGroupDatum {
    SolvableGroupDatum {
        field,
        torus_rank: 2,
        torus_generators: vec![IntVector::from_i64(&[1, -1])],
        weights: vec![Weight::new(&[1, 0], 1), Weight::new(&[0, 1], 1)],
        lie: GradedLieAlgebraQ::abelian(labels(2), vec![0, 1]),
    }
}

/// Heisenberg group with a torus element of valuations (1, -1, 0) on x, y, [x, y].
pub fn h3_datum(field: PadicFieldParams) -> SolvableGroupDatum {
    let mut lie = GradedLieAlgebraQ::abelian(labels(3), vec![0, 1, 2]);
    lie.set_bracket(0, 1, &[(2, Q::from_integer(1.into()))]);
    SolvableGroupDatum {
        field,
        torus_rank: 3,
        torus_generators: vec![IntVector::from_i64(&[1, 0, 1])],
        weights: vec![Weight::new(&[1, -1, 0], 1), Weight::new(&[0, 1, -1], 1), Weight::new(&[1, 0, -1], 1)],
        lie,
    }
}

pub fn catalog() -> Vec<CatalogEntry> {
    let field = PadicFieldParams::qp(CATALOG_PRIME);
    let coherent = Expected { coherent: true, witness: None };
    vec![
        semisimple("SL2", "SL_2, root system A1", Family::A, 1),
        semisimple("PGL2", "PGL_2, root system A1", Family::A, 1),
        semisimple("SL3", "SL_3, root system A2", Family::A, 2),
        solvable(
            "GL3",
            "upper Borel of GL_3 with the full diagonal torus",
            Expected { coherent: false, witness: None },
            &borel_datum_gl(3, field),
        ),
        solvable(
            "GL4",
            "upper Borel of GL_4 with the full diagonal torus",
            Expected { coherent: false, witness: None },
            &borel_datum_gl(4, field),
        ),
        semisimple("SO5", "SO_5, root system B2", Family::B, 2),
        semisimple("Sp4", "Sp_4, root system C2", Family::C, 2),
        semisimple("G2", "split G2", Family::G, 2),
        solvable("Qp^m", "the vector group Q_p^3", coherent, &vector_group_datum(3, field)),
        solvable("Un(F)", "upper unitriangular U_4 without torus", coherent, &unipotent_datum(4, field)),
        solvable("pZ-semidirect-Qp", "Q_p extended by diag(p, 1)", coherent, &semidirect_line_datum(field)),
        solvable(
            "G3",
            "Q_p^2 with opposite valuations on the two lines",
            Expected { coherent: false, witness: Some(WitnessKind::G3) },
            &g3_datum(field),
        ),
        solvable(
            "H3",
            "Heisenberg group with valuations (1, -1) on its generators",
            Expected { coherent: false, witness: Some(WitnessKind::H3) },
            &h3_datum(field),
        ),
    ]
}

/// Catalog name, or a root system label such as "B3".
pub fn lookup(name: &str) -> Option<CatalogEntry> {
    if let Some(e) = catalog().into_iter().find(|e| e.name == name) {
        return Some(e);
    }
    let label: RootSystemLabel = name.parse().ok()?;
    let desc = DescriptorFile::semisimple(label);
    let summary = "root system label";
    Some(CatalogEntry { name: "label", summary, expected: Expected { coherent: label.rank == 1, witness: None }, descriptor: desc })
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogCheck {
    pub name: &'static str,
    pub expected: Expected,
    pub decided: Option<Expected>,
    pub certificate_verified: Option<bool>,
    pub error: Option<String>,
    pub matches: bool,
}

pub fn check_catalog() -> Vec<CatalogCheck> {
    catalog()
        .into_iter()
        .map(|e| match decide(&e.descriptor) {
            Ok(d) => {
                let cert = match &d {
                    Decision::Solvable { certificate_verified, .. } => Some(*certificate_verified),
                    Decision::Semisimple { .. } => None,
                };
                let got = d.outcome();
                CatalogCheck {
                    name: e.name,
                    expected: e.expected,
                    decided: Some(got),
                    certificate_verified: cert,
                    error: None,
                    matches: e.expected.accepts(&got) && cert != Some(false),
                }
            }
            Err(err) => CatalogCheck {
                name: e.name,
                expected: e.expected,
                decided: None,
                certificate_verified: None,
                error: Some(err.to_string()),
                matches: false,
            },
        })
        .collect()
}
