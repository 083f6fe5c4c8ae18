//! Decision procedures: the lattice criterion for solvable data with
//! certificates, the rank rule for split semisimple groups, and Borel data
//! in type A.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::int_lattice::{cyclic_cone_generator_of, in_sign_cone, ConeOutcome, IntVector};
use crate::root_datum::{
    is_zero_vec, subalgebra_generated, validate, witness_subgroup, DatumError, GradedLieAlgebraQ,
    PadicFieldParams, QSpan, SolvableGroupDatum, Violation, Weight, WitnessDescriptor, WitnessKind, Q,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid datum: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidDatum(Vec<Violation>),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error("invalid root system label: {0}")]
    InvalidLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Coherent {
        /// Nonnegative generator of f(T); zero when the image is trivial.
        generator: IntVector,
        trivial_image: bool,
        /// Coefficients over the torus generators with f(Σ c_i v_i) = generator.
        torus_combination: IntVector,
    },
    NotCoherent {
        mixed_witness: IntVector,
        torus_combination: IntVector,
        torus_element: IntVector,
        alpha: usize,
        beta: usize,
        embedded: WitnessDescriptor,
    },
}

impl Verdict {
    pub fn is_coherent(&self) -> bool {
        matches!(self, Verdict::Coherent { .. })
    }
}

pub fn decide_solvable(datum: &SolvableGroupDatum) -> Result<Verdict, EngineError> {
    validate(datum).map_err(EngineError::InvalidDatum)?;
    let images: Vec<IntVector> =
        datum.torus_generators.iter().map(|v| datum.f_of(v)).collect::<Result<_, _>>().map_err(DatumError::from)?;
    match cyclic_cone_generator_of(datum.weights.len(), &images) {
        ConeOutcome::Generator { generator, combination } => Ok(Verdict::Coherent {
            trivial_image: generator.is_zero(),
            generator,
            torus_combination: IntVector(combination),
        }),
        ConeOutcome::MixedWitness { witness, combination } => {
            let t = datum.torus_element(&combination);
            let ft = datum.f_of(&t).map_err(DatumError::from)?;
            if ft != witness {
                return Err(DatumError::MalformedDatum(format!("f({t}) = {ft} but the fold produced {witness}")).into());
            }
            let alpha = witness.coords().iter().position(|x| x.is_positive()).expect("mixed witness");
            let beta = witness.coords().iter().position(|x| x.is_negative()).expect("mixed witness");
            let embedded = witness_subgroup(datum, &combination, alpha, beta)?;
            Ok(Verdict::NotCoherent {
                mixed_witness: witness,
                torus_combination: IntVector(combination),
                torus_element: t,
                alpha,
                beta,
                embedded,
            })
        }
    }
}

/// Re-check a verdict against the datum from scratch.
pub fn verify_certificate(datum: &SolvableGroupDatum, verdict: &Verdict) -> Result<(), String> {
    let images: Vec<IntVector> =
        datum.torus_generators.iter().map(|v| datum.f_of(v)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    match verdict {
        Verdict::Coherent { generator, torus_combination, .. } => {
            if !generator.is_nonnegative() {
                return Err(format!("generator {generator} has a negative coordinate"));
            }
            let rebuilt = datum.f_of(&datum.torus_element(torus_combination.coords())).map_err(|e| e.to_string())?;
            if &rebuilt != generator {
                return Err(format!("torus combination maps to {rebuilt}, not {generator}"));
            }
            let pivot = generator.coords().iter().position(|x| !x.is_zero());
            for img in &images {
                let ok = match pivot {
                    None => img.is_zero(),
                    Some(c) => {
                        let q = &img.coords()[c] / &generator.coords()[c];
                        generator.scale(&q) == *img
                    }
                };
                if !ok {
                    return Err(format!("image {img} is not a multiple of {generator}"));
                }
            }
            Ok(())
        }
        Verdict::NotCoherent { mixed_witness, torus_combination, torus_element, alpha, beta, embedded } => {
            let t = datum.torus_element(torus_combination.coords());
            if &t != torus_element {
                return Err("torus element does not match its combination".into());
            }
            let ft = datum.f_of(&t).map_err(|e| e.to_string())?;
            if &ft != mixed_witness {
                return Err(format!("f(t) = {ft} differs from witness {mixed_witness}"));
            }
            if in_sign_cone(mixed_witness)
                || !mixed_witness.coords()[*alpha].is_positive()
                || !mixed_witness.coords()[*beta].is_negative()
            {
                return Err("witness coordinates do not have the claimed signs".into());
            }
            verify_embedded(datum, embedded)
        }
    }
}

fn verify_embedded(datum: &SolvableGroupDatum, w: &WitnessDescriptor) -> Result<(), String> {
    let lie = &datum.lie;
    let basis = &w.subalgebra_basis;
    let expected = match w.kind {
        WitnessKind::G3 => 2,
        WitnessKind::H3 => 3,
    };
    if basis.len() != expected {
        return Err(format!("{:?} witness with {} basis vectors", w.kind, basis.len()));
    }
    let mut span = QSpan::new(lie.dim());
    for b in basis {
        if lie.weight_of_vector(b).is_none() {
            return Err("basis vector is not weight-homogeneous".into());
        }
        if !span.insert(b) {
            return Err("basis vectors are dependent".into());
        }
    }
    for u in basis {
        for v in basis {
            if !span.contains(&lie.bracket(u, v)) {
                return Err("embedded subalgebra is not bracket-closed".into());
            }
        }
    }
    let t = datum.torus_element(w.torus_combination.coords());
    let n_of = |v: &[Q]| -> BigInt {
        let wi = lie.weight_of_vector(v).expect("checked homogeneous");
        datum.weights[wi].exponents.dot(&t).expect("lengths validated")
    };
    let (nx, ny) = (n_of(&basis[0]), n_of(&basis[1]));
    if !nx.is_positive() || !ny.is_negative() || nx != w.n_alpha || ny != w.n_beta {
        return Err(format!("generator valuations {nx}, {ny} do not match the descriptor"));
    }
    if w.n_u != nx || w.n_v != -ny || w.n_u < BigInt::one() || w.n_v < BigInt::one() {
        return Err("n_u / n_v inconsistent".into());
    }
    if w.n_prime != datum.field.ramification {
        return Err("n_prime differs from the ramification index".into());
    }
    let xy = lie.bracket(&basis[0], &basis[1]);
    match w.kind {
        WitnessKind::G3 => {
            if !is_zero_vec(&xy) {
                return Err("G3 generators do not commute".into());
            }
        }
        WitnessKind::H3 => {
            if xy != basis[2] || is_zero_vec(&xy) {
                return Err("H3 third vector is not [x, y]".into());
            }
            if !is_zero_vec(&lie.bracket(&basis[0], &xy)) || !is_zero_vec(&lie.bracket(&basis[1], &xy)) {
                return Err("[x, y] is not central in the H3 witness".into());
            }
        }
    }
    if subalgebra_generated(lie, &basis[..2]).len() != expected {
        return Err("generated subalgebra has the wrong dimension".into());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootSystemLabel {
    pub family: Family,
    pub rank: u32,
}

impl RootSystemLabel {
    pub fn new(family: Family, rank: u32) -> Result<Self, EngineError> {
        use Family::*;
        let ok = match family {
            A => rank >= 1,
            B | C => rank >= 2,
            D => rank >= 3,
            E => (6..=8).contains(&rank),
            F => rank == 4,
            G => rank == 2,
        };
        if ok {
            Ok(RootSystemLabel { family, rank })
        } else {
            Err(EngineError::InvalidLabel(format!("{family:?}{rank}")))
        }
    }

    pub fn family_from_letter(s: &str) -> Result<Family, EngineError> {
        use Family::*;
        Ok(match s {
            "A" => A,
            "B" => B,
            "C" => C,
            "D" => D,
            "E" => E,
            "F" => F,
            "G" => G,
            _ => return Err(EngineError::InvalidLabel(s.to_string())),
        })
    }
}

impl fmt::Display for RootSystemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl FromStr for RootSystemLabel {
    type Err = EngineError;
    fn from_str(s: &str) -> Result<Self, EngineError> {
        let bad = || EngineError::InvalidLabel(s.to_string());
        let letter = s.get(..1).ok_or_else(bad)?;
        let family = Self::family_from_letter(letter)?;
        let rank: u32 = s[1..].parse().map_err(|_| bad())?;
        Self::new(family, rank)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemisimpleVerdict {
    pub label: RootSystemLabel,
    pub coherent: bool,
    pub reason: String,
}

pub fn decide_semisimple(label: RootSystemLabel) -> Result<SemisimpleVerdict, EngineError> {
    let label = RootSystemLabel::new(label.family, label.rank)?;
    let (coherent, reason) = if label.rank == 1 {
        (true, "root system of rank 1: the group is SL2 or PGL2 up to isogeny, whose algebra is coherent".to_string())
    } else {
        (
            false,
            format!(
                "root system {label} has rank {} >= 2: a Borel subgroup has an image lattice of rank >= 2, \
                 which is not cyclic, so the Borel and hence the group is not coherent",
                label.rank
            ),
        )
    };
    Ok(SemisimpleVerdict { label, coherent, reason })
}

/// Unipotent radical of the upper Borel in GL_{n} with weights ε_i − ε_j in
/// the given coordinates of the diagonal torus.
fn upper_triangular_datum(
    n: usize,
    field: PadicFieldParams,
    torus_rank: usize,
    eps: impl Fn(usize) -> IntVector,
    torus_generators: Vec<IntVector>,
) -> SolvableGroupDatum {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let labels = pairs.iter().map(|(i, j)| format!("E{}{}", i + 1, j + 1)).collect();
    let weights: Vec<Weight> = pairs
        .iter()
        .map(|&(i, j)| Weight { exponents: eps(i).sub(&eps(j)), multiplicity: 1 })
        .collect();
    let mut lie = GradedLieAlgebraQ::abelian(labels, (0..pairs.len()).collect());
    let index = |i: usize, j: usize| pairs.iter().position(|&p| p == (i, j));
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(k, l)) in pairs.iter().enumerate().skip(a + 1) {
            // [E_ij, E_kl] = δ_jk E_il − δ_li E_kj
            let mut terms = Vec::new();
            if j == k {
                terms.push((index(i, l).expect("i < l"), Q::one()));
            }
            if l == i {
                terms.push((index(k, j).expect("k < j"), -Q::one()));
            }
            if !terms.is_empty() {
                lie.set_bracket(a, b, &terms);
            }
        }
    }
    SolvableGroupDatum { field, torus_rank, torus_generators, weights, lie }
}

/// Borel of SL_{r+1}: diagonal valuations with the last entry pinned to 0,
/// torus generators the standard basis of Z^r.
pub fn borel_datum_type_a(r: usize, field: PadicFieldParams) -> SolvableGroupDatum {
    assert!(r >= 1, "rank must be positive");
    let eps = move |i: usize| if i < r { IntVector::unit(r, i) } else { IntVector::zero(r) };
    let gens = (0..r).map(|i| IntVector::unit(r, i)).collect();
    upper_triangular_datum(r + 1, field, r, eps, gens)
}

/// Borel of GL_n with the full diagonal torus.
pub fn borel_datum_gl(n: usize, field: PadicFieldParams) -> SolvableGroupDatum {
    let gens = (0..n).map(|i| IntVector::unit(n, i)).collect();
    upper_triangular_datum(n, field, n, move |i| IntVector::unit(n, i), gens)
}

/// U_n with the diagonal-torus grading but no torus elements at all.
pub fn unipotent_datum(n: usize, field: PadicFieldParams) -> SolvableGroupDatum {
    upper_triangular_datum(n, field, n, move |i| IntVector::unit(n, i), Vec::new())
}
