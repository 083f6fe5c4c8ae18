//! Solvable group data T ⋉ U: field parameters, torus valuation vectors,
//! weights, and a weight-graded nilpotent Lie algebra over Q.
//!
//! Torus elements are represented only through valuations; unit parts and
//! the compact part of the torus are invisible to every check here.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fp_linalg::is_prime;
use crate::int_lattice::{IntLattice, IntVector, LatticeError};

pub type Q = BigRational;
pub type QVec = Vec<Q>;

/// Jacobi and nilpotency are checked exhaustively up to this dimension.
pub const MAX_CHECKED_DIM: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatumError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("lower central series stabilizes at dimension {0}")]
    NotNilpotent(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("malformed datum: {0}")]
    MalformedDatum(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicFieldParams {
    pub p: u64,
    pub degree: u32,
    pub ramification: u32,
    pub residue_degree: u32,
}

impl PadicFieldParams {
    pub fn qp(p: u64) -> Self {
        PadicFieldParams { p, degree: 1, ramification: 1, residue_degree: 1 }
    }

    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !is_prime(self.p) {
            out.push(Violation::new("field", format!("p = {} is not prime", self.p)));
        }
        if self.degree == 0 || self.ramification == 0 || self.residue_degree == 0 {
            out.push(Violation::new("field", "degree, ramification and residue degree must be >= 1"));
        } else if self.ramification as u64 * self.residue_degree as u64 != self.degree as u64 {
            out.push(Violation::new(
                "field",
                format!(
                    "e*f = {}*{} differs from n = {}",
                    self.ramification, self.residue_degree, self.degree
                ),
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weight {
    pub exponents: IntVector,
    pub multiplicity: usize,
}

impl Weight {
    pub fn new(exponents: &[i64], multiplicity: usize) -> Self {
        Weight { exponents: IntVector::from_i64(exponents), multiplicity }
    }
}

pub fn valuation_of_character(w: &Weight, t: &IntVector) -> Result<BigInt, LatticeError> {
    w.exponents.dot(t)
}

/// Lie algebra over Q with basis e_0..e_{m-1}, each basis vector sitting in
/// one weight space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedLieAlgebraQ {
    dim: usize,
    labels: Vec<String>,
    weight_of: Vec<usize>,
    // c[(i*dim + j)*dim + k] is the coefficient of e_k in [e_i, e_j]
    c: Vec<Q>,
}

impl GradedLieAlgebraQ {
    /// Abelian algebra with the given labels and weight assignment.
    pub fn abelian(labels: Vec<String>, weight_of: Vec<usize>) -> Self {
        assert_eq!(labels.len(), weight_of.len());
        let dim = labels.len();
        GradedLieAlgebraQ { dim, labels, weight_of, c: vec![Q::zero(); dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn weight_of(&self) -> &[usize] {
        &self.weight_of
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> &Q {
        &self.c[self.idx(i, j, k)]
    }

    /// Set one structure constant without touching its mirror.
    pub fn set_raw(&mut self, i: usize, j: usize, k: usize, v: Q) {
        let at = self.idx(i, j, k);
        self.c[at] = v;
    }

    /// Set [e_i, e_j] = Σ terms and [e_j, e_i] = −Σ terms.
    pub fn set_bracket(&mut self, i: usize, j: usize, terms: &[(usize, Q)]) {
        for k in 0..self.dim {
            self.set_raw(i, j, k, Q::zero());
            self.set_raw(j, i, k, Q::zero());
        }
        for (k, v) in terms {
            let a = self.idx(i, j, *k);
            self.c[a] += v;
            let b = self.idx(j, i, *k);
            self.c[b] -= v;
        }
    }

    /// Terms of [e_i, e_j] with nonzero coefficient.
    pub fn bracket_terms(&self, i: usize, j: usize) -> Vec<(usize, Q)> {
        (0..self.dim)
            .filter_map(|k| {
                let v = self.coeff(i, j, k);
                (!v.is_zero()).then(|| (k, v.clone()))
            })
            .collect()
    }

    pub fn basis_vector(&self, i: usize) -> QVec {
        let mut v = vec![Q::zero(); self.dim];
        v[i] = Q::one();
        v
    }

    pub fn bracket(&self, u: &[Q], v: &[Q]) -> QVec {
        let mut out = vec![Q::zero(); self.dim];
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                let f = ui * vj;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.coeff(i, j, k);
                    if !c.is_zero() {
                        *o += &f * c;
                    }
                }
            }
        }
        out
    }

    /// Weight index of a nonzero homogeneous vector.
    pub fn weight_of_vector(&self, v: &[Q]) -> Option<usize> {
        let mut w = None;
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            match w {
                None => w = Some(self.weight_of[i]),
                Some(prev) if prev != self.weight_of[i] => return None,
                _ => {}
            }
        }
        w
    }
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Span over Q, kept in reduced echelon form, remembering the vectors that
/// were actually inserted.
#[derive(Debug, Clone)]
pub struct QSpan {
    dim: usize,
    echelon: Vec<(usize, QVec)>,
    inserted: Vec<QVec>,
}

impl QSpan {
    pub fn new(dim: usize) -> Self {
        QSpan { dim, echelon: Vec::new(), inserted: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.inserted.len()
    }

    /// The inserted vectors that raised the rank, in insertion order.
    pub fn basis(&self) -> &[QVec] {
        &self.inserted
    }

    fn reduce(&self, v: &[Q]) -> QVec {
        let mut w = v.to_vec();
        for (c, row) in &self.echelon {
            if w[*c].is_zero() {
                continue;
            }
            let f = w[*c].clone();
            for (x, y) in w.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    pub fn insert(&mut self, v: &[Q]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w = self.reduce(v);
        let Some(c) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = Q::one() / &w[c];
        for x in w.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.echelon.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&w) {
                *x -= &f * y;
            }
        }
        self.echelon.push((c, w));
        self.inserted.push(v.to_vec());
        true
    }
}

/// Smallest bracket-closed subspace containing `gens`. The returned basis
/// consists of the generators and iterated brackets that raised the rank,
/// so homogeneous generators give a homogeneous basis.
pub fn subalgebra_generated(lie: &GradedLieAlgebraQ, gens: &[QVec]) -> Vec<QVec> {
    let mut span = QSpan::new(lie.dim());
    for g in gens {
        span.insert(g);
    }
    let mut done = 0;
    while done < span.rank() {
        let v = span.basis()[done].clone();
        for i in 0..=done {
            let u = span.basis()[i].clone();
            let b = lie.bracket(&u, &v);
            if !is_zero_vec(&b) {
                span.insert(&b);
            }
        }
        done += 1;
    }
    span.basis().to_vec()
}

/// 𝔤¹ = 𝔤, 𝔤^{k+1} = [𝔤, 𝔤^k], ending with the zero term.
pub fn lower_central_series(lie: &GradedLieAlgebraQ) -> Result<Vec<Vec<QVec>>, DatumError> {
    let m = lie.dim();
    let mut chain: Vec<Vec<QVec>> = vec![(0..m).map(|i| lie.basis_vector(i)).collect()];
    loop {
        let last = chain.last().expect("chain starts nonempty");
        if last.is_empty() {
            return Ok(chain);
        }
        let mut next = QSpan::new(m);
        for i in 0..m {
            let e = lie.basis_vector(i);
            for v in last {
                let b = lie.bracket(&e, v);
                if !is_zero_vec(&b) {
                    next.insert(&b);
                }
            }
        }
        if next.rank() == last.len() {
            return Err(DatumError::NotNilpotent(next.rank()));
        }
        chain.push(next.basis().to_vec());
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub detail: String,
}

impl Violation {
    fn new(check: &str, detail: impl Into<String>) -> Self {
        Violation { check: check.to_string(), detail: detail.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolvableGroupDatum {
    pub field: PadicFieldParams,
    pub torus_rank: usize,
    pub torus_generators: Vec<IntVector>,
    pub weights: Vec<Weight>,
    pub lie: GradedLieAlgebraQ,
}

impl SolvableGroupDatum {
    pub fn weight_index(&self, exponents: &IntVector) -> Option<usize> {
        self.weights.iter().position(|w| &w.exponents == exponents)
    }

    /// Basis indices lying in weight space `w`.
    pub fn weight_space(&self, w: usize) -> Vec<usize> {
        (0..self.lie.dim()).filter(|&i| self.lie.weight_of()[i] == w).collect()
    }

    /// Torus element Σ c_i v_i.
    pub fn torus_element(&self, combination: &[BigInt]) -> IntVector {
        let mut t = IntVector::zero(self.torus_rank);
        for (c, v) in combination.iter().zip(&self.torus_generators) {
            t = t.combine(&BigInt::one(), v, c);
        }
        t
    }

    /// f(t): the valuation of every weight at t.
    pub fn f_of(&self, t: &IntVector) -> Result<IntVector, LatticeError> {
        Ok(IntVector(
            self.weights.iter().map(|w| valuation_of_character(w, t)).collect::<Result<_, _>>()?,
        ))
    }
}

/// |Φ| × d matrix of weight exponents.
pub fn f_matrix(datum: &SolvableGroupDatum) -> Vec<IntVector> {
    datum.weights.iter().map(|w| w.exponents.clone()).collect()
}

pub fn f_image(datum: &SolvableGroupDatum) -> Result<IntLattice, LatticeError> {
    let images = datum.torus_generators.iter().map(|v| datum.f_of(v)).collect::<Result<_, _>>()?;
    IntLattice::new(datum.weights.len(), images)
}

pub fn validate(datum: &SolvableGroupDatum) -> Result<(), Vec<Violation>> {
    let mut out = datum.field.violations();
    let d = datum.torus_rank;
    for (i, v) in datum.torus_generators.iter().enumerate() {
        if v.len() != d {
            out.push(Violation::new("torus", format!("generator {i} has length {} (torus rank {d})", v.len())));
        }
    }
    for (i, w) in datum.weights.iter().enumerate() {
        if w.exponents.len() != d {
            out.push(Violation::new("weights", format!("weight {i} has {} exponents (torus rank {d})", w.exponents.len())));
        }
        if w.multiplicity == 0 {
            out.push(Violation::new("weights", format!("weight {i} has multiplicity 0")));
        }
        for (j, other) in datum.weights.iter().enumerate().skip(i + 1) {
            if other.exponents == w.exponents {
                out.push(Violation::new("weights", format!("weights {i} and {j} coincide")));
            }
        }
    }
    let lie = &datum.lie;
    let m = lie.dim();
    if m > MAX_CHECKED_DIM {
        out.push(Violation::new("dimension", format!("dim {m} exceeds the checked limit {MAX_CHECKED_DIM}")));
        return Err(out);
    }
    let mut counts = vec![0usize; datum.weights.len()];
    for (i, &w) in lie.weight_of().iter().enumerate() {
        match counts.get_mut(w) {
            Some(c) => *c += 1,
            None => out.push(Violation::new("weights", format!("basis vector {i} refers to missing weight {w}"))),
        }
    }
    for (w, (&c, weight)) in counts.iter().zip(&datum.weights).enumerate() {
        if c != weight.multiplicity {
            out.push(Violation::new(
                "weights",
                format!("weight {w} declares multiplicity {} but has {c} basis vectors", weight.multiplicity),
            ));
        }
    }
    if !out.is_empty() {
        return Err(out);
    }

    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if lie.coeff(i, j, k) != &-lie.coeff(j, i, k) {
                    out.push(Violation::new("antisymmetry", format!("c[{i},{j}]^{k} != -c[{j},{i}]^{k}")));
                }
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for (k, _) in lie.bracket_terms(i, j) {
                let sum = datum.weights[lie.weight_of()[i]].exponents.add(&datum.weights[lie.weight_of()[j]].exponents);
                if datum.weights[lie.weight_of()[k]].exponents != sum {
                    out.push(Violation::new(
                        "grading",
                        format!("[e{i},e{j}] has an e{k} term but weight(e{k}) != weight(e{i}) + weight(e{j})"),
                    ));
                    continue;
                }
                for t in &datum.torus_generators {
                    let n = |b: usize| valuation_of_character(&datum.weights[lie.weight_of()[b]], t).unwrap();
                    if n(k) != n(i) + n(j) {
                        out.push(Violation::new("additivity", format!("valuations not additive on [e{i},e{j}] at {t}")));
                    }
                }
            }
        }
    }
    let basis: Vec<QVec> = (0..m).map(|i| lie.basis_vector(i)).collect();
    for i in 0..m {
        for j in i + 1..m {
            let bij = lie.bracket(&basis[i], &basis[j]);
            for k in j + 1..m {
                let t1 = lie.bracket(&bij, &basis[k]);
                let t2 = lie.bracket(&lie.bracket(&basis[j], &basis[k]), &basis[i]);
                let t3 = lie.bracket(&lie.bracket(&basis[k], &basis[i]), &basis[j]);
                let sum: QVec = t1.iter().zip(&t2).zip(&t3).map(|((a, b), c)| a + b + c).collect();
                if !is_zero_vec(&sum) {
                    out.push(Violation::new("jacobi", format!("fails on (e{i}, e{j}, e{k})")));
                }
            }
        }
    }
    if out.is_empty() {
        if let Err(e) = lower_central_series(lie) {
            out.push(Violation::new("nilpotency", e.to_string()));
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessKind {
    G3,
    H3,
}

/// The embedded minimal non-coherent subgroup found by the witness search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDescriptor {
    pub kind: WitnessKind,
    /// Weights of the two generators of the embedded subalgebra.
    pub alpha: usize,
    pub beta: usize,
    #[serde(with = "crate::int_lattice::big_int_json")]
    pub n_alpha: BigInt,
    #[serde(with = "crate::int_lattice::big_int_json")]
    pub n_beta: BigInt,
    pub torus_combination: IntVector,
    pub torus_element: IntVector,
    /// x, y for G3; x, y, [x, y] for H3.
    #[serde(with = "qvec_strings")]
    pub subalgebra_basis: Vec<QVec>,
    pub n_prime: u32,
    #[serde(with = "crate::int_lattice::big_int_json")]
    pub n_u: BigInt,
    #[serde(with = "crate::int_lattice::big_int_json")]
    pub n_v: BigInt,
    /// The weight pair the search started from.
    pub start: (usize, usize),
    pub recursion_steps: usize,
}

pub mod qvec_strings {
    use super::{QVec, Q};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[QVec], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(|q| q.to_string()).collect()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<QVec>, D::Error> {
        let strs: Vec<Vec<String>> = Vec::deserialize(d)?;
        strs.iter()
            .map(|r| {
                r.iter()
                    .map(|t| t.parse::<Q>().map_err(|_| serde::de::Error::custom(format!("bad rational {t:?}"))))
                    .collect()
            })
            .collect()
    }
}

/// Walk from a mixed-sign pair of weights down to an embedded G3 or H3,
/// replacing one generator by a bracket at each step.
pub fn witness_subgroup(
    datum: &SolvableGroupDatum,
    combination: &[BigInt],
    alpha: usize,
    beta: usize,
) -> Result<WitnessDescriptor, DatumError> {
    let t = datum.torus_element(combination);
    let n = |w: usize| valuation_of_character(&datum.weights[w], &t);
    let (na, nb) = (n(alpha)?, n(beta)?);
    if !na.is_positive() || !nb.is_negative() {
        return Err(DatumError::PreconditionViolation(format!(
            "need n_alpha > 0 > n_beta at {t}, got n_alpha = {na}, n_beta = {nb}"
        )));
    }
    let lie = &datum.lie;
    let space_a = datum.weight_space(alpha);
    let space_b = datum.weight_space(beta);
    let (Some(&xa), Some(&yb)) = (space_a.first(), space_b.first()) else {
        return Err(DatumError::MalformedDatum("empty weight space".into()));
    };
    let mut x = lie.basis_vector(xa);
    let mut y = lie.basis_vector(yb);
    if is_zero_vec(&lie.bracket(&x, &y)) {
        // representatives commute; look for a pair that does not
        'scan: for &i in &space_a {
            for &j in &space_b {
                if !lie.bracket_terms(i, j).is_empty() {
                    x = lie.basis_vector(i);
                    y = lie.basis_vector(j);
                    break 'scan;
                }
            }
        }
    }
    let (mut a, mut b) = (alpha, beta);
    let mut prev_dim = usize::MAX;
    let mut steps = 0;
    loop {
        let v = subalgebra_generated(lie, &[x.clone(), y.clone()]);
        if v.len() >= prev_dim {
            return Err(DatumError::MalformedDatum("witness recursion did not shrink".into()));
        }
        prev_dim = v.len();
        let describe = |kind, basis: Vec<QVec>, a: usize, b: usize, steps| -> Result<WitnessDescriptor, DatumError> {
            let (na, nb) = (n(a)?, n(b)?);
            Ok(WitnessDescriptor {
                kind,
                alpha: a,
                beta: b,
                n_alpha: na.clone(),
                n_beta: nb.clone(),
                torus_combination: IntVector(combination.to_vec()),
                torus_element: t.clone(),
                subalgebra_basis: basis,
                n_prime: datum.field.ramification,
                n_u: na,
                n_v: -nb,
                start: (alpha, beta),
                recursion_steps: steps,
            })
        };
        if v.len() == 2 {
            return describe(WitnessKind::G3, vec![x, y], a, b, steps);
        }
        let z = lie.bracket(&x, &y);
        let delta = datum.weights[a].exponents.add(&datum.weights[b].exponents);
        let d = match (lie.weight_of_vector(&z), datum.weight_index(&delta)) {
            (Some(dz), Some(dd)) if dz == dd => dd,
            _ => return Err(DatumError::MalformedDatum(format!("bracket of weights {a}, {b} is not in weight {delta}"))),
        };
        let xz = lie.bracket(&x, &z);
        let yz = lie.bracket(&y, &z);
        if is_zero_vec(&xz) && is_zero_vec(&yz) {
            return describe(WitnessKind::H3, vec![x, y, z], a, b, steps);
        }
        let nd = n(d)?;
        steps += 1;
        if nd.is_positive() {
            x = z;
            a = d;
        } else if nd.is_negative() {
            y = z;
            b = d;
        } else if !is_zero_vec(&xz) {
            // γ = α + δ keeps the sign of α
            let g = datum.weights[a].exponents.add(&datum.weights[d].exponents);
            a = datum
                .weight_index(&g)
                .ok_or_else(|| DatumError::MalformedDatum(format!("missing weight {g}")))?;
            x = xz;
        } else {
            let g = datum.weights[b].exponents.add(&datum.weights[d].exponents);
            b = datum
                .weight_index(&g)
                .ok_or_else(|| DatumError::MalformedDatum(format!("missing weight {g}")))?;
            y = yz;
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn q(n: i64) -> Q {
        Q::from_integer(BigInt::from(n))
    }

    pub fn labels(m: usize) -> Vec<String> {
        (0..m).map(|i| format!("e{i}")).collect()
    }

    /// e0 = x, e1 = y, e2 = z with [x, y] = z; weights α, β, α+β.
    pub fn heisenberg_datum() -> SolvableGroupDatum {
        let mut lie = GradedLieAlgebraQ::abelian(labels(3), vec![0, 1, 2]);
        lie.set_bracket(0, 1, &[(2, q(1))]);
        SolvableGroupDatum {
            field: PadicFieldParams::qp(3),
            torus_rank: 3,
            torus_generators: vec![IntVector::from_i64(&[1, 0, 1])],
            weights: vec![Weight::new(&[1, -1, 0], 1), Weight::new(&[0, 1, -1], 1), Weight::new(&[1, 0, -1], 1)],
            lie,
        }
    }

    /// [e1,e2] = e3, [e1,e3] = e4 with weights α, β, α+β, 2α+β in Z^2.
    pub fn filiform_datum(torus: &[i64]) -> SolvableGroupDatum {
        let mut lie = GradedLieAlgebraQ::abelian(labels(4), vec![0, 1, 2, 3]);
        lie.set_bracket(0, 1, &[(2, q(1))]);
        lie.set_bracket(0, 2, &[(3, q(1))]);
        SolvableGroupDatum {
            field: PadicFieldParams::qp(2),
            torus_rank: 2,
            torus_generators: vec![IntVector::from_i64(torus)],
            weights: vec![
                Weight::new(&[1, 0], 1),
                Weight::new(&[0, 1], 1),
                Weight::new(&[1, 1], 1),
                Weight::new(&[2, 1], 1),
            ],
            lie,
        }
    }

    fn dims(chain: &[Vec<QVec>]) -> Vec<usize> {
        chain.iter().map(Vec::len).collect()
    }

    #[test]
    fn valuation_examples() {
        let t = IntVector::from_i64(&[3, -2]);
        assert_eq!(valuation_of_character(&Weight::new(&[1, 0], 1), &t).unwrap(), BigInt::from(3));
        let t = IntVector::from_i64(&[1, 1]);
        assert_eq!(valuation_of_character(&Weight::new(&[2, -1], 1), &t).unwrap(), BigInt::from(1));
        assert!(valuation_of_character(&Weight::new(&[0, 0], 1), &IntVector::from_i64(&[7, 9])).unwrap().is_zero());
        assert!(valuation_of_character(&Weight::new(&[0], 1), &t).is_err());
    }

    #[test]
    fn f_matrix_transcribes_weights() {
        let mut d = heisenberg_datum();
        d.torus_rank = 2;
        d.weights = vec![Weight::new(&[2, -1], 1), Weight::new(&[-1, 2], 1), Weight::new(&[1, 1], 1)];
        d.torus_generators = vec![IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[0, 1])];
        let m: Vec<Vec<i64>> = f_matrix(&d).iter().map(|r| r.to_i64().unwrap()).collect();
        assert_eq!(m, vec![vec![2, -1], vec![-1, 2], vec![1, 1]]);
        assert_eq!(validate(&d), Ok(()));
        assert_eq!(f_image(&d).unwrap().rank(), 2);
    }

    #[test]
    fn f_image_examples() {
        let lie = GradedLieAlgebraQ::abelian(labels(2), vec![0, 1]);
        let g3 = SolvableGroupDatum {
            field: PadicFieldParams::qp(3),
            torus_rank: 2,
            torus_generators: vec![IntVector::from_i64(&[1, -1])],
            weights: vec![Weight::new(&[1, 0], 1), Weight::new(&[0, 1], 1)],
            lie,
        };
        let l = f_image(&g3).unwrap();
        assert_eq!(l.hnf_basis(), &[IntVector::from_i64(&[1, -1])]);
        let mut trivial = g3.clone();
        trivial.torus_generators.clear();
        assert_eq!(f_image(&trivial).unwrap().rank(), 0);
    }

    #[test]
    fn heisenberg_validates_and_series() {
        let d = heisenberg_datum();
        assert_eq!(validate(&d), Ok(()));
        assert_eq!(dims(&lower_central_series(&d.lie).unwrap()), vec![3, 1, 0]);
    }

    #[test]
    fn lower_central_series_examples() {
        let ab = GradedLieAlgebraQ::abelian(labels(2), vec![0, 0]);
        assert_eq!(dims(&lower_central_series(&ab).unwrap()), vec![2, 0]);
        let f = filiform_datum(&[1, 0]);
        assert_eq!(dims(&lower_central_series(&f.lie).unwrap()), vec![4, 2, 1, 0]);
    }

    #[test]
    fn grading_violation_detected() {
        let mut d = heisenberg_datum();
        d.weights[2] = Weight::new(&[5, 5, 5], 1);
        let errs = validate(&d).unwrap_err();
        assert!(errs.iter().any(|v| v.check == "grading"), "{errs:?}");
    }

    #[test]
    fn sl2_table_is_not_nilpotent() {
        // h = e0, e = e1, f = e2 all put in the trivial weight so that only
        // nilpotency can fail
        let mut lie = GradedLieAlgebraQ::abelian(labels(3), vec![0, 0, 0]);
        lie.set_bracket(0, 1, &[(1, q(2))]);
        lie.set_bracket(0, 2, &[(2, q(-2))]);
        lie.set_bracket(1, 2, &[(0, q(1))]);
        let d = SolvableGroupDatum {
            field: PadicFieldParams::qp(2),
            torus_rank: 1,
            torus_generators: vec![],
            weights: vec![Weight::new(&[0], 3)],
            lie,
        };
        let errs = validate(&d).unwrap_err();
        assert!(errs.iter().any(|v| v.check == "nilpotency"), "{errs:?}");
    }

    #[test]
    fn jacobi_and_antisymmetry_violations() {
        let mut d = heisenberg_datum();
        d.lie.set_raw(1, 0, 2, q(1));
        let errs = validate(&d).unwrap_err();
        assert!(errs.iter().any(|v| v.check == "antisymmetry"));
        // antisymmetric and trivially graded, but not a Lie bracket
        let mut lie = GradedLieAlgebraQ::abelian(labels(3), vec![0, 0, 0]);
        lie.set_bracket(0, 1, &[(1, q(1))]);
        lie.set_bracket(1, 2, &[(1, q(1))]);
        lie.set_bracket(0, 2, &[(0, q(1))]);
        let d = SolvableGroupDatum {
            field: PadicFieldParams::qp(2),
            torus_rank: 1,
            torus_generators: vec![],
            weights: vec![Weight::new(&[0], 3)],
            lie,
        };
        let errs = validate(&d).unwrap_err();
        assert!(errs.iter().any(|v| v.check == "jacobi"), "{errs:?}");
    }

    #[test]
    fn bookkeeping_violations() {
        let mut d = heisenberg_datum();
        d.field.ramification = 2;
        d.weights.push(Weight::new(&[1, -1, 0], 1));
        let errs = validate(&d).unwrap_err();
        assert!(errs.iter().any(|v| v.check == "field"));
        assert!(errs.iter().any(|v| v.detail.contains("coincide")));
    }

    #[test]
    fn subalgebra_examples() {
        let d = heisenberg_datum();
        let e = |i| d.lie.basis_vector(i);
        assert_eq!(subalgebra_generated(&d.lie, &[e(0), e(1)]).len(), 3);
        assert!(subalgebra_generated(&d.lie, &[vec![q(0); 3]]).is_empty());
        let v = subalgebra_generated(&d.lie, &[e(0), e(2)]);
        assert_eq!(v, vec![e(0), e(2)]);
    }

    #[test]
    fn witness_base_cases() {
        let lie = GradedLieAlgebraQ::abelian(labels(2), vec![0, 1]);
        let g3 = SolvableGroupDatum {
            field: PadicFieldParams::qp(3),
            torus_rank: 2,
            torus_generators: vec![IntVector::from_i64(&[1, -1])],
            weights: vec![Weight::new(&[1, 0], 1), Weight::new(&[0, 1], 1)],
            lie,
        };
        let w = witness_subgroup(&g3, &[BigInt::one()], 0, 1).unwrap();
        assert_eq!(w.kind, WitnessKind::G3);
        assert_eq!(w.subalgebra_basis.len(), 2);
        assert_eq!((w.n_u.clone(), w.n_v.clone()), (BigInt::one(), BigInt::one()));

        let h = heisenberg_datum();
        let w = witness_subgroup(&h, &[BigInt::one()], 0, 1).unwrap();
        assert_eq!(w.kind, WitnessKind::H3);
        assert_eq!(w.subalgebra_basis.len(), 3);
        assert!(matches!(
            witness_subgroup(&h, &[BigInt::one()], 1, 0),
            Err(DatumError::PreconditionViolation(_))
        ));
    }

    #[test]
    fn filiform_first_case_by_hand() {
        // t = (2, -1): n = (2, -1, 1, 3). Start from (e0, e1); δ = weight of
        // e2 has n = 1 > 0, so the search moves to (e2, e1). [e2, e1] = 0,
        // so the pair spans an abelian G3.
        let d = filiform_datum(&[2, -1]);
        assert_eq!(validate(&d), Ok(()));
        let w = witness_subgroup(&d, &[BigInt::one()], 0, 1).unwrap();
        assert_eq!(w.kind, WitnessKind::G3);
        assert_eq!((w.alpha, w.beta), (2, 1));
        assert_eq!(w.recursion_steps, 1);
        assert_eq!(w.n_alpha, BigInt::from(1));
        assert_eq!(w.n_beta, BigInt::from(-1));
    }

    #[test]
    fn filiform_zero_case() {
        // t = (1, -1): n = (1, -1, 0, 1). δ = α+β has n = 0 and [e0, e2] = e3
        // is nonzero, so the search moves to (γ, β) with γ = 2α+β.
        let d = filiform_datum(&[1, -1]);
        let w = witness_subgroup(&d, &[BigInt::one()], 0, 1).unwrap();
        assert_eq!((w.kind, w.alpha, w.beta), (WitnessKind::G3, 3, 1));
    }
}
