//! Finitely generated subgroups of Z^N: Hermite normal form, membership, the
//! sign cone, and the constructive cyclicity test on nonnegative rays.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("merge_pair needs nonnegative inputs, got {0}")]
    NotNonNegative(IntVector),
}

/// Vector in Z^N with arbitrary-precision coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn zero(n: usize) -> Self {
        IntVector(vec![BigInt::zero(); n])
    }

    pub fn from_i64(v: &[i64]) -> Self {
        IntVector(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.0[i] = BigInt::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }

    fn check_len(&self, other: &IntVector) -> Result<(), LatticeError> {
        if self.len() != other.len() {
            return Err(LatticeError::LengthMismatch { expected: self.len(), found: other.len() });
        }
        Ok(())
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }

    /// k·self + l·other
    pub fn combine(&self, k: &BigInt, other: &IntVector, l: &BigInt) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| k * a + l * b).collect())
    }

    pub fn dot(&self, other: &IntVector) -> Result<BigInt, LatticeError> {
        self.check_len(other)?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    pub fn is_nonpositive(&self) -> bool {
        self.0.iter().all(|x| !x.is_positive())
    }

    /// gcd of the coordinates (0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

// JSON form: plain numbers when they fit in i64, decimal strings otherwise.
impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for x in &self.0 {
            match x.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&x.to_string())?,
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Num {
            Int(i64),
            Text(String),
        }
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = IntVector;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an array of integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<IntVector, A::Error> {
                let mut out = Vec::new();
                while let Some(n) = seq.next_element::<Num>()? {
                    out.push(match n {
                        Num::Int(v) => BigInt::from(v),
                        Num::Text(t) => t
                            .parse::<BigInt>()
                            .map_err(|_| de::Error::custom(format!("bad integer {t:?}")))?,
                    });
                }
                Ok(IntVector(out))
            }
        }
        d.deserialize_seq(V)
    }
}

/// Serde adapter for a single `BigInt`, same JSON convention as `IntVector`.
pub mod big_int_json {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match x.to_i64() {
            Some(v) => v.serialize(s),
            None => x.to_string().serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Num {
            Int(i64),
            Text(String),
        }
        match Num::deserialize(d)? {
            Num::Int(v) => Ok(BigInt::from(v)),
            Num::Text(t) => t.parse().map_err(|_| de::Error::custom(format!("bad integer {t:?}"))),
        }
    }
}

pub fn in_sign_cone(v: &IntVector) -> bool {
    v.is_nonnegative() || v.is_nonpositive()
}

/// Row-style Hermite normal form: pivots strictly right-moving and positive,
/// entries above a pivot reduced into [0, pivot), zero rows removed.
pub fn hnf(generators: &[IntVector]) -> Result<Vec<IntVector>, LatticeError> {
    let Some(first) = generators.first() else {
        return Ok(Vec::new());
    };
    let n = first.len();
    for g in generators {
        first.check_len(g)?;
    }
    let mut rows: Vec<Vec<BigInt>> = generators.iter().map(|g| g.0.clone()).collect();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        if r == rows.len() {
            break;
        }
        // Euclid on column c among rows r.. until one nonzero entry remains.
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows.len() {
                if !rows[i][c].is_zero()
                    && best.is_none_or(|b| rows[i][c].abs() < rows[b][c].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            let pivot_row = rows[r].clone();
            for i in 0..r {
                let q = rows[i][c].div_floor(&pivot_row[c]);
                if !q.is_zero() {
                    for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * y;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    rows.truncate(r);
    Ok(rows.into_iter().map(IntVector).collect())
}

/// Subgroup of Z^N with a cached Hermite basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntLattice {
    ambient_dim: usize,
    generators: Vec<IntVector>,
    basis: Vec<IntVector>,
}

impl IntLattice {
    pub fn new(ambient_dim: usize, generators: Vec<IntVector>) -> Result<Self, LatticeError> {
        for g in &generators {
            if g.len() != ambient_dim {
                return Err(LatticeError::LengthMismatch { expected: ambient_dim, found: g.len() });
            }
        }
        let basis = hnf(&generators)?;
        Ok(IntLattice { ambient_dim, generators, basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }
    pub fn generators(&self) -> &[IntVector] {
        &self.generators
    }
    pub fn hnf_basis(&self) -> &[IntVector] {
        &self.basis
    }
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &IntVector) -> Result<bool, LatticeError> {
        if v.len() != self.ambient_dim {
            return Err(LatticeError::LengthMismatch { expected: self.ambient_dim, found: v.len() });
        }
        Ok(contains_in_basis(&self.basis, v))
    }
}

/// Back-substitution against a Hermite basis.
pub fn contains_in_basis(basis: &[IntVector], v: &IntVector) -> bool {
    let mut rest = v.clone();
    for row in basis {
        let Some(c) = row.0.iter().position(|x| !x.is_zero()) else { continue };
        if rest.0[..c].iter().any(|x| !x.is_zero()) {
            return false;
        }
        let (q, rem) = rest.0[c].div_rem(&row.0[c]);
        if !rem.is_zero() {
            return false;
        }
        rest = rest.combine(&BigInt::one(), row, &-q);
    }
    rest.is_zero()
}

/// An integer combination `x_coeff·x + y_coeff·y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combination {
    pub vector: IntVector,
    pub x_coeff: BigInt,
    pub y_coeff: BigInt,
}

impl Combination {
    fn new(x: &IntVector, a: BigInt, y: &IntVector, b: BigInt) -> Self {
        Combination { vector: x.combine(&a, y, &b), x_coeff: a, y_coeff: b }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairMerge {
    /// Z·vector = Zx + Zy and vector is nonnegative.
    Generator(Combination),
    /// An element of Zx + Zy with a positive and a negative coordinate.
    ConeViolation(Combination),
}

impl PairMerge {
    pub fn combination(&self) -> &Combination {
        match self {
            PairMerge::Generator(c) | PairMerge::ConeViolation(c) => c,
        }
    }
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Merge two nonnegative vectors: either a single nonnegative generator of
/// Zx + Zy, or an explicit element of Zx + Zy outside the sign cone.
pub fn merge_pair(x: &IntVector, y: &IntVector) -> Result<PairMerge, LatticeError> {
    x.check_len(y)?;
    for v in [x, y] {
        if !v.is_nonnegative() {
            return Err(LatticeError::NotNonNegative(v.clone()));
        }
    }
    let one = BigInt::one;
    let zero = BigInt::zero;
    if x.is_zero() {
        return Ok(PairMerge::Generator(Combination::new(x, zero(), y, one())));
    }
    if y.is_zero() {
        return Ok(PairMerge::Generator(Combination::new(x, one(), y, zero())));
    }
    let some_gt = x.0.iter().zip(&y.0).any(|(a, b)| a > b);
    let some_lt = x.0.iter().zip(&y.0).any(|(a, b)| a < b);
    if some_gt && some_lt {
        return Ok(PairMerge::ConeViolation(Combination::new(x, one(), y, -one())));
    }
    // Orient so that big >= small coordinatewise; coefficients are mapped
    // back through `orient`.
    let swapped = some_lt;
    let (big, small) = if swapped { (y, x) } else { (x, y) };
    let orient = |c_big: BigInt, c_small: BigInt| -> Combination {
        if swapped {
            Combination::new(x, c_small, y, c_big)
        } else {
            Combination::new(x, c_big, y, c_small)
        }
    };
    if (0..x.len()).any(|i| small.0[i].is_zero() && big.0[i].is_positive()) {
        let j = (0..x.len()).find(|&j| small.0[j].is_positive()).expect("small is nonzero");
        let m = big.0[j].div_floor(&small.0[j]) + one();
        return Ok(PairMerge::ConeViolation(orient(one(), -m)));
    }
    // Now both share a support and big_i >= small_i > 0 on it.
    let support: Vec<usize> = (0..x.len()).filter(|&i| small.0[i].is_positive()).collect();
    let mut i0 = support[0];
    for &i in &support[1..] {
        // big_i / small_i < big_i0 / small_i0
        if &big.0[i] * &small.0[i0] < &big.0[i0] * &small.0[i] {
            i0 = i;
        }
    }
    let g = big.0[i0].gcd(&small.0[i0]);
    let a = &big.0[i0] / &g;
    let b = &small.0[i0] / &g;
    let z = big.combine(&b, small, &-&a);
    if !z.is_zero() {
        // z >= 0 with z_{i0} = 0 < small_{i0}; push small past zero along a
        // coordinate where z is positive.
        let j = (0..x.len()).find(|&j| z.0[j].is_positive()).expect("z nonzero and nonnegative");
        let m = small.0[j].div_floor(&z.0[j]) + one();
        // small - m·z = small - m(b·big - a·small)
        let c_big = -(&m * &b);
        let c_small = one() + &m * &a;
        return Ok(PairMerge::ConeViolation(orient(c_big, c_small)));
    }
    // b·big = a·small with gcd(a, b) = 1: r·a - s·b = 1 gives the generator.
    let (_, r, t) = ext_gcd(&a, &b);
    let s = -t;
    let comb = orient(r, -s);
    debug_assert!(comb.vector.is_nonnegative());
    Ok(PairMerge::Generator(comb))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeOutcome {
    /// Nonnegative generator of the lattice; `combination[i]` is the
    /// coefficient of input generator i.
    Generator { generator: IntVector, combination: Vec<BigInt> },
    MixedWitness { witness: IntVector, combination: Vec<BigInt> },
}

/// Fold the lattice generators through `merge_pair`, after sign-normalizing
/// each one, and keep the coefficients in terms of the inputs.
pub fn cyclic_cone_generator(lattice: &IntLattice) -> ConeOutcome {
    cyclic_cone_generator_of(lattice.ambient_dim(), lattice.generators())
}

pub fn cyclic_cone_generator_of(ambient_dim: usize, gens: &[IntVector]) -> ConeOutcome {
    let k = gens.len();
    let mut acc = IntVector::zero(ambient_dim);
    let mut acc_comb = vec![BigInt::zero(); k];
    for (idx, g) in gens.iter().enumerate() {
        let (v, sign) = if g.is_nonnegative() {
            (g.clone(), BigInt::one())
        } else if g.is_nonpositive() {
            (g.neg(), -BigInt::one())
        } else {
            let mut combination = vec![BigInt::zero(); k];
            combination[idx] = BigInt::one();
            return ConeOutcome::MixedWitness { witness: g.clone(), combination };
        };
        let merged = merge_pair(&acc, &v).expect("both inputs normalized to nonnegative");
        let c = merged.combination();
        let mut comb: Vec<BigInt> = acc_comb.iter().map(|a| a * &c.x_coeff).collect();
        comb[idx] += &c.y_coeff * &sign;
        match merged {
            PairMerge::Generator(c) => {
                acc = c.vector;
                acc_comb = comb;
            }
            PairMerge::ConeViolation(c) => {
                return ConeOutcome::MixedWitness { witness: c.vector, combination: comb };
            }
        }
    }
    ConeOutcome::Generator { generator: acc, combination: acc_comb }
}
