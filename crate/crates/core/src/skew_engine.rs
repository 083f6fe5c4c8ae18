//! Truncated power series over F_p with exponents on a 1/p^r grid, Frobenius
//! twists, and the skew polynomial rings A[F] and A[D, E] built on them.
//!
//! Exponents are stored as integers in units of 1/p^r. A context with
//! `limit == u64::MAX` never truncates; the bounded linear algebra evaluates
//! in such a context so no product term is silently lost.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::fp_linalg::{check_modulus, reduce, sparse_span_contains, LinalgError, SparseSystem, SparseVec, SubspaceBasis};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkewError {
    #[error("ring contexts differ: {0}")]
    ContextMismatch(String),
    #[error("exponent {exponent} (units of 1/p^{precision}) leaves the grid under a twist by p^{shift}")]
    PrecisionUnderflow { exponent: u64, precision: u32, shift: i64 },
    #[error("degree {degree} is outside the window {window}")]
    WindowExceeded { degree: i64, window: i64 },
    #[error("exponent overflow in an untruncated context")]
    Overflow,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("re-verification failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

type Result<T> = std::result::Result<T, SkewError>;

/// Largest number of unknowns a bounded computation may flatten to.
pub const MAX_COLUMNS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeriesContext {
    pub p: u64,
    pub nvars: usize,
    pub precision: u32,
    limit: u64,
}

impl SeriesContext {
    /// Drop monomials of total (ordinary) degree >= `truncation`.
    pub fn new(p: u64, nvars: usize, precision: u32, truncation: u64) -> Result<Self> {
        let ctx = Self::untruncated(p, nvars, precision)?;
        let limit = truncation.checked_mul(ctx.scale()).ok_or(SkewError::Overflow)?;
        if limit == u64::MAX {
            return Err(SkewError::Overflow);
        }
        Ok(SeriesContext { limit, ..ctx })
    }

    pub fn untruncated(p: u64, nvars: usize, precision: u32) -> Result<Self> {
        check_modulus(p)?;
        p.checked_pow(precision).ok_or(SkewError::Overflow)?;
        Ok(SeriesContext { p, nvars, precision, limit: u64::MAX })
    }

    pub fn scale(&self) -> u64 {
        self.p.pow(self.precision)
    }

    /// Exclusive degree bound in scaled units.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn truncation(&self) -> Option<u64> {
        (self.limit != u64::MAX).then(|| self.limit / self.scale())
    }

    pub fn is_truncated(&self) -> bool {
        self.limit != u64::MAX
    }

    pub fn without_truncation(&self) -> Self {
        SeriesContext { limit: u64::MAX, ..*self }
    }

    fn keeps(&self, m: &FracMonomial) -> bool {
        m.degree() < self.limit as u128
    }

    fn same_ring(&self, other: &Self) -> bool {
        self.p == other.p && self.nvars == other.nvars && self.precision == other.precision
    }

    fn var_name(&self, i: usize) -> String {
        match (self.nvars, i) {
            (1, _) => "t".into(),
            (2, 0) => "s".into(),
            (2, _) => "t".into(),
            _ => format!("x{i}"),
        }
    }
}

/// Exponent vector in units of 1/p^r. Ordered by total degree, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FracMonomial(pub Vec<u64>);

impl FracMonomial {
    pub fn one(nvars: usize) -> Self {
        FracMonomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u128 {
        self.0.iter().map(|&e| e as u128).sum()
    }

    fn mul(&self, other: &Self) -> Option<Self> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_add(*b)?);
        }
        Some(FracMonomial(out))
    }

    /// Whether `other` divides `self`.
    pub fn divisible_by(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl Ord for FracMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for FracMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn fmt_exponent(e: u64, scale: u64) -> String {
    let g = e.gcd(&scale);
    let (n, d) = (e / g, scale / g);
    match (n, d) {
        (1, 1) => String::new(),
        (_, 1) => format!("^{n}"),
        _ => format!("^({n}/{d})"),
    }
}

fn fmt_monomial(ctx: &SeriesContext, m: &FracMonomial) -> String {
    let parts: Vec<String> = m
        .0
        .iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(i, &e)| format!("{}{}", ctx.var_name(i), fmt_exponent(e, ctx.scale())))
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Finite F_p-combination of monomials, truncated according to its context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    ctx: SeriesContext,
    terms: BTreeMap<FracMonomial, u64>,
}

impl TruncSeries {
    pub fn zero(ctx: SeriesContext) -> Self {
        TruncSeries { ctx, terms: BTreeMap::new() }
    }

    pub fn one(ctx: SeriesContext) -> Self {
        Self::monomial(ctx, FracMonomial::one(ctx.nvars), 1)
    }

    /// c * x^m; dropped when beyond the truncation.
    pub fn monomial(ctx: SeriesContext, m: FracMonomial, c: i64) -> Self {
        assert_eq!(m.0.len(), ctx.nvars, "monomial arity");
        let mut s = Self::zero(ctx);
        s.add_term(m, reduce(c, ctx.p));
        s
    }

    /// x_v^e with `e` in scaled units.
    pub fn var_power(ctx: SeriesContext, v: usize, scaled_exp: u64) -> Self {
        let mut m = FracMonomial::one(ctx.nvars);
        m.0[v] = scaled_exp;
        Self::monomial(ctx, m, 1)
    }

    /// x_v to an ordinary integer power.
    pub fn var(ctx: SeriesContext, v: usize, exp: u64) -> Self {
        Self::var_power(ctx, v, exp * ctx.scale())
    }

    pub fn context(&self) -> SeriesContext {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FracMonomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &FracMonomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Highest total degree present, in scaled units.
    pub fn max_degree(&self) -> Option<u128> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    fn add_term(&mut self, m: FracMonomial, c: u64) {
        let p = self.ctx.p;
        if c % p == 0 || !self.ctx.keeps(&m) {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c % p);
            }
            Entry::Occupied(mut slot) => {
                let v = (*slot.get() + c) % p;
                if v == 0 {
                    slot.remove();
                } else {
                    *slot.get_mut() = v;
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(SkewError::ContextMismatch(format!("{:?} vs {:?}", self.ctx, other.ctx)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let p = self.ctx.p;
        TruncSeries { ctx: self.ctx, terms: self.terms.iter().map(|(m, &c)| (m.clone(), (p - c) % p)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut out = Self::zero(self.ctx);
        for (m, v) in self.terms() {
            out.add_term(m.clone(), v * (c % self.ctx.p));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.ctx);
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                match m1.mul(m2) {
                    Some(m) => out.add_term(m, c1 * c2),
                    None if self.ctx.is_truncated() => {}
                    None => return Err(SkewError::Overflow),
                }
            }
        }
        Ok(out)
    }

    /// Same element viewed in another context of the same ring (terms beyond
    /// the new truncation are dropped).
    pub fn with_context(&self, ctx: SeriesContext) -> Result<Self> {
        if !self.ctx.same_ring(&ctx) {
            return Err(SkewError::ContextMismatch(format!("{:?} vs {:?}", self.ctx, ctx)));
        }
        let mut out = Self::zero(ctx);
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(m, c)| {
                let mono = fmt_monomial(&self.ctx, m);
                match (c, mono.as_str()) {
                    (_, "1") => c.to_string(),
                    (1, _) => mono,
                    _ => format!("{c}*{mono}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn series_mul(a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries> {
    a.mul(b)
}

/// x_v -> x_v^(p^m_v) for each variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrobeniusEndo {
    pub multipliers: Vec<i64>,
}

impl FrobeniusEndo {
    pub fn new(multipliers: Vec<i64>) -> Self {
        FrobeniusEndo { multipliers }
    }

    pub fn identity(nvars: usize) -> Self {
        Self::new(vec![0; nvars])
    }

    pub fn power(&self, k: i64) -> Self {
        Self::new(self.multipliers.iter().map(|m| m * k).collect())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::new(self.multipliers.iter().zip(&other.multipliers).map(|(a, b)| a + b).collect())
    }

    /// None: the image overflows u64 (and therefore any truncation).
    fn map_monomial(&self, ctx: &SeriesContext, m: &FracMonomial) -> Result<Option<FracMonomial>> {
        let mut out = Vec::with_capacity(m.0.len());
        for (&e, &shift) in m.0.iter().zip(&self.multipliers) {
            if e == 0 {
                out.push(0);
                continue;
            }
            let Ok(k) = u32::try_from(shift.unsigned_abs()) else {
                return Err(SkewError::Overflow);
            };
            if shift >= 0 {
                match ctx.p.checked_pow(k).and_then(|f| e.checked_mul(f)) {
                    Some(v) => out.push(v),
                    None => return Ok(None),
                }
            } else {
                let d = ctx.p.checked_pow(k);
                match d {
                    Some(d) if e % d == 0 => out.push(e / d),
                    _ => {
                        return Err(SkewError::PrecisionUnderflow {
                            exponent: e,
                            precision: ctx.precision,
                            shift,
                        })
                    }
                }
            }
        }
        Ok(Some(FracMonomial(out)))
    }
}

pub fn apply_endo(sigma: &FrobeniusEndo, x: &TruncSeries) -> Result<TruncSeries> {
    if sigma.multipliers.len() != x.ctx.nvars {
        return Err(SkewError::ContextMismatch(format!(
            "endomorphism on {} variables applied to a ring in {}",
            sigma.multipliers.len(),
            x.ctx.nvars
        )));
    }
    let mut out = TruncSeries::zero(x.ctx);
    for (m, c) in x.terms() {
        match sigma.map_monomial(&x.ctx, m)? {
            Some(img) => out.add_term(img, c),
            None if x.ctx.is_truncated() => {}
            None => return Err(SkewError::Overflow),
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Two-variable ring A[D, E] over A = F_p[s, t] (fractional exponents).

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SkewContext2 {
    pub series: SeriesContext,
    /// sigma_D(s) = s^(p^n_u), sigma_E(t) = t^(p^n_v); D fixes t and E fixes s.
    pub n_u: u32,
    pub n_v: u32,
    /// Bound on |a| and |b| for D^a E^b.
    pub window: i64,
}

impl SkewContext2 {
    pub fn new(series: SeriesContext, n_u: u32, n_v: u32, window: i64) -> Result<Self> {
        if series.nvars != 2 {
            return Err(SkewError::InvalidParameters(format!("A[D, E] needs 2 variables, got {}", series.nvars)));
        }
        Ok(SkewContext2 { series, n_u, n_v, window })
    }

    /// sigma_D^a sigma_E^b.
    pub fn sigma(&self, a: i64, b: i64) -> FrobeniusEndo {
        FrobeniusEndo::new(vec![a * self.n_u as i64, b * self.n_v as i64])
    }

    pub fn untruncated(&self, window: i64) -> Self {
        SkewContext2 { series: self.series.without_truncation(), window, ..*self }
    }

    pub fn s(&self) -> SkewPoly2 {
        SkewPoly2::constant(TruncSeries::var(self.series, 0, 1), *self)
    }

    pub fn t(&self) -> SkewPoly2 {
        SkewPoly2::constant(TruncSeries::var(self.series, 1, 1), *self)
    }

    pub fn d(&self) -> SkewPoly2 {
        SkewPoly2::term(TruncSeries::one(self.series), 1, 0, *self).expect("window >= 1")
    }

    pub fn e(&self) -> SkewPoly2 {
        SkewPoly2::term(TruncSeries::one(self.series), 0, 1, *self).expect("window >= 1")
    }
}

/// Finite sum of c_{ab} D^a E^b, coefficients on the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewPoly2 {
    ctx: SkewContext2,
    terms: BTreeMap<(i64, i64), TruncSeries>,
}

impl SkewPoly2 {
    pub fn zero(ctx: SkewContext2) -> Self {
        SkewPoly2 { ctx, terms: BTreeMap::new() }
    }

    pub fn one(ctx: SkewContext2) -> Self {
        Self::constant(TruncSeries::one(ctx.series), ctx)
    }

    pub fn constant(c: TruncSeries, ctx: SkewContext2) -> Self {
        Self::term(c, 0, 0, ctx).expect("bidegree (0, 0)")
    }

    pub fn term(c: TruncSeries, a: i64, b: i64, ctx: SkewContext2) -> Result<Self> {
        if c.ctx != ctx.series {
            return Err(SkewError::ContextMismatch("coefficient context".into()));
        }
        check_window(a, ctx.window)?;
        check_window(b, ctx.window)?;
        let mut out = Self::zero(ctx);
        if !c.is_zero() {
            out.terms.insert((a, b), c);
        }
        Ok(out)
    }

    pub fn context(&self) -> SkewContext2 {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &TruncSeries)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, a: i64, b: i64) -> TruncSeries {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(|| TruncSeries::zero(self.ctx.series))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest a + b over the support.
    pub fn max_total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    /// Largest coefficient degree in scaled units.
    pub fn max_coefficient_degree(&self) -> Option<u128> {
        self.terms.values().filter_map(|c| c.max_degree()).max()
    }

    fn add_into(&mut self, key: (i64, i64), c: TruncSeries) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        let sum = match self.terms.remove(&key) {
            Some(old) => old.add(&c)?,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
        Ok(())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(SkewError::ContextMismatch(format!("{:?} vs {:?}", self.ctx, other.ctx)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_into(*k, c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        SkewPoly2 { ctx: self.ctx, terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut out = Self::zero(self.ctx);
        for (k, v) in self.terms() {
            let v = v.scale(c);
            if !v.is_zero() {
                out.terms.insert(*k, v);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        skew_mul(self, other)
    }

    /// Re-home into a context over the same ring (for instance an untruncated
    /// one with a wider window).
    pub fn with_context(&self, ctx: SkewContext2) -> Result<Self> {
        if (ctx.n_u, ctx.n_v) != (self.ctx.n_u, self.ctx.n_v) {
            return Err(SkewError::ContextMismatch("different twists".into()));
        }
        let mut out = Self::zero(ctx);
        for (&(a, b), c) in self.terms() {
            check_window(a, ctx.window)?;
            check_window(b, ctx.window)?;
            out.add_into((a, b), c.with_context(ctx.series)?)?;
        }
        Ok(out)
    }
}

fn check_window(deg: i64, window: i64) -> Result<()> {
    if deg.abs() > window {
        return Err(SkewError::WindowExceeded { degree: deg, window });
    }
    Ok(())
}

pub fn skew_mul(x: &SkewPoly2, y: &SkewPoly2) -> Result<SkewPoly2> {
    x.check(y)?;
    let ctx = x.ctx;
    let mut out = SkewPoly2::zero(ctx);
    for (&(a, b), c) in x.terms() {
        let sigma = ctx.sigma(a, b);
        for (&(a2, b2), c2) in y.terms() {
            let (na, nb) = (a + a2, b + b2);
            check_window(na, ctx.window)?;
            check_window(nb, ctx.window)?;
            out.add_into((na, nb), c.mul(&apply_endo(&sigma, c2)?)?)?;
        }
    }
    Ok(out)
}

impl fmt::Display for SkewPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(&(a, b), c)| {
                let mut x = String::new();
                for (name, k) in [("D", a), ("E", b)] {
                    match k {
                        0 => {}
                        1 => x.push_str(name),
                        _ => x.push_str(&format!("{name}^{k}")),
                    }
                }
                if x.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{x}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// ---------------------------------------------------------------------------
// One-variable ring R = A[F] over A = F_p[t], sigma(t) = t^p.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SkewContext1 {
    pub series: SeriesContext,
    /// Largest F-degree allowed.
    pub window: u32,
}

impl SkewContext1 {
    pub fn new(series: SeriesContext, window: u32) -> Result<Self> {
        if series.nvars != 1 {
            return Err(SkewError::InvalidParameters(format!("A[F] needs 1 variable, got {}", series.nvars)));
        }
        Ok(SkewContext1 { series, window })
    }

    pub fn sigma(&self, k: u32) -> FrobeniusEndo {
        FrobeniusEndo::new(vec![k as i64])
    }

    pub fn untruncated(&self, window: u32) -> Self {
        SkewContext1 { series: self.series.without_truncation(), window }
    }

    pub fn t_power(&self, scaled_exp: u64) -> SkewPoly1 {
        SkewPoly1::constant(TruncSeries::var_power(self.series, 0, scaled_exp), *self)
    }

    pub fn f(&self) -> SkewPoly1 {
        SkewPoly1::term(TruncSeries::one(self.series), 1, *self).expect("window >= 1")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewPoly1 {
    ctx: SkewContext1,
    terms: BTreeMap<u32, TruncSeries>,
}

impl SkewPoly1 {
    pub fn zero(ctx: SkewContext1) -> Self {
        SkewPoly1 { ctx, terms: BTreeMap::new() }
    }

    pub fn one(ctx: SkewContext1) -> Self {
        Self::constant(TruncSeries::one(ctx.series), ctx)
    }

    pub fn constant(c: TruncSeries, ctx: SkewContext1) -> Self {
        Self::term(c, 0, ctx).expect("degree 0")
    }

    pub fn term(c: TruncSeries, i: u32, ctx: SkewContext1) -> Result<Self> {
        if c.ctx != ctx.series {
            return Err(SkewError::ContextMismatch("coefficient context".into()));
        }
        if i > ctx.window {
            return Err(SkewError::WindowExceeded { degree: i as i64, window: ctx.window as i64 });
        }
        let mut out = Self::zero(ctx);
        if !c.is_zero() {
            out.terms.insert(i, c);
        }
        Ok(out)
    }

    pub fn context(&self) -> SkewContext1 {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u32, &TruncSeries)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, i: u32) -> TruncSeries {
        self.terms.get(&i).cloned().unwrap_or_else(|| TruncSeries::zero(self.ctx.series))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    fn add_into(&mut self, i: u32, c: TruncSeries) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        let sum = match self.terms.remove(&i) {
            Some(old) => old.add(&c)?,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(i, sum);
        }
        Ok(())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(SkewError::ContextMismatch(format!("{:?} vs {:?}", self.ctx, other.ctx)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (&i, c) in other.terms() {
            out.add_into(i, c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        SkewPoly1 { ctx: self.ctx, terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut out = Self::zero(self.ctx);
        for (&i, v) in self.terms() {
            let _ = out.add_into(i, v.scale(c));
        }
        out
    }

    /// (a F^i)(b F^j) = a sigma^i(b) F^(i+j).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.ctx);
        for (&i, a) in self.terms() {
            let sigma = self.ctx.sigma(i);
            for (&j, b) in other.terms() {
                let k = i + j;
                if k > self.ctx.window {
                    return Err(SkewError::WindowExceeded { degree: k as i64, window: self.ctx.window as i64 });
                }
                out.add_into(k, a.mul(&apply_endo(&sigma, b)?)?)?;
            }
        }
        Ok(out)
    }

    pub fn with_context(&self, ctx: SkewContext1) -> Result<Self> {
        let mut out = Self::zero(ctx);
        for (&i, c) in self.terms() {
            if i > ctx.window {
                return Err(SkewError::WindowExceeded { degree: i as i64, window: ctx.window as i64 });
            }
            out.add_into(i, c.with_context(ctx.series)?)?;
        }
        Ok(out)
    }
}

impl fmt::Display for SkewPoly1 {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(&i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*F"),
                _ => format!("({c})*F^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// ---------------------------------------------------------------------------
// Bounded linear algebra over A[D, E].

/// Unknowns allowed in bounded problems: c D^a E^b with a, b >= 0,
/// a + b <= window and deg c < truncation (ordinary units).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub window: i64,
    pub truncation: u64,
}

fn box_bidegrees(window: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for total in 0..=window {
        for a in (0..=total).rev() {
            out.push((a, total - a));
        }
    }
    out
}

fn box_monomials(nvars: usize, limit: u64) -> Vec<FracMonomial> {
    fn rec(nvars: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<FracMonomial>) {
        if cur.len() == nvars {
            out.push(FracMonomial(cur.clone()));
            return;
        }
        for e in 0..left {
            cur.push(e);
            rec(nvars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if limit > 0 {
        rec(nvars, limit, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

type ColumnKey = (usize, (i64, i64), FracMonomial);
type RowKey = ((i64, i64), FracMonomial);

/// The map (lambda_1..lambda_m) -> sum lambda_i g_i restricted to a box,
/// flattened onto monomial coordinates.
struct ModuleMap {
    eval: SkewContext2,
    gens: Vec<SkewPoly2>,
    limit: u64,
    columns: Vec<ColumnKey>,
    column_index: BTreeMap<ColumnKey, usize>,
    rows: BTreeMap<RowKey, usize>,
    system: SparseSystem,
}

impl ModuleMap {
    fn new(gens: &[SkewPoly2], bounds: Bounds) -> Result<Self> {
        let first = gens.first().ok_or_else(|| SkewError::InvalidParameters("no generators".into()))?;
        let ctx = first.ctx;
        if gens.iter().any(|g| g.ctx != ctx) {
            return Err(SkewError::ContextMismatch("generators live in different contexts".into()));
        }
        if bounds.window < 0 {
            return Err(SkewError::InvalidParameters("negative window".into()));
        }
        let reach = gens.iter().flat_map(|g| g.terms.keys()).map(|(a, b)| a.abs().max(b.abs())).max().unwrap_or(0);
        let eval = ctx.untruncated(ctx.window.max(bounds.window + reach + 1));
        let gens: Vec<SkewPoly2> = gens.iter().map(|g| g.with_context(eval)).collect::<Result<_>>()?;
        let limit = bounds.truncation.checked_mul(ctx.series.scale()).ok_or(SkewError::Overflow)?;
        let bidegrees = box_bidegrees(bounds.window);
        let monos = box_monomials(2, limit);
        let total = gens.len() * bidegrees.len() * monos.len();
        if total > MAX_COLUMNS {
            return Err(SkewError::InvalidParameters(format!("bounded problem has {total} unknowns, limit {MAX_COLUMNS}")));
        }
        let mut columns = Vec::with_capacity(total);
        let mut images = Vec::with_capacity(total);
        let mut rows = BTreeMap::new();
        for (slot, g) in gens.iter().enumerate() {
            for &(a, b) in &bidegrees {
                for m in &monos {
                    let lam = SkewPoly2::term(TruncSeries::monomial(eval.series, m.clone(), 1), a, b, eval)?;
                    let img = skew_mul(&lam, g)?;
                    let mut col = Vec::new();
                    for (&k, c) in img.terms() {
                        for (mono, v) in c.terms() {
                            let n = rows.len();
                            let r = *rows.entry((k, mono.clone())).or_insert(n);
                            col.push((r, v));
                        }
                    }
                    columns.push((slot, (a, b), m.clone()));
                    images.push(col);
                }
            }
        }
        let column_index = columns.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let system = SparseSystem::new(ctx.series.p, rows.len(), images);
        Ok(ModuleMap { eval, gens, limit, columns, column_index, rows, system })
    }

    fn to_relation(&self, v: &SparseVec) -> Vec<SkewPoly2> {
        let mut out = vec![SkewPoly2::zero(self.eval); self.gens.len()];
        for &(j, c) in v {
            let (slot, (a, b), m) = &self.columns[j];
            let t = SkewPoly2::term(TruncSeries::monomial(self.eval.series, m.clone(), c as i64), *a, *b, self.eval)
                .expect("box lies inside the window");
            out[*slot] = out[*slot].add(&t).expect("same context");
        }
        out
    }

    /// Coordinates of a relation vector, or None if it leaves the box.
    fn to_columns(&self, rel: &[SkewPoly2]) -> Option<SparseVec> {
        let mut out = Vec::new();
        for (slot, x) in rel.iter().enumerate() {
            for (&k, c) in x.terms() {
                for (m, v) in c.terms() {
                    out.push((*self.column_index.get(&(slot, k, m.clone()))?, v));
                }
            }
        }
        out.sort_unstable();
        Some(out)
    }

    fn apply(&self, rel: &[SkewPoly2]) -> Result<SkewPoly2> {
        combine(&self.gens, rel, self.eval)
    }
}

/// sum rel_i * gens_i, evaluated in `ctx`.
fn combine(gens: &[SkewPoly2], rel: &[SkewPoly2], ctx: SkewContext2) -> Result<SkewPoly2> {
    let mut acc = SkewPoly2::zero(ctx);
    for (l, g) in rel.iter().zip(gens) {
        acc = acc.add(&skew_mul(&l.with_context(ctx)?, &g.with_context(ctx)?)?)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct SyzygyBasis {
    /// Relation vectors, untruncated context.
    pub relations: Vec<Vec<SkewPoly2>>,
    pub unknowns: usize,
    pub blocks: usize,
}

pub fn syzygy_bounded(gens: &[SkewPoly2], bounds: Bounds) -> Result<SyzygyBasis> {
    let map = ModuleMap::new(gens, bounds)?;
    let mut relations = Vec::new();
    for v in map.system.kernel() {
        let rel = map.to_relation(&v);
        if !map.apply(&rel)?.is_zero() {
            return Err(SkewError::VerificationFailed("syzygy does not substitute to zero".into()));
        }
        relations.push(rel);
    }
    Ok(SyzygyBasis { relations, unknowns: map.columns.len(), blocks: map.system.block_count() })
}

#[derive(Debug, Clone)]
pub enum Membership {
    /// elem = sum certificate_i * g_i exactly.
    Member { certificate: Vec<SkewPoly2> },
    NotInIdealAtBound { bounds: Bounds },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

/// Left ideal membership with coefficients restricted to `bounds`.
pub fn ideal_membership_bounded(elem: &SkewPoly2, gens: &[SkewPoly2], bounds: Bounds) -> Result<Membership> {
    let map = ModuleMap::new(gens, bounds)?;
    let target = elem.with_context(map.eval)?;
    let mut rhs = Vec::new();
    for (&k, c) in target.terms() {
        for (m, v) in c.terms() {
            match map.rows.get(&(k, m.clone())) {
                Some(&r) => rhs.push((r, v)),
                None => return Ok(Membership::NotInIdealAtBound { bounds }),
            }
        }
    }
    let Some(x) = map.system.solve(&rhs) else {
        return Ok(Membership::NotInIdealAtBound { bounds });
    };
    let certificate = map.to_relation(&x);
    if map.apply(&certificate)? != target {
        return Err(SkewError::VerificationFailed("membership certificate does not reproduce the element".into()));
    }
    Ok(Membership::Member { certificate })
}

// ---------------------------------------------------------------------------
// The relation module of (s, t, D - E).

/// s, t and D - E, the generators whose relations are studied.
pub fn augmentation_generators(ctx: &SkewContext2) -> Result<[SkewPoly2; 3]> {
    Ok([ctx.s(), ctx.t(), ctx.d().sub(&ctx.e())?])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelationFamily {
    S1,
    S2,
    S3,
}

/// A relation lambda*s + mu*t + nu*(D - E) = 0, stored as (lambda, mu, nu).
#[derive(Debug, Clone)]
pub struct SRelation {
    pub family: RelationFamily,
    pub m: Option<u32>,
    pub components: [SkewPoly2; 3],
}

impl SRelation {
    pub fn label(&self) -> String {
        match self.m {
            Some(m) => format!("{:?}[m={m}]", self.family),
            None => format!("{:?}", self.family),
        }
    }
}

/// The three relation families, in an untruncated context with the given window.
/// With `corrupt_first`, S1 uses s^q in place of s^(q-1) (a negative control).
pub fn build_s_generators(ctx: &SkewContext2, m_max: u32, corrupt_first: bool) -> Result<Vec<SRelation>> {
    let needed = (m_max as i64).max(1) + 1;
    let ctx = ctx.untruncated(ctx.window.max(needed));
    let p = ctx.series.p;
    let scale = ctx.series.scale();
    let q_u = p.checked_pow(ctx.n_u).ok_or(SkewError::Overflow)?;
    let q_v = p.checked_pow(ctx.n_v).ok_or(SkewError::Overflow)?;
    let s_pow = |k: u64| TruncSeries::var_power(ctx.series, 0, k * scale);
    let t_pow = |k: u64| TruncSeries::var_power(ctx.series, 1, k * scale);
    let zero = SkewPoly2::zero(ctx);
    let mut out = Vec::new();

    // D - s^(q-1) E, with nu = -s^q.
    let b_u = if corrupt_first { s_pow(q_u) } else { s_pow(q_u - 1) };
    let lambda = ctx.d().sub(&SkewPoly2::term(b_u, 0, 1, ctx)?)?;
    out.push(SRelation {
        family: RelationFamily::S1,
        m: None,
        components: [lambda, zero.clone(), SkewPoly2::constant(s_pow(q_u), ctx).neg()],
    });

    let mu = ctx.e().sub(&SkewPoly2::term(t_pow(q_v - 1), 1, 0, ctx)?)?;
    out.push(SRelation {
        family: RelationFamily::S2,
        m: None,
        components: [zero.clone(), mu, SkewPoly2::constant(t_pow(q_v), ctx)],
    });

    let st = s_pow(1).mul(&t_pow(1))?;
    for m in 0..=m_max as i64 {
        let lambda = SkewPoly2::term(t_pow(1), 0, m, ctx)?;
        let mu = SkewPoly2::term(s_pow(1), m, 0, ctx)?.neg();
        let mut nu = zero.clone();
        for k in 0..m {
            nu = nu.add(&SkewPoly2::term(st.clone(), k, m - 1 - k, ctx)?)?;
        }
        out.push(SRelation { family: RelationFamily::S3, m: Some(m as u32), components: [lambda, mu, nu] });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkewParams {
    pub p: u64,
    pub n_u: u32,
    pub n_v: u32,
    pub truncation: u64,
    pub precision: u32,
    pub window: i64,
    pub m_max: u32,
    /// Kernel vectors count toward completeness only when a + b <= window - margin.
    pub margin: i64,
    pub corrupt_s1: bool,
    /// Leave one family out of the spanning set (completeness should then fail).
    pub omit_family: Option<RelationFamily>,
}

impl Default for SkewParams {
    fn default() -> Self {
        SkewParams {
            p: 2,
            n_u: 1,
            n_v: 1,
            truncation: 8,
            precision: 0,
            window: 4,
            m_max: 3,
            margin: 1,
            corrupt_s1: false,
            omit_family: None,
        }
    }
}

impl SkewParams {
    pub fn context(&self) -> Result<SkewContext2> {
        let series = SeriesContext::new(self.p, 2, self.precision, self.truncation)?;
        SkewContext2::new(series, self.n_u, self.n_v, self.window.max(1))
    }

    pub fn bounds(&self) -> Bounds {
        Bounds { window: self.window, truncation: self.truncation }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SoundnessEntry {
    pub label: String,
    pub relation: [String; 3],
    /// lambda*s + mu*t + nu*(D - E) = 0 exactly.
    pub exact_relation: bool,
    /// lambda*s + mu*t lies in A[D, E](D - E), by bounded membership.
    pub in_relation_module: bool,
    pub inside_box: bool,
    /// Only decided when the element fits the box.
    pub in_bounded_kernel: Option<bool>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletenessException {
    pub bidegree: i64,
    pub coefficient_degree: String,
    pub vector: [String; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub params: SkewParams,
    pub unknowns: usize,
    pub blocks: usize,
    pub kernel_dim: usize,
    pub s_multiples_in_box: usize,
    pub inner_kernel_vectors: usize,
    pub soundness: Vec<SoundnessEntry>,
    pub exceptions: Vec<CompletenessException>,
    pub soundness_pass: bool,
    pub completeness_pass: bool,
    pub pass: bool,
}

fn poly_strings(v: &[SkewPoly2]) -> [String; 3] {
    [0, 1, 2].map(|i| v.get(i).map(|x| x.to_string()).unwrap_or_default())
}

fn scaled_to_string(e: u128, scale: u64) -> String {
    let g = e.gcd(&(scale as u128));
    if g == scale as u128 {
        (e / g).to_string()
    } else {
        format!("{}/{}", e / g, scale as u128 / g)
    }
}

/// Soundness and bound-relative completeness of S1, S2, S3 as generators of
/// the relations among (s, t, D - E).
pub fn verify_relations(params: &SkewParams) -> Result<RelationReport> {
    if params.n_u == 0 || params.n_v == 0 {
        return Err(SkewError::InvalidParameters("n_u and n_v must be positive".into()));
    }
    let ctx = params.context()?;
    let gens = augmentation_generators(&ctx)?;
    let map = ModuleMap::new(&gens, params.bounds())?;
    let kernel = map.system.kernel();
    for v in &kernel {
        if !map.apply(&map.to_relation(v))?.is_zero() {
            return Err(SkewError::VerificationFailed("syzygy does not substitute to zero".into()));
        }
    }
    let ncols = map.columns.len();
    let s_elems = build_s_generators(&ctx, params.m_max, params.corrupt_s1)?;

    let mut soundness = Vec::new();
    for rel in &s_elems {
        let comps = &rel.components;
        let exact_relation = map.apply(comps)?.is_zero();
        let partial = combine(&gens[..2], &comps[..2], map.eval)?;
        let in_relation_module = if partial.is_zero() {
            true
        } else {
            let window = partial.max_total_degree().unwrap_or(0).max(1);
            let top = partial.max_coefficient_degree().unwrap_or(0);
            let truncation = (top / ctx.series.scale() as u128 + 1) as u64;
            let dme = map.eval.d().sub(&map.eval.e())?;
            ideal_membership_bounded(&partial, &[dme], Bounds { window, truncation })?.is_member()
        };
        let cols = map.to_columns(comps);
        let in_bounded_kernel = cols.map(|c| sparse_span_contains(ctx.series.p, ncols, &kernel, &[c])[0]);
        soundness.push(SoundnessEntry {
            label: rel.label(),
            relation: poly_strings(comps),
            exact_relation,
            in_relation_module,
            inside_box: in_bounded_kernel.is_some(),
            in_bounded_kernel,
            passed: exact_relation && in_relation_module && in_bounded_kernel.unwrap_or(true),
        });
    }

    // Left multiples c D^a E^b * S that stay inside the box.
    let mut multiples = Vec::new();
    let monos = box_monomials(2, map.limit);
    for rel in s_elems.iter().filter(|r| Some(r.family) != params.omit_family) {
        let comps: Vec<SkewPoly2> =
            rel.components.iter().map(|c| c.with_context(map.eval)).collect::<Result<_>>()?;
        let base = comps.iter().filter_map(|c| c.max_total_degree()).max().unwrap_or(0);
        for (a, b) in box_bidegrees(params.window - base) {
            for m in &monos {
                let lam = SkewPoly2::term(TruncSeries::monomial(map.eval.series, m.clone(), 1), a, b, map.eval)?;
                let prod: Vec<SkewPoly2> = comps.iter().map(|c| skew_mul(&lam, c)).collect::<Result<_>>()?;
                if let Some(v) = map.to_columns(&prod) {
                    if !v.is_empty() {
                        multiples.push(v);
                    }
                }
            }
        }
    }

    let inner_window = params.window - params.margin;
    let inner_limit = (map.limit - map.limit / 4) as u128;
    let inner: Vec<&SparseVec> = kernel
        .iter()
        .filter(|v| {
            v.iter().all(|&(j, _)| {
                let (_, (a, b), m) = &map.columns[j];
                a + b <= inner_window && m.degree() < inner_limit
            })
        })
        .collect();
    let targets: Vec<SparseVec> = inner.iter().map(|v| (*v).clone()).collect();
    let found = sparse_span_contains(ctx.series.p, ncols, &multiples, &targets);
    let mut exceptions = Vec::new();
    for (v, ok) in targets.iter().zip(found) {
        if !ok {
            let bideg = v.iter().map(|&(j, _)| map.columns[j].1 .0 + map.columns[j].1 .1).max().unwrap_or(0);
            let deg = v.iter().map(|&(j, _)| map.columns[j].2.degree()).max().unwrap_or(0);
            exceptions.push(CompletenessException {
                bidegree: bideg,
                coefficient_degree: scaled_to_string(deg, ctx.series.scale()),
                vector: poly_strings(&map.to_relation(v)),
            });
        }
    }
    let soundness_pass = soundness.iter().all(|e| e.passed);
    let completeness_pass = exceptions.is_empty();
    Ok(RelationReport {
        params: params.clone(),
        unknowns: ncols,
        blocks: map.system.block_count(),
        kernel_dim: kernel.len(),
        s_multiples_in_box: multiples.len(),
        inner_kernel_vectors: targets.len(),
        soundness,
        exceptions,
        soundness_pass,
        completeness_pass,
        pass: soundness_pass && completeness_pass,
    })
}

// ---------------------------------------------------------------------------
// Monomial obstruction and the strictly increasing chain.

/// A pair (a, b), a + b >= 1, |a|, |b| <= window, such that `mono` is divisible
/// by s^(p^(a n_u)) t^(p^(b n_v)); exponents compared in scaled units.
pub fn obstruction_witness(
    mono: &FracMonomial,
    ctx: &SeriesContext,
    n_u: u32,
    n_v: u32,
    window: i64,
) -> Result<Option<(i64, i64)>> {
    shift_search(mono, ctx, n_u, n_v, window, 2 * window)
}

/// Shifts are tried by increasing a + b, then by increasing |a| (a >= 0 first).
fn shift_search(
    mono: &FracMonomial,
    ctx: &SeriesContext,
    n_u: u32,
    n_v: u32,
    window: i64,
    max_total: i64,
) -> Result<Option<(i64, i64)>> {
    if ctx.nvars != 2 || mono.0.len() != 2 {
        return Err(SkewError::InvalidParameters("obstruction needs a monomial in s, t".into()));
    }
    if window < 1 {
        return Err(SkewError::InvalidParameters("window must be at least 1".into()));
    }
    let r = ctx.precision as i64;
    let deepest = window * n_u.max(n_v) as i64;
    if r < deepest {
        return Err(SkewError::PrecisionUnderflow { exponent: 1, precision: ctx.precision, shift: -deepest });
    }
    let threshold = |k: i64, n: u32| BigUint::from(ctx.p).pow((k * n as i64 + r) as u32);
    let (es, et) = (BigUint::from(mono.0[0]), BigUint::from(mono.0[1]));
    let order: Vec<i64> = (0..=window).flat_map(|k| if k == 0 { vec![0] } else { vec![k, -k] }).collect();
    for total in 1..=max_total.min(2 * window) {
        for &a in &order {
            let b = total - a;
            if b.abs() > window {
                continue;
            }
            if es >= threshold(a, n_u) && et >= threshold(b, n_v) {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

pub fn monomial_obstruction(mono: &FracMonomial, ctx: &SeriesContext, n_u: u32, n_v: u32, window: i64) -> Result<bool> {
    Ok(obstruction_witness(mono, ctx, n_u, n_v, window)?.is_some())
}

/// Context for s*t at the precision the obstruction needs.
pub fn obstruction_context(p: u64, n_u: u32, n_v: u32, window: i64) -> Result<SeriesContext> {
    let r = u32::try_from(window.max(0) * n_u.max(n_v) as i64).map_err(|_| SkewError::Overflow)?;
    SeriesContext::untruncated(p, 2, r)
}

pub fn st_monomial(ctx: &SeriesContext) -> FracMonomial {
    FracMonomial(vec![ctx.scale(), ctx.scale()])
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainStep {
    pub step: u32,
    /// Shifts a + b searched at this step.
    pub shift_range: (i64, i64),
    pub obstructed: bool,
    pub witness: Option<(i64, i64)>,
    pub strict: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NotFgReport {
    pub p: u64,
    pub n_u: u32,
    pub n_v: u32,
    pub window: i64,
    pub precision: u32,
    pub steps: Vec<ChainStep>,
    pub strict_steps: usize,
    pub all_strict: bool,
}

/// Step k asks whether s t z_(k+1) is reachable from s t z_m, m <= k, i.e.
/// whether s t is divisible by some s^(p^(a n_u)) t^(p^(b n_v)) with
/// 1 <= a + b <= k + 1. Strict means it is not.
pub fn not_fg_demonstration(p: u64, n_u: u32, n_v: u32, n_max: u32, window: i64) -> Result<NotFgReport> {
    let ctx = obstruction_context(p, n_u, n_v, window)?;
    let st = st_monomial(&ctx);
    let mut steps = Vec::new();
    for step in 1..=n_max {
        let hi = step as i64 + 1;
        let witness = shift_search(&st, &ctx, n_u, n_v, window, hi)?;
        steps.push(ChainStep {
            step,
            shift_range: (1, hi),
            obstructed: witness.is_some(),
            witness,
            strict: witness.is_none(),
        });
    }
    let strict_steps = steps.iter().filter(|s| s.strict).count();
    Ok(NotFgReport {
        p,
        n_u,
        n_v,
        window,
        precision: ctx.precision,
        all_strict: strict_steps == steps.len(),
        strict_steps,
        steps,
    })
}

// ---------------------------------------------------------------------------
// One-variable machinery.

#[derive(Debug, Clone, Serialize)]
pub struct FreeDecompositionReport {
    pub p: u64,
    pub precision: u32,
    pub truncation: u64,
    pub monomials: usize,
    /// Number of monomials t^(i + p q) for each residue i < p (scaled units).
    pub per_residue: Vec<usize>,
    pub reconstructed: bool,
    pub bijective: bool,
    pub examples: Vec<String>,
    pub pass: bool,
}

/// Checks A = sum_{i < p} t^i sigma(A) monomial by monomial below the truncation.
pub fn one_var_free_decomposition(p: u64, precision: u32, truncation: u64) -> Result<FreeDecompositionReport> {
    let series = SeriesContext::new(p, 1, precision, truncation)?;
    let sigma = FrobeniusEndo::new(vec![1]);
    let limit = series.limit();
    let scale = series.scale();
    let mut seen = BTreeSet::new();
    let mut per_residue = vec![0usize; p as usize];
    let mut reconstructed = true;
    let mut examples = Vec::new();
    for e in 0..limit {
        let (i, q) = (e % p, e / p);
        let lhs = TruncSeries::var_power(series, 0, e);
        let rhs = TruncSeries::var_power(series, 0, i).mul(&apply_endo(&sigma, &TruncSeries::var_power(series, 0, q))?)?;
        reconstructed &= lhs == rhs;
        seen.insert((i, q));
        per_residue[i as usize] += 1;
        if examples.len() < 6 && e % scale == 0 {
            examples.push(format!(
                "{} = {} * sigma({})",
                fmt_monomial(&series, &FracMonomial(vec![e])),
                fmt_monomial(&series, &FracMonomial(vec![i])),
                fmt_monomial(&series, &FracMonomial(vec![q]))
            ));
        }
    }
    // Onto the product basis {(i, q) : i + p q < limit} and injective.
    let expected: Vec<usize> = (0..p).map(|i| if i < limit { ((limit - i + p - 1) / p) as usize } else { 0 }).collect();
    let bijective = seen.len() == limit as usize && per_residue == expected;
    Ok(FreeDecompositionReport {
        p,
        precision,
        truncation,
        monomials: limit as usize,
        per_residue,
        reconstructed,
        bijective,
        examples,
        pass: reconstructed && bijective,
    })
}

type Coord = (usize, u32, FracMonomial);

/// Shared coordinates for vectors in R^n.
struct Flattener {
    ctx: SkewContext1,
    index: BTreeMap<Coord, usize>,
    keys: Vec<Coord>,
}

impl Flattener {
    fn new(ctx: SkewContext1) -> Self {
        Flattener { ctx, index: BTreeMap::new(), keys: Vec::new() }
    }

    fn flatten(&mut self, v: &[SkewPoly1]) -> SparseVec {
        let mut out = Vec::new();
        for (comp, x) in v.iter().enumerate() {
            for (&j, c) in x.terms() {
                for (m, val) in c.terms() {
                    let key = (comp, j, m.clone());
                    let n = self.keys.len();
                    let id = *self.index.entry(key.clone()).or_insert_with(|| n);
                    if id == n {
                        self.keys.push(key);
                    }
                    out.push((id, val));
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn unflatten(&self, v: &SparseVec, n: usize) -> Vec<SkewPoly1> {
        let mut out = vec![SkewPoly1::zero(self.ctx); n];
        for &(id, c) in v {
            let (comp, j, m) = &self.keys[id];
            let t = SkewPoly1::term(TruncSeries::monomial(self.ctx.series, m.clone(), c as i64), *j, self.ctx)
                .expect("inside window");
            out[*comp] = out[*comp].add(&t).expect("same context");
        }
        out
    }

    fn fdeg(&self, id: usize) -> u32 {
        self.keys[id].1
    }
}

fn sparse_combination(p: u64, vectors: &[SparseVec], coeffs: &SparseVec) -> SparseVec {
    let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
    for &(j, c) in coeffs {
        for &(i, v) in &vectors[j] {
            let e = acc.entry(i).or_insert(0);
            *e = (*e + c * v) % p;
        }
    }
    acc.into_iter().filter(|&(_, v)| v != 0).collect()
}

/// Basis of span(vectors) intersected with F-degree <= k.
fn filtered_part(flat: &Flattener, p: u64, vectors: &[SparseVec], k: i64) -> Vec<SparseVec> {
    let mut high = BTreeMap::new();
    let mut columns = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut col = Vec::new();
        for &(i, c) in v {
            if flat.fdeg(i) as i64 > k {
                let n = high.len();
                col.push((*high.entry(i).or_insert(n), c));
            }
        }
        columns.push(col);
    }
    let sys = SparseSystem::new(p, high.len(), columns);
    let combos: Vec<SparseVec> =
        sys.kernel().iter().map(|c| sparse_combination(p, vectors, c)).filter(|v| !v.is_empty()).collect();
    independent_subset(p, flat.keys.len(), &combos)
}

fn independent_subset(p: u64, dim: usize, vectors: &[SparseVec]) -> Vec<SparseVec> {
    let mut basis = SubspaceBasis::new(p, dim);
    let mut out = Vec::new();
    for v in vectors {
        if basis.insert(&densify(v, dim)) {
            out.push(v.clone());
        }
    }
    out
}

fn densify(v: &SparseVec, dim: usize) -> Vec<u64> {
    let mut d = vec![0; dim];
    for &(i, c) in v {
        d[i] = c;
    }
    d
}

fn span_rank(p: u64, dim: usize, vectors: &[SparseVec]) -> usize {
    independent_subset(p, dim, vectors).len()
}

fn check_module_generators(gens: &[Vec<SkewPoly1>]) -> Result<(usize, SkewContext1)> {
    let Some(first) = gens.first() else {
        return Err(SkewError::InvalidParameters("no generators".into()));
    };
    let n = first.len();
    let ctx = first.first().map(|x| x.ctx).ok_or_else(|| SkewError::InvalidParameters("rank 0".into()))?;
    if gens.iter().any(|g| g.len() != n || g.iter().any(|x| x.ctx != ctx)) {
        return Err(SkewError::ContextMismatch("module generators disagree on rank or context".into()));
    }
    Ok((n, ctx))
}

/// t^e F^i * v for a vector v.
fn left_mul(v: &[SkewPoly1], e: u64, i: u32, ctx: SkewContext1) -> Result<Vec<SkewPoly1>> {
    let lam = SkewPoly1::term(TruncSeries::var_power(ctx.series, 0, e), i, ctx)?;
    v.iter().map(|x| lam.mul(&x.with_context(ctx)?)).collect()
}

fn max_fdeg(gens: &[Vec<SkewPoly1>]) -> u32 {
    gens.iter().flatten().filter_map(|x| x.degree()).max().unwrap_or(0)
}

#[derive(Debug, Clone, Serialize)]
pub struct FiltrationLevel {
    pub k: u32,
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiltrationReport {
    pub p: u64,
    pub truncation: u64,
    pub k_max: u32,
    pub generators: Vec<Vec<String>>,
    pub levels: Vec<FiltrationLevel>,
    pub pass: bool,
}

/// Compares (JM)^{<=k} with A F M^{<=k-1} for k <= k_max, where J = R F.
///
/// With multipliers t^q (q < Q) on the M side and t^e (e < pQ) on the JM
/// side, every t^e F = t^i F t^q with i < p, so both sides are built from the
/// same finite pieces and compared exactly.
pub fn filtration_identity_check(gens: &[Vec<SkewPoly1>], k_max: u32) -> Result<FiltrationReport> {
    let (n, ctx) = check_module_generators(gens)?;
    let limit = ctx
        .series
        .truncation()
        .ok_or_else(|| SkewError::InvalidParameters("filtration check needs a truncated context".into()))?
        * ctx.series.scale();
    let p = ctx.series.p;
    let q_bound = limit.div_ceil(p);
    let eval = ctx.untruncated(k_max + max_fdeg(gens) + 1);
    let gens: Vec<Vec<SkewPoly1>> =
        gens.iter().map(|g| g.iter().map(|x| x.with_context(eval)).collect::<Result<_>>()).collect::<Result<_>>()?;
    let mut flat = Flattener::new(eval);

    let mut jm = Vec::new();
    for g in &gens {
        for i in 1..=k_max {
            for e in 0..p * q_bound {
                jm.push(flat.flatten(&left_mul(g, e, i, eval)?));
            }
        }
    }
    let mut m_side = Vec::new();
    for g in &gens {
        for i in 0..k_max {
            for q in 0..q_bound {
                m_side.push(flat.flatten(&left_mul(g, q, i, eval)?));
            }
        }
    }

    let mut levels = Vec::new();
    for k in 0..=k_max {
        let lhs = filtered_part(&flat, p, &jm, k as i64);
        let lower = filtered_part(&flat, p, &m_side, k as i64 - 1);
        let mut rhs = Vec::new();
        for w in &lower {
            let w = flat.unflatten(w, n);
            for r in 0..p {
                rhs.push(flat.flatten(&left_mul(&w, r, 1, eval)?));
            }
        }
        let dim = flat.keys.len();
        let lhs_dim = span_rank(p, dim, &lhs);
        let rhs_dim = span_rank(p, dim, &rhs);
        let both: Vec<SparseVec> = lhs.iter().chain(&rhs).cloned().collect();
        let equal = lhs_dim == rhs_dim && span_rank(p, dim, &both) == lhs_dim;
        levels.push(FiltrationLevel { k, lhs_dim, rhs_dim, equal });
    }
    Ok(FiltrationReport {
        p,
        truncation: limit / ctx.series.scale(),
        k_max,
        generators: gens.iter().map(|g| g.iter().map(|x| x.to_string()).collect()).collect(),
        pass: levels.iter().all(|l| l.equal),
        levels,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MjmReport {
    pub bound: u32,
    /// Smallest d found, or bound + 1.
    pub d: u32,
    /// (d, whether M^{<=bound} lies in the span of R M^{<=d}).
    pub checks: Vec<(u32, bool)>,
}

/// Smallest d <= bound with M^{<=k} inside (R M^{<=d})^{<=k} for all k <= bound.
/// Since M^{<=k} grows with k, checking k = bound suffices.
pub fn mjm_degree_detect(gens: &[Vec<SkewPoly1>], bound: u32) -> Result<MjmReport> {
    let (n, ctx) = check_module_generators(gens)?;
    let limit = ctx
        .series
        .truncation()
        .ok_or_else(|| SkewError::InvalidParameters("degree detection needs a truncated context".into()))?
        * ctx.series.scale();
    let p = ctx.series.p;
    let eval = ctx.untruncated(2 * bound + max_fdeg(gens) + 1);
    let gens: Vec<Vec<SkewPoly1>> =
        gens.iter().map(|g| g.iter().map(|x| x.with_context(eval)).collect::<Result<_>>()).collect::<Result<_>>()?;
    let mut flat = Flattener::new(eval);
    let mut m_span = Vec::new();
    for g in &gens {
        for i in 0..=bound {
            for e in 0..limit {
                m_span.push(flat.flatten(&left_mul(g, e, i, eval)?));
            }
        }
    }
    let top = filtered_part(&flat, p, &m_span, bound as i64);
    let mut checks = Vec::new();
    for d in 0..=bound {
        let low = filtered_part(&flat, p, &m_span, d as i64);
        let mut generated = Vec::new();
        for b in &low {
            let b = flat.unflatten(b, n);
            for i in 0..=bound {
                for e in 0..limit {
                    generated.push(flat.flatten(&left_mul(&b, e, i, eval)?));
                }
            }
        }
        let dim = flat.keys.len();
        let ok = sparse_span_contains(p, dim, &generated, &top).into_iter().all(|x| x);
        checks.push((d, ok));
        if ok {
            return Ok(MjmReport { bound, d, checks });
        }
    }
    Ok(MjmReport { bound, d: bound + 1, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx2(p: u64, n_u: u32, n_v: u32, trunc: u64) -> SkewContext2 {
        SkewContext2::new(SeriesContext::new(p, 2, 0, trunc).unwrap(), n_u, n_v, 6).unwrap()
    }

    fn ctx1(p: u64, trunc: u64) -> SkewContext1 {
        SkewContext1::new(SeriesContext::new(p, 1, 0, trunc).unwrap(), 8).unwrap()
    }

    #[test]
    fn series_examples() {
        let c = SeriesContext::new(3, 2, 0, 8).unwrap();
        let s = TruncSeries::var(c, 0, 1);
        assert_eq!(TruncSeries::one(c).mul(&s).unwrap(), s);
        let one_plus_s = TruncSeries::one(c).add(&s).unwrap();
        let cube = one_plus_s.mul(&one_plus_s).unwrap().mul(&one_plus_s).unwrap();
        assert_eq!(cube, TruncSeries::one(c).add(&TruncSeries::var(c, 0, 3)).unwrap());
        assert!(TruncSeries::var(c, 0, 7).mul(&s).unwrap().is_zero());
        let other = SeriesContext::new(3, 2, 0, 9).unwrap();
        assert!(matches!(s.mul(&TruncSeries::var(other, 0, 1)), Err(SkewError::ContextMismatch(_))));
    }

    #[test]
    fn endo_examples() {
        let c = SeriesContext::new(3, 2, 1, 8).unwrap();
        let s = TruncSeries::var(c, 0, 1);
        let t = TruncSeries::var(c, 1, 1);
        let sd = FrobeniusEndo::new(vec![1, 0]);
        assert_eq!(apply_endo(&sd, &s).unwrap(), TruncSeries::var(c, 0, 3));
        assert_eq!(apply_endo(&FrobeniusEndo::new(vec![0, 1]), &s).unwrap(), s);
        assert_eq!(apply_endo(&sd, &TruncSeries::one(c)).unwrap(), TruncSeries::one(c));
        // s^(1/3) -> s^(1/9) leaves the grid at precision 1.
        let inv2 = FrobeniusEndo::new(vec![-2, 0]);
        assert!(matches!(apply_endo(&inv2, &s), Err(SkewError::PrecisionUnderflow { .. })));
        assert_eq!(apply_endo(&FrobeniusEndo::new(vec![0, -1]), &t).unwrap(), TruncSeries::var_power(c, 1, 1));
    }

    #[test]
    fn skew_mul_examples() {
        let c = ctx2(3, 1, 1, 8);
        assert_eq!(c.d().mul(&c.s()).unwrap(), SkewPoly2::term(TruncSeries::var(c.series, 0, 3), 1, 0, c).unwrap());
        assert_eq!(c.e().mul(&c.t()).unwrap(), SkewPoly2::term(TruncSeries::var(c.series, 1, 3), 0, 1, c).unwrap());
        let dme = c.d().sub(&c.e()).unwrap();
        assert_eq!(dme.mul(&SkewPoly2::one(c)).unwrap(), dme);
        let narrow = SkewContext2 { window: 1, ..c };
        assert!(matches!(narrow.d().mul(&narrow.d()), Err(SkewError::WindowExceeded { .. })));
    }

    #[test]
    fn membership_examples() {
        let c = ctx2(3, 1, 1, 8);
        let dme = c.d().sub(&c.e()).unwrap();
        let s3 = SkewPoly2::constant(TruncSeries::var(c.series, 0, 3), c);
        let elem = c.d().mul(&c.s()).unwrap().sub(&s3.mul(&c.e()).unwrap()).unwrap();
        let b = Bounds { window: 2, truncation: 8 };
        match ideal_membership_bounded(&elem, &[dme.clone()], b).unwrap() {
            Membership::Member { certificate } => {
                assert_eq!(certificate[0].with_context(c).unwrap(), s3)
            }
            other => panic!("{other:?}"),
        }
        let one = SkewPoly2::one(c);
        assert!(!ideal_membership_bounded(&one, &[c.s(), c.t()], b).unwrap().is_member());
        let d3 = c.d().mul(&c.d()).unwrap().mul(&c.d()).unwrap();
        let e3 = c.e().mul(&c.e()).unwrap().mul(&c.e()).unwrap();
        assert!(ideal_membership_bounded(&d3.sub(&e3).unwrap(), &[dme], Bounds { window: 3, truncation: 2 })
            .unwrap()
            .is_member());
    }

    #[test]
    fn syzygy_examples() {
        let c = ctx2(2, 1, 1, 8);
        let b = Bounds { window: 1, truncation: 3 };
        let koszul = syzygy_bounded(&[c.s(), c.t()], b).unwrap();
        let want = [c.t(), c.s().neg()];
        let eval = koszul.relations[0][0].context();
        let want: Vec<SkewPoly2> = want.iter().map(|x| x.with_context(eval).unwrap()).collect();
        let map = ModuleMap::new(&[c.s(), c.t()], b).unwrap();
        let vecs: Vec<SparseVec> = koszul.relations.iter().map(|r| map.to_columns(r).unwrap()).collect();
        assert!(sparse_span_contains(2, map.columns.len(), &vecs, &[map.to_columns(&want).unwrap()])[0]);

        let dme = c.d().sub(&c.e()).unwrap();
        assert!(syzygy_bounded(&[dme], Bounds { window: 3, truncation: 4 }).unwrap().relations.is_empty());

        let twice = syzygy_bounded(&[c.s(), c.s()], Bounds { window: 0, truncation: 1 }).unwrap();
        assert_eq!(twice.relations.len(), 1);
        let r = &twice.relations[0];
        assert_eq!(r[0].add(&r[1]).unwrap(), SkewPoly2::zero(r[0].context()));
    }

    #[test]
    fn s_generators_shapes() {
        let c = ctx2(3, 1, 1, 8);
        let s = build_s_generators(&c, 0, false).unwrap();
        assert_eq!(s[0].components[0].to_string(), "(2*s^2)*E + (1)*D");
        assert_eq!(s[2].components[0].to_string(), "(t)");
        assert_eq!(s[2].components[1].to_string(), "(2*s)");
        let c2 = ctx2(2, 1, 1, 8);
        let s2 = build_s_generators(&c2, 0, false).unwrap();
        assert_eq!(s2[1].components[1].to_string(), "(1)*E + (t)*D");
    }

    #[test]
    fn relation_suite_small() {
        let rep = verify_relations(&SkewParams::default()).unwrap();
        assert!(rep.pass, "{:#?}", rep.exceptions);
        assert!(rep.soundness.iter().all(|e| e.inside_box));
        let narrow = verify_relations(&SkewParams { window: 2, m_max: 0, ..Default::default() }).unwrap();
        assert!(narrow.soundness[0].passed);
        let bad = verify_relations(&SkewParams { p: 3, corrupt_s1: true, ..Default::default() }).unwrap();
        assert!(!bad.soundness_pass);
        assert!(!bad.soundness[0].exact_relation && !bad.soundness[0].in_relation_module);
        for fam in [RelationFamily::S1, RelationFamily::S2, RelationFamily::S3] {
            let r = verify_relations(&SkewParams { omit_family: Some(fam), ..Default::default() }).unwrap();
            assert!(r.soundness_pass && !r.completeness_pass, "{fam:?}");
        }
    }

    #[test]
    fn obstruction_examples() {
        for (nu, nv) in [(1, 1), (2, 3)] {
            let c = obstruction_context(2, nu, nv, 8).unwrap();
            assert!(!monomial_obstruction(&st_monomial(&c), &c, nu, nv, 8).unwrap());
        }
        let c = obstruction_context(3, 1, 1, 4).unwrap();
        let sp_tp = FracMonomial(vec![3 * c.scale(), 3 * c.scale()]);
        assert!(monomial_obstruction(&sp_tp, &c, 1, 1, 4).unwrap());
        let c0 = obstruction_context(2, 0, 1, 3).unwrap();
        assert_eq!(obstruction_witness(&st_monomial(&c0), &c0, 0, 1, 3).unwrap(), Some((1, 0)));
        let coarse = SeriesContext::untruncated(2, 2, 0).unwrap();
        assert!(matches!(
            monomial_obstruction(&st_monomial(&coarse), &coarse, 1, 1, 2),
            Err(SkewError::PrecisionUnderflow { .. })
        ));
    }

    #[test]
    fn chain_examples() {
        let r = not_fg_demonstration(2, 1, 1, 6, 8).unwrap();
        assert!(r.all_strict);
        assert_eq!(r.strict_steps, 6);
        assert!(not_fg_demonstration(3, 2, 1, 4, 6).unwrap().all_strict);
        let control = not_fg_demonstration(2, 0, 1, 3, 4).unwrap();
        assert_eq!(control.strict_steps, 0);
    }

    #[test]
    fn free_decomposition_examples() {
        let r = one_var_free_decomposition(2, 0, 8).unwrap();
        assert!(r.pass);
        assert_eq!(r.per_residue, vec![4, 4]);
        assert!(r.examples.iter().any(|x| x == "1 = 1 * sigma(1)"));
        let series = SeriesContext::new(2, 1, 0, 8).unwrap();
        let sigma = FrobeniusEndo::new(vec![1]);
        let t5 = TruncSeries::var(series, 0, 5);
        let rebuilt = TruncSeries::var(series, 0, 1).mul(&apply_endo(&sigma, &TruncSeries::var(series, 0, 2)).unwrap());
        assert_eq!(rebuilt.unwrap(), t5);
        assert!(one_var_free_decomposition(3, 0, 9).unwrap().pass);
        assert!(one_var_free_decomposition(3, 1, 4).unwrap().pass);
    }

    fn vec1(c: SkewContext1, parts: &[&[(u64, u32)]]) -> Vec<SkewPoly1> {
        parts
            .iter()
            .map(|terms| {
                let mut x = SkewPoly1::zero(c);
                for &(e, i) in *terms {
                    x = x.add(&SkewPoly1::term(TruncSeries::var(c.series, 0, e), i, c).unwrap()).unwrap();
                }
                x
            })
            .collect()
    }

    #[test]
    fn twist_law() {
        let c = ctx1(3, 20);
        let a = vec1(c, &[&[(1, 0), (2, 0)]])[0].clone();
        let f2 = c.f().mul(&c.f()).unwrap();
        let lhs = f2.mul(&a).unwrap();
        let twisted = SkewPoly1::constant(apply_endo(&c.sigma(2), &a.coefficient(0)).unwrap(), c);
        assert_eq!(lhs, twisted.mul(&f2).unwrap());
    }

    #[test]
    fn filtration_examples() {
        let c = ctx1(2, 8);
        let whole = filtration_identity_check(&[vec1(c, &[&[(0, 0)]])], 3).unwrap();
        assert!(whole.pass, "{:?}", whole.levels);
        let zero = filtration_identity_check(&[vec![SkewPoly1::zero(c)]], 3).unwrap();
        assert!(zero.pass && zero.levels.iter().all(|l| l.lhs_dim == 0));
        let pair = filtration_identity_check(&[vec1(c, &[&[(1, 0)], &[(0, 1)]])], 4).unwrap();
        assert!(pair.pass, "{:?}", pair.levels);
        assert!(pair.levels[4].lhs_dim > 0);
    }

    #[test]
    fn mjm_examples() {
        let c = ctx1(2, 8);
        assert_eq!(mjm_degree_detect(&[vec1(c, &[&[(1, 0)]])], 4).unwrap().d, 0);
        assert_eq!(mjm_degree_detect(&[vec1(c, &[&[(1, 2)]])], 4).unwrap().d, 2);
        assert_eq!(mjm_degree_detect(&[vec1(c, &[&[(1, 0)]]), vec1(c, &[&[(0, 1)]])], 4).unwrap().d, 1);
    }
}
