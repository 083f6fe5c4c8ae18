//! Dense linear algebra over a prime field F_p.
//!
//! Elimination always takes the first nonzero entry of the leftmost usable
//! column as pivot, so ranks, kernels and solutions come out in a fixed order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),
}

/// Largest modulus accepted; keeps products of two residues inside u64.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_modulus(p: u64) -> Result<(), LinalgError> {
    if p >= MAX_MODULUS || !is_prime(p) {
        return Err(LinalgError::NotPrime(p));
    }
    Ok(())
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "zero has no inverse mod {p}");
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Reduce a signed integer into [0, p).
pub fn reduce(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

/// Element of F_p carrying its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u64,
    p: u64,
}

impl FpScalar {
    pub fn new(value: i64, p: u64) -> Self {
        FpScalar { value: reduce(value, p), p }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(FpScalar { value: inv_mod(self.value, self.p), p: self.p })
        }
    }

    fn same(self, other: Self) -> u64 {
        assert_eq!(self.p, other.p, "F_p scalars with different moduli");
        self.p
    }
}

impl Add for FpScalar {
    type Output = FpScalar;
    fn add(self, o: Self) -> Self {
        let p = self.same(o);
        FpScalar { value: (self.value + o.value) % p, p }
    }
}

impl Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, o: Self) -> Self {
        let p = self.same(o);
        FpScalar { value: (self.value + p - o.value) % p, p }
    }
}

impl Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, o: Self) -> Self {
        let p = self.same(o);
        FpScalar { value: self.value * o.value % p, p }
    }
}

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> Self {
        FpScalar { value: (self.p - self.value) % self.p, p: self.p }
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    /// Build from signed rows; every row must have the same length.
    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {i} has length {} but row 0 has {cols}",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|&v| reduce(v, p)));
        }
        Ok(FpMatrix { p, rows: rows.len(), cols, data })
    }

    /// Build from rows already reduced into [0, p).
    pub fn from_reduced_rows(p: u64, cols: usize, rows: Vec<Vec<u64>>) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r);
        }
        FpMatrix { p, rows: n, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(p: u64, nrows: usize, columns: &[Vec<u64>]) -> Self {
        let mut m = Self::zero(p, nrows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for (i, &v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v % p;
            }
        }
        m
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn scalar(&self, i: usize, j: usize) -> FpScalar {
        FpScalar { value: self.get(i, j), p: self.p }
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn matmul(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        if self.p != other.p {
            return Err(LinalgError::ModulusMismatch(self.p, other.p));
        }
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.p;
        let mut out = Self::zero(p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o = (*o + a * b) % p;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let p = self.p;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a * (b % p)) % p)
            })
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.p;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(src) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if src != r {
                for j in 0..cols {
                    self.data.swap(src * cols + j, r * cols + j);
                }
            }
            let inv = inv_mod(self.get(r, c), p);
            for j in c..cols {
                let v = self.data[r * cols + j];
                self.data[r * cols + j] = v * inv % p;
            }
            let pivot_row: Vec<u64> = self.row(r)[c..].to_vec();
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f == 0 {
                    continue;
                }
                let row = &mut self.data[i * cols + c..(i + 1) * cols];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, one vector per free column in
    /// increasing column order; each has a 1 at its free column.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let (r, pivots) = self.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; self.cols];
            v[free] = 1 % p;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - r.get(i, free)) % p;
            }
            basis.push(v);
        }
        basis
    }

    /// Some x with self·x = rhs, or None. Free variables are set to zero,
    /// which is the lexicographically first pivot solution.
    pub fn solve(&self, rhs: &[u64]) -> Result<Option<Vec<u64>>, LinalgError> {
        if rhs.len() != self.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "right-hand side of length {} against {} rows",
                rhs.len(),
                self.rows
            )));
        }
        let p = self.p;
        let mut aug = Self::zero(p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            aug.data[i * (self.cols + 1)..i * (self.cols + 1) + self.cols]
                .copy_from_slice(self.row(i));
            aug.data[i * (self.cols + 1) + self.cols] = rhs[i] % p;
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0u64; self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(i, self.cols);
        }
        debug_assert_eq!(self.mul_vec(&x)?, rhs.iter().map(|v| v % p).collect::<Vec<_>>());
        Ok(Some(x))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zero(self.p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.get(i, j);
            }
            aug.data[i * 2 * n + n + i] = 1 % self.p;
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zero(self.p, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.data[i * n + j] = aug.get(i, n + j);
            }
        }
        Some(inv)
    }
}

/// Incrementally maintained row-reduced basis of a subspace of F_p^n.
///
/// Rows are kept fully reduced against each other, so membership tests are a
/// single pass over the pivots.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    p: u64,
    dim: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn new(p: u64, dim: usize) -> Self {
        SubspaceBasis { p, dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// Residue of `v` after subtracting its components along the pivots.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut w: Vec<u64> = v.iter().map(|x| x % p).collect();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = w[c];
            if f != 0 {
                for (x, &y) in w.iter_mut().zip(row) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Add `v`; returns true when the rank grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.dim);
        let p = self.p;
        let mut w = self.reduce(v);
        let Some(c) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(w[c], p);
        for x in w.iter_mut() {
            *x = *x * inv % p;
        }
        for row in self.rows.iter_mut() {
            let f = row[c];
            if f != 0 {
                for (x, &y) in row.iter_mut().zip(&w) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < c);
        self.pivots.insert(at, c);
        self.rows.insert(at, w);
        true
    }
}

/// Sparse vector over F_p: (index, nonzero value) pairs.
pub type SparseVec = Vec<(usize, u64)>;

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// A linear map F_p^cols -> F_p^rows given by its sparse columns, split
/// into connected blocks (columns linked through shared rows).
#[derive(Debug, Clone)]
pub struct SparseSystem {
    p: u64,
    nrows: usize,
    columns: Vec<SparseVec>,
    // Each block: (rows, columns), both sorted.
    blocks: Vec<(Vec<usize>, Vec<usize>)>,
    row_block: Vec<Option<usize>>,
}

impl SparseSystem {
    pub fn new(p: u64, nrows: usize, columns: Vec<SparseVec>) -> Self {
        let nc = columns.len();
        let mut uf = UnionFind::new(nc + nrows);
        for (j, col) in columns.iter().enumerate() {
            for &(i, _) in col {
                assert!(i < nrows, "row index {i} out of range");
                uf.union(j, nc + i);
            }
        }
        let mut root_block = std::collections::BTreeMap::new();
        let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for j in 0..nc {
            let r = uf.find(j);
            let b = *root_block.entry(r).or_insert_with(|| {
                blocks.push((Vec::new(), Vec::new()));
                blocks.len() - 1
            });
            blocks[b].1.push(j);
        }
        let mut row_block = vec![None; nrows];
        for i in 0..nrows {
            if let Some(&b) = root_block.get(&uf.find(nc + i)) {
                blocks[b].0.push(i);
                row_block[i] = Some(b);
            }
        }
        SparseSystem { p, nrows, columns, blocks, row_block }
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn row_count(&self) -> usize {
        self.nrows
    }

    fn dense_block(&self, b: usize) -> FpMatrix {
        let (rows, cols) = &self.blocks[b];
        let mut m = FpMatrix::zero(self.p, rows.len(), cols.len());
        for (jl, &j) in cols.iter().enumerate() {
            for &(i, v) in &self.columns[j] {
                let il = rows.binary_search(&i).expect("row in its block");
                m.set(il, jl, (m.get(il, jl) + v) % self.p);
            }
        }
        m
    }

    /// Kernel basis, block by block, as sparse vectors over column indices.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let mut out = Vec::new();
        for b in 0..self.blocks.len() {
            let cols = &self.blocks[b].1;
            for v in self.dense_block(b).kernel_basis() {
                out.push(
                    v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(jl, &x)| (cols[jl], x)).collect(),
                );
            }
        }
        out
    }

    /// Some preimage of `rhs` (sparse over rows), or None if there is none.
    pub fn solve(&self, rhs: &[(usize, u64)]) -> Option<SparseVec> {
        let mut per_block: std::collections::BTreeMap<usize, Vec<(usize, u64)>> = Default::default();
        for &(i, v) in rhs {
            if v % self.p == 0 {
                continue;
            }
            let b = self.row_block.get(i).copied().flatten()?;
            per_block.entry(b).or_default().push((i, v % self.p));
        }
        let mut out = Vec::new();
        for (b, entries) in per_block {
            let (rows, cols) = &self.blocks[b];
            let mut target = vec![0u64; rows.len()];
            for (i, v) in entries {
                let il = rows.binary_search(&i).expect("row in its block");
                target[il] = (target[il] + v) % self.p;
            }
            let x = self.dense_block(b).solve(&target).expect("sizes agree")?;
            out.extend(x.iter().enumerate().filter(|(_, &v)| v != 0).map(|(jl, &v)| (cols[jl], v)));
        }
        out.sort_unstable();
        Some(out)
    }
}

/// For each target, whether it lies in the span of `spanning` inside F_p^dim.
/// Works per connected block of coordinates.
pub fn sparse_span_contains(p: u64, dim: usize, spanning: &[SparseVec], targets: &[SparseVec]) -> Vec<bool> {
    let mut uf = UnionFind::new(dim);
    for v in spanning {
        for w in v.windows(2) {
            uf.union(w[0].0, w[1].0);
        }
    }
    let mut touched = vec![false; dim];
    for v in spanning {
        for &(i, _) in v {
            touched[i] = true;
        }
    }
    // Local coordinates inside each block.
    let mut block_of_root = std::collections::BTreeMap::new();
    let mut block_coords: Vec<Vec<usize>> = Vec::new();
    let mut local = vec![(usize::MAX, usize::MAX); dim];
    for i in 0..dim {
        if !touched[i] {
            continue;
        }
        let r = uf.find(i);
        let b = *block_of_root.entry(r).or_insert_with(|| {
            block_coords.push(Vec::new());
            block_coords.len() - 1
        });
        local[i] = (b, block_coords[b].len());
        block_coords[b].push(i);
    }
    let mut bases: Vec<SubspaceBasis> = block_coords.iter().map(|c| SubspaceBasis::new(p, c.len())).collect();
    for v in spanning {
        let Some(&(i0, _)) = v.first() else { continue };
        let b = local[i0].0;
        let mut dense = vec![0u64; block_coords[b].len()];
        for &(i, x) in v {
            dense[local[i].1] = (dense[local[i].1] + x) % p;
        }
        bases[b].insert(&dense);
    }
    targets
        .iter()
        .map(|t| {
            let mut parts: std::collections::BTreeMap<usize, Vec<u64>> = Default::default();
            for &(i, x) in t {
                if x % p == 0 {
                    continue;
                }
                if i >= dim || !touched[i] {
                    return false;
                }
                let (b, l) = local[i];
                let d = parts.entry(b).or_insert_with(|| vec![0; block_coords[b].len()]);
                d[l] = (d[l] + x) % p;
            }
            parts.iter().all(|(&b, d)| bases[b].contains(d))
        })
        .collect()
}
