//! Small finite groups with dense multiplication tables, their group algebras
//! over F_p, and modules given by matrices: induction, restriction,
//! conjugation, double cosets and the Mackey decomposition.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fp_linalg::{check_modulus, FpMatrix, LinalgError, SubspaceBasis};

pub const MAX_ORDER: usize = 4096;
/// Associativity is checked on every triple up to this order.
pub const FULL_ASSOCIATIVITY_ORDER: usize = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group order exceeds the budget of {MAX_ORDER} (reached {0})")]
    BudgetExceeded(usize),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("unknown subgroup name {0:?}")]
    UnknownSubgroup(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("group axioms fail: {0}")]
    NotAGroup(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

type Result<T> = std::result::Result<T, GroupError>;

/// Elements are indexed 0..n in increasing order of their encodings.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    name: String,
    elements: Vec<Vec<u64>>,
    table: Vec<u32>,
    inverse: Vec<usize>,
    identity: usize,
    generators: Vec<usize>,
}

impl FiniteGroup {
    /// Closes the generators under `mul` and tabulates the result.
    pub fn from_generators<F>(name: &str, identity: Vec<u64>, generators: &[Vec<u64>], mul: F) -> Result<Self>
    where
        F: Fn(&[u64], &[u64]) -> Vec<u64>,
    {
        let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
        let mut queue = VecDeque::new();
        seen.insert(identity.clone(), ());
        queue.push_back(identity.clone());
        while let Some(u) = queue.pop_front() {
            for g in generators {
                let v = mul(g, &u);
                if !seen.contains_key(&v) {
                    if seen.len() >= MAX_ORDER {
                        return Err(GroupError::BudgetExceeded(seen.len() + 1));
                    }
                    seen.insert(v.clone(), ());
                    queue.push_back(v);
                }
            }
        }
        let mut elements: Vec<Vec<u64>> = seen.into_keys().collect();
        elements.sort();
        let index: HashMap<&[u64], usize> = elements.iter().enumerate().map(|(i, e)| (e.as_slice(), i)).collect();
        let n = elements.len();
        let mut table = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let prod = mul(&elements[i], &elements[j]);
                let k = *index
                    .get(prod.as_slice())
                    .ok_or_else(|| GroupError::NotAGroup("product leaves the closure".into()))?;
                table[i * n + j] = k as u32;
            }
        }
        let id = index[identity.as_slice()];
        let mut inverse = vec![usize::MAX; n];
        for i in 0..n {
            if table[i * n + id] as usize != i || table[id * n + i] as usize != i {
                return Err(GroupError::NotAGroup("identity is not two-sided".into()));
            }
            inverse[i] = (0..n)
                .find(|&j| table[i * n + j] as usize == id)
                .ok_or_else(|| GroupError::NotAGroup(format!("element {i} has no inverse")))?;
        }
        let gens = generators.iter().map(|g| index[g.as_slice()]).collect();
        let group = FiniteGroup { name: name.to_string(), elements, table, inverse, identity: id, generators: gens };
        group.check_associativity()?;
        Ok(group)
    }

    /// Upper unitriangular 3x3 matrices over Z/p^a, encoded as (x, y, z) for
    /// [[1, x, z], [0, 1, y], [0, 0, 1]].
    pub fn unitriangular(p: u64, a: u32) -> Result<Self> {
        check_modulus(p)?;
        let q = p.checked_pow(a).filter(|q| q.checked_pow(3).is_some()).ok_or(GroupError::BudgetExceeded(usize::MAX))?;
        let order = q * q * q;
        if order > MAX_ORDER as u64 {
            return Err(GroupError::BudgetExceeded(order as usize));
        }
        let mul = move |u: &[u64], v: &[u64]| vec![(u[0] + v[0]) % q, (u[1] + v[1]) % q, (u[2] + v[2] + u[0] * v[1]) % q];
        let name = if a == 1 { format!("U3(F_{p})") } else { format!("U3(Z/{q})") };
        Self::from_generators(&name, vec![0, 0, 0], &[vec![1, 0, 0], vec![0, 1, 0]], mul)
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.order();
        let sample: Vec<usize> = if n <= FULL_ASSOCIATIVITY_ORDER {
            (0..n).collect()
        } else {
            // Generators against a spread of elements.
            let step = (n / 64).max(1);
            self.generators.iter().copied().chain((0..n).step_by(step)).collect()
        };
        for &a in &sample {
            for &b in &sample {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(GroupError::NotAGroup(format!("({a} {b}) {c} != {a} ({b} {c})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn encoding(&self, g: usize) -> &[u64] {
        &self.elements[g]
    }

    pub fn element(&self, code: &[u64]) -> Option<usize> {
        self.elements.binary_search_by(|e| e.as_slice().cmp(code)).ok()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// g h g^-1.
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    /// Named subgroups of the unitriangular groups.
    pub fn named_subgroup(&self, name: &str) -> Result<Subgroup> {
        let code = |c: [u64; 3]| self.element(&c).ok_or_else(|| GroupError::UnknownSubgroup(name.to_string()));
        let gens = match name {
            "trivial" => vec![],
            "whole" => self.generators.clone(),
            "center" => vec![code([0, 0, 1])?],
            "row" => vec![code([1, 0, 0])?, code([0, 0, 1])?],
            "column" => vec![code([0, 1, 0])?, code([0, 0, 1])?],
            "x" => vec![code([1, 0, 0])?],
            "y" => vec![code([0, 1, 0])?],
            "diagonal-free" => vec![code([1, 1, 0])?],
            _ => return Err(GroupError::UnknownSubgroup(name.to_string())),
        };
        Ok(Subgroup::generated(self, &gens))
    }
}

pub const SUBGROUP_NAMES: [&str; 8] = ["trivial", "whole", "center", "row", "column", "x", "y", "diagonal-free"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    elements: Vec<usize>,
    member: Vec<bool>,
    generators: Vec<usize>,
}

impl Subgroup {
    pub fn generated(g: &FiniteGroup, gens: &[usize]) -> Self {
        let mut member = vec![false; g.order()];
        member[g.identity()] = true;
        let mut queue = VecDeque::from([g.identity()]);
        while let Some(u) = queue.pop_front() {
            for &s in gens {
                let v = g.mul(s, u);
                if !member[v] {
                    member[v] = true;
                    queue.push_back(v);
                }
            }
        }
        let elements = (0..g.order()).filter(|&i| member[i]).collect();
        Subgroup { elements, member, generators: gens.to_vec() }
    }

    /// From an element set; checked for closure, with a greedy generating set.
    pub fn from_elements(g: &FiniteGroup, elems: &[usize]) -> Result<Self> {
        let mut member = vec![false; g.order()];
        for &e in elems {
            member[e] = true;
        }
        if !member[g.identity()] {
            return Err(GroupError::NotASubgroup("identity missing".into()));
        }
        for &a in elems {
            for &b in elems {
                if !member[g.mul(a, b)] {
                    return Err(GroupError::NotASubgroup(format!("{a} * {b} leaves the set")));
                }
            }
        }
        let mut gens = Vec::new();
        let mut current = Subgroup::generated(g, &gens);
        for i in 0..g.order() {
            if member[i] && !current.member[i] {
                gens.push(i);
                current = Subgroup::generated(g, &gens);
            }
        }
        Ok(current)
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Self::generated(g, g.generators())
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.member[x]
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn intersect(&self, g: &FiniteGroup, other: &Subgroup) -> Subgroup {
        let common: Vec<usize> = self.elements.iter().copied().filter(|&x| other.contains(x)).collect();
        Subgroup::from_elements(g, &common).expect("intersection of subgroups")
    }

    /// g H g^-1, generated by the conjugated generators.
    pub fn conjugate(&self, g: &FiniteGroup, by: usize) -> Subgroup {
        let gens: Vec<usize> = self.generators.iter().map(|&h| g.conj(by, h)).collect();
        Subgroup::generated(g, &gens)
    }

    pub fn is_normal(&self, g: &FiniteGroup) -> bool {
        (0..g.order()).all(|x| self.elements.iter().all(|&h| self.contains(g.conj(x, h))))
    }
}

/// Left cosets x K; representatives are the least element of each coset.
#[derive(Debug, Clone)]
pub struct LeftCosets {
    pub reps: Vec<usize>,
    coset_of: Vec<usize>,
}

impl LeftCosets {
    pub fn new(g: &FiniteGroup, ambient: &Subgroup, k: &Subgroup) -> Self {
        let mut coset_of = vec![usize::MAX; g.order()];
        let mut reps = Vec::new();
        for &x in ambient.elements() {
            if coset_of[x] != usize::MAX {
                continue;
            }
            for &y in k.elements() {
                coset_of[g.mul(x, y)] = reps.len();
            }
            reps.push(x);
        }
        LeftCosets { reps, coset_of }
    }

    /// u = reps[i] * x with x in K; returns (i, x).
    pub fn split(&self, g: &FiniteGroup, u: usize) -> (usize, usize) {
        let i = self.coset_of[u];
        (i, g.mul(g.inv(self.reps[i]), u))
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// H g K orbits, each represented by its least element.
pub fn double_cosets(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Vec<usize> {
    let mut seen = vec![false; g.order()];
    let mut reps = Vec::new();
    for x in 0..g.order() {
        if seen[x] {
            continue;
        }
        reps.push(x);
        for &a in h.elements() {
            let ax = g.mul(a, x);
            for &b in k.elements() {
                seen[g.mul(ax, b)] = true;
            }
        }
    }
    reps
}

/// A representation of a subgroup on F_p^dim, tabulated on every element.
#[derive(Debug, Clone)]
pub struct FinModule {
    p: u64,
    dim: usize,
    subgroup: Subgroup,
    action: Vec<Option<FpMatrix>>,
}

impl FinModule {
    /// Extend generator matrices to the whole subgroup and check that the
    /// result is a homomorphism.
    pub fn from_generator_action(g: &FiniteGroup, sub: &Subgroup, p: u64, dim: usize, mats: &[FpMatrix]) -> Result<Self> {
        check_modulus(p)?;
        if mats.len() != sub.generators().len() {
            return Err(GroupError::InvalidModule(format!(
                "{} matrices for {} generators",
                mats.len(),
                sub.generators().len()
            )));
        }
        for m in mats {
            if m.rows() != dim || m.cols() != dim || m.modulus() != p {
                return Err(GroupError::InvalidModule("matrix shape or modulus".into()));
            }
            if !m.is_invertible() {
                return Err(GroupError::InvalidModule("generator acts non-invertibly".into()));
            }
        }
        let mut action: Vec<Option<FpMatrix>> = vec![None; g.order()];
        action[g.identity()] = Some(FpMatrix::identity(p, dim));
        let mut queue = VecDeque::from([g.identity()]);
        while let Some(u) = queue.pop_front() {
            for (&s, m) in sub.generators().iter().zip(mats) {
                let v = g.mul(s, u);
                if action[v].is_none() {
                    action[v] = Some(m.matmul(action[u].as_ref().unwrap())?);
                    queue.push_back(v);
                }
            }
        }
        for &u in sub.elements() {
            let ru = action[u].as_ref().unwrap();
            for (&s, m) in sub.generators().iter().zip(mats) {
                if action[g.mul(s, u)].as_ref().unwrap() != &m.matmul(ru)? {
                    return Err(GroupError::InvalidModule(format!(
                        "generator {s} times element {u} breaks the homomorphism property"
                    )));
                }
            }
        }
        Ok(FinModule { p, dim, subgroup: sub.clone(), action })
    }

    pub fn trivial(g: &FiniteGroup, sub: &Subgroup, p: u64, dim: usize) -> Result<Self> {
        let mats = vec![FpMatrix::identity(p, dim); sub.generators().len()];
        Self::from_generator_action(g, sub, p, dim, &mats)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn act(&self, x: usize) -> &FpMatrix {
        self.action[x].as_ref().expect("element of the acting subgroup")
    }

    pub fn generator_matrices(&self) -> Vec<FpMatrix> {
        self.subgroup.generators().iter().map(|&s| self.act(s).clone()).collect()
    }
}

/// Ind from M's subgroup up to `target`, with the left cosets used for the basis
/// g_i (x) e_j (index i * dim + j).
pub fn induce_with_cosets(g: &FiniteGroup, m: &FinModule, target: &Subgroup) -> Result<(FinModule, LeftCosets)> {
    if !m.subgroup.is_subgroup_of(target) {
        return Err(GroupError::NotASubgroup("inducing from a non-subgroup".into()));
    }
    let cosets = LeftCosets::new(g, target, &m.subgroup);
    let (n, d) = (cosets.len(), m.dim);
    let mut mats = Vec::new();
    for &s in target.generators() {
        let mut mat = FpMatrix::zero(m.p, n * d, n * d);
        for (i, &gi) in cosets.reps.iter().enumerate() {
            let (k, x) = cosets.split(g, g.mul(s, gi));
            let rho = m.act(x);
            for r in 0..d {
                for c in 0..d {
                    mat.set(k * d + r, i * d + c, rho.get(r, c));
                }
            }
        }
        mats.push(mat);
    }
    let module = FinModule::from_generator_action(g, target, m.p, n * d, &mats)?;
    Ok((module, cosets))
}

pub fn induce(g: &FiniteGroup, m: &FinModule, target: &Subgroup) -> Result<FinModule> {
    Ok(induce_with_cosets(g, m, target)?.0)
}

pub fn restrict(g: &FiniteGroup, m: &FinModule, h: &Subgroup) -> Result<FinModule> {
    if !h.is_subgroup_of(&m.subgroup) {
        return Err(GroupError::NotASubgroup("restricting to a non-subgroup".into()));
    }
    let mats: Vec<FpMatrix> = h.generators().iter().map(|&s| m.act(s).clone()).collect();
    FinModule::from_generator_action(g, h, m.p, m.dim, &mats)
}

/// The module over x K x^-1 on which x k x^-1 acts as k does on M.
pub fn conjugate_module(g: &FiniteGroup, m: &FinModule, x: usize) -> Result<FinModule> {
    let sub = m.subgroup.conjugate(g, x);
    FinModule::from_generator_action(g, &sub, m.p, m.dim, &m.generator_matrices())
}

/// Basis of Hom(K, F_p) as values on K's generators, from the consistency
/// equations phi(s u) = phi(s) + phi(u).
pub fn additive_characters(g: &FiniteGroup, k: &Subgroup, p: u64) -> Vec<Vec<u64>> {
    let ng = k.generators().len();
    let mut coeffs: Vec<Option<Vec<u64>>> = vec![None; g.order()];
    coeffs[g.identity()] = Some(vec![0; ng]);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(u) = queue.pop_front() {
        for (i, &s) in k.generators().iter().enumerate() {
            let v = g.mul(s, u);
            if coeffs[v].is_none() {
                let mut c = coeffs[u].clone().unwrap();
                c[i] = (c[i] + 1) % p;
                coeffs[v] = Some(c);
                queue.push_back(v);
            }
        }
    }
    let mut rows = Vec::new();
    for &u in k.elements() {
        for (i, &s) in k.generators().iter().enumerate() {
            let cv = coeffs[g.mul(s, u)].as_ref().unwrap();
            let cu = coeffs[u].as_ref().unwrap();
            let row: Vec<i64> =
                (0..ng).map(|j| cv[j] as i64 - cu[j] as i64 - if i == j { 1 } else { 0 }).collect();
            rows.push(row);
        }
    }
    if rows.is_empty() || ng == 0 {
        return (0..ng).map(|i| (0..ng).map(|j| (i == j) as u64).collect()).collect();
    }
    FpMatrix::from_rows(p, &rows).expect("rectangular").kernel_basis()
}

/// A 2-dimensional module P [[1, phi(u)], [0, 1]] P^-1 with phi a random
/// additive character and P a random invertible matrix.
pub fn random_two_dim_module(g: &FiniteGroup, k: &Subgroup, p: u64, rng: &mut ChaCha8Rng) -> Result<FinModule> {
    let basis = additive_characters(g, k, p);
    let ng = k.generators().len();
    let mut phi = vec![0u64; ng];
    for b in &basis {
        let c = rng.gen_range(0..p);
        for (x, &y) in phi.iter_mut().zip(b) {
            *x = (*x + c * y) % p;
        }
    }
    let pm = loop {
        let m = FpMatrix::from_rows(p, &[
            vec![rng.gen_range(0..p) as i64, rng.gen_range(0..p) as i64],
            vec![rng.gen_range(0..p) as i64, rng.gen_range(0..p) as i64],
        ])?;
        if m.is_invertible() {
            break m;
        }
    };
    let pinv = pm.inverse().expect("invertible");
    let mats: Vec<FpMatrix> = phi
        .iter()
        .map(|&v| {
            let unip = FpMatrix::from_rows(p, &[vec![1, v as i64], vec![0, 1]]).unwrap();
            pm.matmul(&unip).unwrap().matmul(&pinv).unwrap()
        })
        .collect();
    FinModule::from_generator_action(g, k, p, 2, &mats)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn block_diagonal(p: u64, blocks: &[FpMatrix]) -> FpMatrix {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = FpMatrix::zero(p, n, n);
    let mut off = 0;
    for b in blocks {
        for r in 0..b.rows() {
            for c in 0..b.cols() {
                out.set(off + r, off + c, b.get(r, c));
            }
        }
        off += b.rows();
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct MackeyTerm {
    pub representative: Vec<u64>,
    /// [H : H cap g G1 g^-1].
    pub index: usize,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MackeyReport {
    pub group: String,
    pub group_order: usize,
    pub h_order: usize,
    pub g1_order: usize,
    pub module_dim: usize,
    pub terms: Vec<MackeyTerm>,
    pub left_dim: usize,
    pub right_dim: usize,
    pub dims_match: bool,
    pub psi_equivariant: bool,
    pub psi_bijective: bool,
    pub scope: &'static str,
    pub pass: bool,
}

/// Res_H Ind_G1^G M against the sum over H\G/G1 of Ind_{H cap gG1g^-1}^H of the
/// conjugated module, with the comparison map written out as a matrix.
pub fn mackey_check(g: &FiniteGroup, h: &Subgroup, m: &FinModule) -> Result<MackeyReport> {
    let p = m.p;
    let d = m.dim;
    let g1 = m.subgroup.clone();
    let whole = Subgroup::whole(g);
    let (ind, big_cosets) = induce_with_cosets(g, m, &whole)?;
    let left = restrict(g, &ind, h)?;
    let reps = double_cosets(g, h, &g1);

    let mut right_blocks: Vec<FinModule> = Vec::new();
    let mut psi_cols: Vec<Vec<u64>> = Vec::new();
    let mut terms = Vec::new();
    for &x in &reps {
        let conj = conjugate_module(g, m, x)?;
        let k = h.intersect(g, conj.subgroup());
        let w = restrict(g, &conj, &k)?;
        let (ind_h, small_cosets) = induce_with_cosets(g, &w, h)?;
        for &hi in &small_cosets.reps {
            let (kk, y) = big_cosets.split(g, g.mul(hi, x));
            let rho = m.act(y);
            for j in 0..d {
                let mut col = vec![0u64; left.dim];
                for r in 0..d {
                    col[kk * d + r] = rho.get(r, j);
                }
                psi_cols.push(col);
            }
        }
        terms.push(MackeyTerm { representative: g.encoding(x).to_vec(), index: small_cosets.len(), dim: ind_h.dim });
        right_blocks.push(ind_h);
    }
    let right_dim: usize = right_blocks.iter().map(|b| b.dim).sum();
    let psi = FpMatrix::from_columns(p, left.dim, &psi_cols);
    let mut equivariant = psi.cols() == right_dim;
    if equivariant {
        for &s in h.generators() {
            let blocks: Vec<FpMatrix> = right_blocks.iter().map(|b| b.act(s).clone()).collect();
            let rs = block_diagonal(p, &blocks);
            if psi.matmul(&rs)? != left.act(s).matmul(&psi)? {
                equivariant = false;
                break;
            }
        }
    }
    let dims_match = left.dim == right_dim && left.dim == (g.order() / g1.order()) * d;
    let bijective = psi.rows() == psi.cols() && psi.is_invertible();
    Ok(MackeyReport {
        group: g.name().to_string(),
        group_order: g.order(),
        h_order: h.order(),
        g1_order: g1.order(),
        module_dim: d,
        terms,
        left_dim: left.dim,
        right_dim,
        dims_match,
        psi_equivariant: equivariant,
        psi_bijective: bijective,
        scope: "finite skeleton",
        pass: dims_match && equivariant && bijective,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CosetRepReport {
    pub representatives: Vec<Vec<u64>>,
    pub index: usize,
    pub distinct_cosets: usize,
    pub pass: bool,
}

/// Z = { a g : g a double coset rep, a over (H cap gG1g^-1)\gG1g^-1 } must be
/// a transversal of the right cosets H\G.
pub fn coset_rep_check(g: &FiniteGroup, h: &Subgroup, g1: &Subgroup) -> Result<CosetRepReport> {
    let mut z = Vec::new();
    for x in double_cosets(g, h, g1) {
        let c = g1.conjugate(g, x);
        let k = h.intersect(g, &c);
        // Right cosets K a inside C, least element of each.
        let mut seen = vec![false; g.order()];
        for &a in c.elements() {
            if seen[a] {
                continue;
            }
            for &y in k.elements() {
                seen[g.mul(y, a)] = true;
            }
            z.push(g.mul(a, x));
        }
    }
    let mut coset_ids = BTreeMap::new();
    for &u in &z {
        let least = h.elements().iter().map(|&y| g.mul(y, u)).min().unwrap();
        *coset_ids.entry(least).or_insert(0usize) += 1;
    }
    let index = g.order() / h.order();
    let distinct = coset_ids.len();
    Ok(CosetRepReport {
        representatives: z.iter().map(|&u| g.encoding(u).to_vec()).collect(),
        index,
        distinct_cosets: distinct,
        pass: z.len() == index && distinct == index,
    })
}

/// Dense element of F_p[G].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinGroupAlgebraElement {
    pub p: u64,
    pub coeffs: Vec<u64>,
}

impl FinGroupAlgebraElement {
    pub fn zero(g: &FiniteGroup, p: u64) -> Self {
        FinGroupAlgebraElement { p, coeffs: vec![0; g.order()] }
    }

    pub fn basis(g: &FiniteGroup, p: u64, x: usize) -> Self {
        let mut e = Self::zero(g, p);
        e.coeffs[x] = 1 % p;
        e
    }

    pub fn one(g: &FiniteGroup, p: u64) -> Self {
        Self::basis(g, p, g.identity())
    }

    pub fn add(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| (a + b) % self.p).collect();
        FinGroupAlgebraElement { p: self.p, coeffs }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| (a + self.p - b) % self.p).collect();
        FinGroupAlgebraElement { p: self.p, coeffs }
    }

    pub fn mul(&self, g: &FiniteGroup, o: &Self) -> Self {
        let mut out = Self::zero(g, self.p);
        for (a, &ca) in self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0) {
            for (b, &cb) in o.coeffs.iter().enumerate().filter(|(_, &c)| c != 0) {
                let k = g.mul(a, b);
                out.coeffs[k] = (out.coeffs[k] + ca * cb) % self.p;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorReport {
    pub p: u64,
    pub a: u32,
    pub group_order: usize,
    /// x y x^-1 y^-1 = z for x = 1+E12, y = 1+E23, z = 1+E13.
    pub group_commutator: bool,
    /// st - ts = (1+s)(1+t)w with s = x-1, t = y-1, w = z-1.
    pub s_first_form: bool,
    /// st - ts = (1+t)(1+s)w.
    pub t_first_form: bool,
    /// w s = s w.
    pub w_central: bool,
}

pub fn commutator_identity_check(p: u64, a: u32) -> Result<CommutatorReport> {
    let g = FiniteGroup::unitriangular(p, a)?;
    let code = |c: [u64; 3]| g.element(&c).expect("unitriangular generator");
    let (x, y, z) = (code([1, 0, 0]), code([0, 1, 0]), code([0, 0, 1]));
    let one = FinGroupAlgebraElement::one(&g, p);
    let s = FinGroupAlgebraElement::basis(&g, p, x).sub(&one);
    let t = FinGroupAlgebraElement::basis(&g, p, y).sub(&one);
    let w = FinGroupAlgebraElement::basis(&g, p, z).sub(&one);
    let lhs = s.mul(&g, &t).sub(&t.mul(&g, &s));
    let s_first = one.add(&s).mul(&g, &one.add(&t)).mul(&g, &w);
    let reordered = one.add(&t).mul(&g, &one.add(&s)).mul(&g, &w);
    let comm = g.mul(g.mul(x, y), g.mul(g.inv(x), g.inv(y)));
    Ok(CommutatorReport {
        p,
        a,
        group_order: g.order(),
        group_commutator: comm == z,
        s_first_form: lhs == s_first,
        t_first_form: lhs == reordered,
        w_central: w.mul(&g, &s) == s.mul(&g, &w),
    })
}

/// F_p-basis of the left ideal of F_p[G] generated by { h - 1 : h in H }.
pub fn augmentation_basis(g: &FiniteGroup, h: &Subgroup, p: u64) -> Vec<Vec<u64>> {
    let n = g.order();
    let mut basis = SubspaceBasis::new(p, n);
    let mut out = Vec::new();
    for x in 0..n {
        for &y in h.elements() {
            if y == g.identity() {
                continue;
            }
            // x (y - 1) = xy - x
            let mut v = vec![0u64; n];
            v[g.mul(x, y)] = 1;
            v[x] = (v[x] + p - 1) % p;
            if basis.insert(&v) {
                out.push(v);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitivityReport {
    pub direct_dim: usize,
    pub staged_dim: usize,
    pub equivariant: bool,
    pub bijective: bool,
    pub pass: bool,
}

/// Ind_G1^G M against Ind_Hm^G Ind_G1^Hm M for G1 <= Hm <= G, with the map
/// g_i (x) (h_j (x) e) -> (g_i h_j) (x) e.
pub fn induction_transitivity_check(g: &FiniteGroup, mid: &Subgroup, m: &FinModule) -> Result<TransitivityReport> {
    let whole = Subgroup::whole(g);
    let (direct, direct_cosets) = induce_with_cosets(g, m, &whole)?;
    let (inner, inner_cosets) = induce_with_cosets(g, m, mid)?;
    let (staged, outer_cosets) = induce_with_cosets(g, &inner, &whole)?;
    let d = m.dim;
    let inner_dim = inner.dim;
    let mut cols = Vec::new();
    for &gi in &outer_cosets.reps {
        for &hj in &inner_cosets.reps {
            let (k, x) = direct_cosets.split(g, g.mul(gi, hj));
            let rho = m.act(x);
            for e in 0..d {
                let mut col = vec![0u64; direct.dim];
                for r in 0..d {
                    col[k * d + r] = rho.get(r, e);
                }
                cols.push(col);
            }
        }
    }
    debug_assert_eq!(cols.len(), outer_cosets.len() * inner_dim);
    let phi = FpMatrix::from_columns(m.p, direct.dim, &cols);
    let mut equivariant = phi.cols() == staged.dim;
    for &s in g.generators() {
        if !equivariant {
            break;
        }
        equivariant = phi.matmul(staged.act(s))? == direct.act(s).matmul(&phi)?;
    }
    let bijective = phi.rows() == phi.cols() && phi.is_invertible();
    Ok(TransitivityReport {
        direct_dim: direct.dim,
        staged_dim: staged.dim,
        equivariant,
        bijective,
        pass: direct.dim == staged.dim && equivariant && bijective,
    })
}
