//! Linear and quadratic forms in the coordinates of a projective space, the
//! symmetric rank of a quadric, and the binomial generators of a Veronese
//! ideal.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::multiindex::{binomial, CoordinateBasis, MultiIndex};
use crate::poly::Poly;
use crate::span::SparseVector;

/// `Σ c_i z_i` over `dim` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm<F: Field> {
    dim: usize,
    coeffs: BTreeMap<usize, F::Elem>,
}

impl<F: Field> LinearForm<F> {
    pub fn zero(dim: usize) -> Self {
        LinearForm {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn coordinate(f: &F, dim: usize, i: usize) -> Self {
        Self::from_terms(f, dim, [(i, f.one())])
    }

    pub fn from_terms(f: &F, dim: usize, terms: impl IntoIterator<Item = (usize, F::Elem)>) -> Self {
        let mut l = Self::zero(dim);
        for (i, c) in terms {
            l.add_term(f, i, c);
        }
        l
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &F::Elem)> {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn get(&self, i: usize) -> Option<&F::Elem> {
        self.coeffs.get(&i)
    }

    pub fn add_term(&mut self, f: &F, i: usize, c: F::Elem) {
        assert!(i < self.dim, "coordinate {i} out of range for dimension {}", self.dim);
        if f.is_zero(&c) {
            return;
        }
        let v = self.coeffs.entry(i).or_insert_with(|| f.zero());
        *v = f.add(v, &c);
        if f.is_zero(v) {
            self.coeffs.remove(&i);
        }
    }

    pub fn add(&self, f: &F, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in other.terms() {
            out.add_term(f, i, c.clone());
        }
        out
    }

    pub fn scale(&self, f: &F, c: &F::Elem) -> Self {
        Self::from_terms(f, self.dim, self.terms().map(|(i, v)| (i, f.mul(v, c))))
    }

    /// `Σ c_i images[i]`.
    pub fn substitute(&self, f: &F, images: &[LinearForm<F>], target_dim: usize) -> Self {
        let mut out = Self::zero(target_dim);
        for (i, c) in self.terms() {
            for (j, v) in images[i].terms() {
                out.add_term(f, j, f.mul(c, v));
            }
        }
        out
    }
}

/// Canonical index of unordered coordinate pairs `{i ≤ j}` among `dim`
/// coordinates, in lexicographic order of `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairBasis {
    dim: usize,
}

impl PairBasis {
    pub fn new(dim: usize) -> Self {
        PairBasis { dim }
    }

    pub fn coordinates(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.dim * (self.dim + 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        debug_assert!(j < self.dim);
        // rows 0..i contribute dim + (dim-1) + ... + (dim-i+1)
        i * self.dim - i * (i.saturating_sub(1)) / 2 + (j - i)
    }

    pub fn pair(&self, mut idx: usize) -> (usize, usize) {
        for i in 0..self.dim {
            let row = self.dim - i;
            if idx < row {
                return (i, i + idx);
            }
            idx -= row;
        }
        panic!("pair index out of range");
    }
}

/// `Σ c_ij z_i z_j` with `i ≤ j`, over `dim` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm<F: Field> {
    dim: usize,
    coeffs: BTreeMap<(usize, usize), F::Elem>,
}

impl<F: Field> QuadraticForm<F> {
    pub fn zero(dim: usize) -> Self {
        QuadraticForm {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms(f: &F, dim: usize, terms: impl IntoIterator<Item = ((usize, usize), F::Elem)>) -> Self {
        let mut q = Self::zero(dim);
        for ((i, j), c) in terms {
            q.add_term(f, i, j, c);
        }
        q
    }

    /// `z_a z_b - z_c z_d`.
    pub fn binomial(f: &F, dim: usize, (a, b): (usize, usize), (c, d): (usize, usize)) -> Self {
        Self::from_terms(f, dim, [((a, b), f.one()), ((c, d), f.neg(&f.one()))])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), &F::Elem)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&F::Elem> {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.coeffs.get(&key)
    }

    pub fn add_term(&mut self, f: &F, i: usize, j: usize, c: F::Elem) {
        assert!(i < self.dim && j < self.dim, "coordinate out of range");
        if f.is_zero(&c) {
            return;
        }
        let key = if i <= j { (i, j) } else { (j, i) };
        let v = self.coeffs.entry(key).or_insert_with(|| f.zero());
        *v = f.add(v, &c);
        if f.is_zero(v) {
            self.coeffs.remove(&key);
        }
    }

    pub fn add(&self, f: &F, other: &Self) -> Self {
        let mut out = self.clone();
        for ((i, j), c) in other.terms() {
            out.add_term(f, i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, f: &F, other: &Self) -> Self {
        let mut out = self.clone();
        for ((i, j), c) in other.terms() {
            out.add_term(f, i, j, f.neg(c));
        }
        out
    }

    pub fn scale(&self, f: &F, c: &F::Elem) -> Self {
        Self::from_terms(f, self.dim, self.terms().map(|(k, v)| (k, f.mul(v, c))))
    }

    /// The product of two linear forms on the same space.
    pub fn product_of_linear(f: &F, a: &LinearForm<F>, b: &LinearForm<F>) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        let mut q = Self::zero(a.dim());
        for (i, ca) in a.terms() {
            for (j, cb) in b.terms() {
                q.add_term(f, i, j, f.mul(ca, cb));
            }
        }
        Ok(q)
    }

    /// Coefficient vector over [`PairBasis`].
    pub fn as_vector(&self, f: &F) -> SparseVector<F> {
        let pb = PairBasis::new(self.dim);
        SparseVector::from_entries(
            f,
            pb.len(),
            self.terms().map(|((i, j), c)| (pb.index(i, j), c.clone())).collect(),
        )
    }

    pub fn from_vector(f: &F, dim: usize, v: &SparseVector<F>) -> Self {
        let pb = PairBasis::new(dim);
        Self::from_terms(f, dim, v.entries().iter().map(|(k, c)| (pb.pair(*k), c.clone())))
    }

    /// `Σ c_ij images[i] images[j]` on a space of `target_dim` coordinates.
    pub fn substitute(&self, f: &F, images: &[LinearForm<F>], target_dim: usize) -> Self {
        assert_eq!(images.len(), self.dim, "one image per coordinate");
        let mut out = Self::zero(target_dim);
        for ((i, j), c) in self.terms() {
            for (a, ca) in images[i].terms() {
                let cca = f.mul(c, ca);
                for (b, cb) in images[j].terms() {
                    out.add_term(f, a, b, f.mul(&cca, cb));
                }
            }
        }
        out
    }

    /// Rank of the associated symmetric matrix.
    ///
    /// Works with `2M` (diagonal `2c_ii`, off-diagonal `c_ij`), which has the
    /// same rank as `M` in odd characteristic, and eliminates by congruence:
    /// a nonzero diagonal pivot removes one row and column; failing that, a
    /// nonzero off-diagonal entry `a` at `(p, q)` forms the hyperbolic block
    /// `[[0, a], [a, 0]]` and removes two.
    pub fn rank(&self, f: &F) -> usize {
        // restrict to coordinates that occur
        let mut vars: Vec<usize> = self.coeffs.keys().flat_map(|&(i, j)| [i, j]).collect();
        vars.sort_unstable();
        vars.dedup();
        let k = vars.len();
        let pos = |v: usize| vars.binary_search(&v).expect("support variable");
        let two = f.from_i64(2);
        let mut m = vec![vec![f.zero(); k]; k];
        for ((i, j), c) in self.terms() {
            let (a, b) = (pos(i), pos(j));
            if a == b {
                m[a][a] = f.mul(&two, c);
            } else {
                m[a][b] = c.clone();
                m[b][a] = c.clone();
            }
        }
        symmetric_rank(f, m)
    }

    /// Substitutes `z_I ← x^I` for the coordinates of `basis`; the result is
    /// zero exactly when the form vanishes on the Veronese variety.
    pub fn pullback_to_veronese(&self, f: &F, basis: &CoordinateBasis) -> Poly<F> {
        assert_eq!(self.dim, basis.len());
        Poly::from_terms(
            f,
            basis.n() + 1,
            self.terms().map(|((i, j), c)| (basis.get(i).add(basis.get(j)), c.clone())),
        )
    }
}

/// Congruence-elimination rank of a dense symmetric matrix.
pub fn symmetric_rank<F: Field>(f: &F, mut m: Vec<Vec<F::Elem>>) -> usize {
    let mut rank = 0;
    loop {
        let k = m.len();
        if k == 0 {
            return rank;
        }
        if let Some(p) = (0..k).find(|&i| !f.is_zero(&m[i][i])) {
            let inv = f.inv(&m[p][p]).expect("nonzero pivot");
            let keep: Vec<usize> = (0..k).filter(|&i| i != p).collect();
            let next = keep
                .iter()
                .map(|&i| {
                    let s = f.mul(&m[i][p], &inv);
                    keep.iter().map(|&j| f.sub_mul(&m[i][j], &s, &m[p][j])).collect()
                })
                .collect();
            m = next;
            rank += 1;
            continue;
        }
        let off = (0..k).find_map(|i| (i + 1..k).find(|&j| !f.is_zero(&m[i][j])).map(|j| (i, j)));
        let Some((p, q)) = off else {
            return rank;
        };
        let inv = f.inv(&m[p][q]).expect("nonzero pivot");
        let keep: Vec<usize> = (0..k).filter(|&i| i != p && i != q).collect();
        let next = keep
            .iter()
            .map(|&i| {
                keep.iter()
                    .map(|&j| {
                        let t = f.add(&f.mul(&m[i][p], &m[q][j]), &f.mul(&m[i][q], &m[p][j]));
                        f.sub_mul(&m[i][j], &inv, &t)
                    })
                    .collect()
            })
            .collect();
        m = next;
        rank += 2;
    }
}

/// Quadrics `z_I z_J - z_K z_L` for every unordered pair of distinct
/// unordered pairs `{I,J} ≠ {K,L}` with `I + J = K + L`. The set is
/// redundant but spans `I(V_{n,d})_2`.
///
/// Pairs are grouped by their sum in order of first appearance among the
/// coordinate pairs `{i ≤ j}`, and within a group emitted lexicographically.
pub fn binomial_generators<F: Field>(f: &F, n: usize, d: u32) -> Result<Vec<QuadraticForm<F>>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("binomial generators need d >= 2, got {d}")));
    }
    let basis = CoordinateBasis::enumerate(n, d)?;
    let dim = basis.len();
    let mut groups: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut by_sum: std::collections::HashMap<MultiIndex, usize> = std::collections::HashMap::new();
    for i in 0..dim {
        for j in i..dim {
            let s = basis.get(i).add(basis.get(j));
            let g = *by_sum.entry(s).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push((i, j));
        }
    }
    let mut out = Vec::new();
    for g in &groups {
        for a in 0..g.len() {
            for b in a + 1..g.len() {
                out.push(QuadraticForm::binomial(f, dim, g[a], g[b]));
            }
        }
    }
    Ok(out)
}

/// `dim I(V_{n,d})_2 = binomial(N+2, 2) - binomial(n+2d, n)`.
pub fn veronese_quadric_count(n: usize, d: u32) -> u64 {
    let coords = binomial(n as u64 + d as u64, n as u64);
    binomial(coords + 1, 2) - binomial(n as u64 + 2 * d as u64, n as u64)
}
