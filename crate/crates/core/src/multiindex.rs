//! Exponent vectors and the coordinate basis of a Veronese ambient space.
//!
//! The canonical order on `A(n,d)` is graded-lexicographic: within a fixed
//! degree, vectors are sorted lexicographically in decreasing order, so for
//! `n = 1, d = 2` the order is `(2,0), (1,1), (0,2)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exponent vector of a monomial in `x_0, ..., x_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n + 1])
    }

    /// The unit vector `e_k` among `n + 1` coordinates.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = vec![0; n + 1];
        v[k] = 1;
        MultiIndex(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Number of variables, `n + 1`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0[k]
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.len(), other.len(), "multi-index length mismatch");
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Entrywise difference, or `None` if some entry would go negative.
    pub fn sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        assert_eq!(self.len(), other.len(), "multi-index length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Shifts by a signed vector, `None` if an entry goes negative.
    pub fn shift(&self, delta: &[i64]) -> Option<MultiIndex> {
        assert_eq!(self.len(), delta.len(), "multi-index length mismatch");
        self.0
            .iter()
            .zip(delta)
            .map(|(&a, &d)| u32::try_from(a as i64 + d).ok())
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(k, _)| k)
            .collect()
    }

    /// Inserts a zero at position `k` (the inclusion `A(n-1,d) → A(n,d)`).
    pub fn insert_zero(&self, k: usize) -> Result<MultiIndex> {
        if k > self.len() {
            return Err(Error::InvalidArgument(format!(
                "insert position {k} out of range 0..={}",
                self.len()
            )));
        }
        let mut v = self.0.clone();
        v.insert(k, 0);
        Ok(MultiIndex(v))
    }

    /// Removes position `k`; inverse of [`insert_zero`](Self::insert_zero)
    /// when that entry is zero.
    pub fn remove(&self, k: usize) -> Result<MultiIndex> {
        if k >= self.len() {
            return Err(Error::InvalidArgument(format!("position {k} out of range")));
        }
        let mut v = self.0.clone();
        v.remove(k);
        Ok(MultiIndex(v))
    }

    /// Adds one at position `k` (the inclusion `A(n,d-1) → A(n,d)`).
    pub fn add_unit(&self, k: usize) -> Result<MultiIndex> {
        if k >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "unit position {k} out of range 0..{}",
                self.len()
            )));
        }
        let mut v = self.0.clone();
        v[k] += 1;
        Ok(MultiIndex(v))
    }

    /// The coordinate name `z[a0,...,an]`.
    pub fn coordinate_name(&self) -> String {
        format!("z{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    /// Accepts `[a0,...,an]`, `(a0,...,an)`, `a0,...,an` and an optional
    /// leading `z`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('z');
        let t = t.trim_start_matches(['[', '(']).trim_end_matches([']', ')']);
        let v = t
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::InvalidArgument(format!("bad multi-index {s:?}")))?;
        if v.is_empty() {
            return Err(Error::InvalidArgument(format!("bad multi-index {s:?}")));
        }
        Ok(MultiIndex(v))
    }
}

/// All of `A(n, d)` in graded-lex order, with inverse lookup.
#[derive(Clone, Debug)]
pub struct CoordinateBasis {
    n: usize,
    d: u32,
    elems: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl CoordinateBasis {
    pub fn enumerate(n: usize, d: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        Ok(Self::enumerate_unchecked(n, d))
    }

    /// Like [`enumerate`](Self::enumerate) but allows `n = 0`, which the
    /// inclusion maps need for the one-variable base case.
    pub(crate) fn enumerate_unchecked(n: usize, d: u32) -> Self {
        let elems = monomials(n + 1, d);
        let index = elems
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        CoordinateBasis { n, d, elems, index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    /// `binomial(n + d, n)`; the projective dimension is one less.
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// `N(n, d)`, the dimension of the ambient projective space.
    pub fn projective_dim(&self) -> usize {
        self.len() - 1
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.elems[i]
    }

    pub fn index_of(&self, m: &MultiIndex) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.elems.iter()
    }
}

/// Exponent vectors of length `vars` summing to `d`, graded-lex descending.
fn monomials(vars: usize, d: u32) -> Vec<MultiIndex> {
    fn rec(vars: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if vars == 1 {
            prefix.push(d);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in (0..=d).rev() {
            prefix.push(a);
            rec(vars - 1, d - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if vars > 0 {
        rec(vars, d, &mut Vec::with_capacity(vars), &mut out);
    }
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
