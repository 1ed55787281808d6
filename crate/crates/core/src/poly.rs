//! Sparse polynomials in `x_0, ..., x_n` over a [`Field`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::multiindex::{CoordinateBasis, MultiIndex};

/// A polynomial as a map from exponent vector to nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly<F: Field> {
    nvars: usize,
    terms: BTreeMap<MultiIndex, F::Elem>,
}

impl<F: Field> Poly<F> {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(f: &F, nvars: usize, c: F::Elem) -> Self {
        Self::monomial(f, MultiIndex::zero(nvars - 1), c)
    }

    pub fn monomial(f: &F, m: MultiIndex, c: F::Elem) -> Self {
        let nvars = m.len();
        let mut terms = BTreeMap::new();
        if !f.is_zero(&c) {
            terms.insert(m, c);
        }
        Poly { nvars, terms }
    }

    /// The variable `x_k`.
    pub fn var(f: &F, nvars: usize, k: usize) -> Self {
        Self::monomial(f, MultiIndex::unit(nvars - 1, k), f.one())
    }

    /// `Σ c_i x_i`.
    pub fn linear(f: &F, coeffs: &[F::Elem]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(f, MultiIndex::unit(n - 1, k), c.clone());
        }
        p
    }

    /// `Σ c_I x^I` over a coordinate basis.
    pub fn from_coefficients(f: &F, basis: &CoordinateBasis, coeffs: &[F::Elem]) -> Self {
        let mut p = Self::zero(basis.n() + 1);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(f, basis.get(i).clone(), c.clone());
        }
        p
    }

    pub fn from_terms(f: &F, nvars: usize, terms: impl IntoIterator<Item = (MultiIndex, F::Elem)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars);
            p.add_term(f, m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &F::Elem)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &MultiIndex) -> Option<&F::Elem> {
        self.terms.get(m)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, f: &F, m: MultiIndex, c: F::Elem) {
        if f.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = f.add(v, &c);
                if f.is_zero(v) {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, f: &F, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(f, m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, f: &F, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(f, m.clone(), f.neg(c));
        }
        out
    }

    pub fn scale(&self, f: &F, c: &F::Elem) -> Self {
        if f.is_zero(c) {
            return Self::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), f.mul(v, c))).collect(),
        }
    }

    pub fn mul(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Self::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(f, a.add(b), f.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, f: &F, e: u32) -> Self {
        let mut out = Self::constant(f, self.nvars, f.one());
        for _ in 0..e {
            out = out.mul(f, self);
        }
        out
    }

    /// Degree of a nonzero homogeneous polynomial; `None` for zero.
    pub fn homogeneous_degree(&self) -> Result<Option<u32>> {
        let mut degs = self.terms.keys().map(|m| m.degree());
        let Some(first) = degs.next() else {
            return Ok(None);
        };
        if degs.all(|d| d == first) {
            Ok(Some(first))
        } else {
            Err(Error::Inhomogeneous)
        }
    }

    /// Checks homogeneity of the given degree; zero passes for any degree.
    pub fn check_degree(&self, d: u32) -> Result<()> {
        match self.homogeneous_degree()? {
            Some(got) if got != d => Err(Error::WrongDegree { expected: d, got }),
            _ => Ok(()),
        }
    }

    /// Substitution `x_k ↦ images[k]`.
    pub fn substitute_linear(&self, f: &F, images: &[Poly<F>]) -> Self {
        assert_eq!(images.len(), self.nvars);
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut term = Self::constant(f, self.nvars, c.clone());
            for (k, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    term = term.mul(f, &images[k].pow(f, e));
                }
            }
            out = out.add(f, &term);
        }
        out
    }

    /// Dense coefficient vector in the order of `basis`.
    pub fn to_coefficients(&self, f: &F, basis: &CoordinateBasis) -> Result<Vec<F::Elem>> {
        let mut v = vec![f.zero(); basis.len()];
        for (m, c) in &self.terms {
            let i = basis.index_of(m).ok_or(Error::WrongDegree {
                expected: basis.degree(),
                got: m.degree(),
            })?;
            v[i] = c.clone();
        }
        Ok(v)
    }
}
