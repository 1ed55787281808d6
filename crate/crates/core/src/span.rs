//! Exact incremental row reduction: spans, membership with certificates and
//! graded pieces of ideals.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::multiindex::CoordinateBasis;
use crate::poly::Poly;

/// A vector stored as sorted `(index, nonzero value)` pairs.
#[derive(Clone, Debug)]
pub struct SparseVector<F: Field> {
    dim: usize,
    entries: Vec<(usize, F::Elem)>,
}

impl<F: Field> PartialEq for SparseVector<F> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}

impl<F: Field> Eq for SparseVector<F> {}

impl<F: Field> std::hash::Hash for SparseVector<F> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.dim.hash(state);
        self.entries.hash(state);
    }
}

impl<F: Field> SparseVector<F> {
    pub fn zero(dim: usize) -> Self {
        SparseVector {
            dim,
            entries: Vec::new(),
        }
    }

    /// Builds from unsorted entries, summing repeated indices and dropping
    /// zeros.
    pub fn from_entries(f: &F, dim: usize, mut entries: Vec<(usize, F::Elem)>) -> Self {
        entries.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, F::Elem)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            assert!(i < dim, "index {i} out of range for dimension {dim}");
            match out.last_mut() {
                Some((j, w)) if *j == i => *w = f.add(w, &v),
                _ => out.push((i, v)),
            }
        }
        out.retain(|(_, v)| !f.is_zero(v));
        SparseVector { dim, entries: out }
    }

    pub fn from_dense(f: &F, values: &[F::Elem]) -> Self {
        SparseVector {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !f.is_zero(v))
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, f: &F) -> Vec<F::Elem> {
        let mut v = vec![f.zero(); self.dim];
        for (i, x) in &self.entries {
            v[*i] = x.clone();
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, F::Elem)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&F::Elem> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn leading(&self) -> Option<&(usize, F::Elem)> {
        self.entries.first()
    }

    pub fn scale(&self, f: &F, c: &F::Elem) -> Self {
        if f.is_zero(c) {
            return Self::zero(self.dim);
        }
        SparseVector {
            dim: self.dim,
            entries: self.entries.iter().map(|(i, v)| (*i, f.mul(v, c))).collect(),
        }
    }

    pub fn add(&self, f: &F, other: &Self) -> Self {
        self.axpy(f, &f.neg(&f.one()), other)
    }

    pub fn sub(&self, f: &F, other: &Self) -> Self {
        self.axpy(f, &f.one(), other)
    }

    /// `self - c * other`.
    pub fn axpy(&self, f: &F, c: &F::Elem, other: &Self) -> Self {
        let dim = self.dim.max(other.dim);
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push(a[i].clone());
                i += 1;
            } else if take_b {
                let v = f.neg(&f.mul(c, &b[j].1));
                if !f.is_zero(&v) {
                    out.push((b[j].0, v));
                }
                j += 1;
            } else {
                let v = f.sub_mul(&a[i].1, c, &b[j].1);
                if !f.is_zero(&v) {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVector { dim, entries: out }
    }
}

/// Witness that a vector lies in a span.
///
/// `row_terms` expresses the target over the echelon rows, keyed by pivot
/// column. When the basis tracks provenance, `generator_terms` expresses it
/// over the inserted vectors, keyed by insertion id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipCertificate<F: Field> {
    pub row_terms: Vec<(usize, F::Elem)>,
    pub generator_terms: Option<Vec<(usize, F::Elem)>>,
}

impl<F: Field> MembershipCertificate<F> {
    pub fn replay_rows(&self, f: &F, basis: &SpanBasis<F>) -> SparseVector<F> {
        let mut acc = SparseVector::zero(basis.ambient_dim());
        for (col, c) in &self.row_terms {
            let row = basis.row_for_pivot(*col).expect("certificate references a pivot row");
            acc = acc.axpy(f, &f.neg(c), row);
        }
        acc
    }

    /// Replays over the original vectors; `None` without provenance.
    pub fn replay_generators(&self, f: &F, generators: &[SparseVector<F>]) -> Option<SparseVector<F>> {
        let terms = self.generator_terms.as_ref()?;
        let dim = generators.first().map_or(0, |g| g.dim());
        let mut acc = SparseVector::zero(dim);
        for (id, c) in terms {
            acc = acc.axpy(f, &f.neg(c), &generators[*id]);
        }
        Some(acc)
    }
}

/// Reduced row-echelon basis of a subspace of `F^ambient`.
#[derive(Clone, Debug)]
pub struct SpanBasis<F: Field> {
    field: F,
    ambient: usize,
    rows: Vec<SparseVector<F>>,
    pivots: Vec<usize>,
    combos: Option<Vec<SparseVector<F>>>,
    inserted: usize,
}

impl<F: Field> SpanBasis<F> {
    pub fn new(field: F, ambient: usize) -> Self {
        SpanBasis {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
            combos: None,
            inserted: 0,
        }
    }

    /// A basis that records how each row combines the inserted vectors, so
    /// membership certificates can name generators.
    pub fn with_provenance(field: F, ambient: usize) -> Self {
        SpanBasis {
            combos: Some(Vec::new()),
            ..Self::new(field, ambient)
        }
    }

    pub fn from_vectors(field: F, ambient: usize, vectors: &[SparseVector<F>]) -> Result<Self> {
        let mut b = Self::new(field, ambient);
        for v in vectors {
            b.insert(v)?;
        }
        Ok(b)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVector<F>] {
        &self.rows
    }

    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivots
    }

    /// Number of vectors passed to [`insert`](Self::insert) so far.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn row_for_pivot(&self, col: usize) -> Option<&SparseVector<F>> {
        self.pivots.binary_search(&col).ok().map(|r| &self.rows[r])
    }

    fn check_len(&self, v: &SparseVector<F>) -> Result<()> {
        if v.dim() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: v.dim(),
            });
        }
        Ok(())
    }

    /// Reduces `v` against the rows. Returns the residual, the row terms
    /// used, and (with provenance) the combination of inserted vectors that
    /// was subtracted.
    #[allow(clippy::type_complexity)]
    fn reduce(&self, v: &SparseVector<F>) -> (SparseVector<F>, Vec<(usize, F::Elem)>, Option<SparseVector<F>>) {
        let f = &self.field;
        let terms: Vec<(usize, F::Elem)> = v
            .entries()
            .iter()
            .filter(|(c, _)| self.pivots.binary_search(c).is_ok())
            .cloned()
            .collect();
        let mut r = v.clone();
        let mut used = self.combos.as_ref().map(|_| SparseVector::zero(usize::MAX));
        for (col, c) in &terms {
            let row = self.pivots.binary_search(col).expect("pivot");
            r = r.axpy(f, c, &self.rows[row]);
            if let (Some(u), Some(combos)) = (used.as_mut(), self.combos.as_ref()) {
                *u = u.axpy(f, &f.neg(c), &combos[row]);
            }
        }
        (r, terms, used)
    }

    /// Adds `v` to the span; returns whether the span grew.
    pub fn insert(&mut self, v: &SparseVector<F>) -> Result<bool> {
        self.check_len(v)?;
        let id = self.inserted;
        self.inserted += 1;
        let (r, _, used) = self.reduce(v);
        if r.is_zero() {
            return Ok(false);
        }
        let f = self.field.clone();
        let (col, lead) = r.leading().cloned().expect("nonzero residual");
        let scale = f.inv(&lead).expect("nonzero leading entry");
        let r = r.scale(&f, &scale);
        // combination: v - used, scaled
        let combo = used.map(|u| {
            let mut e = SparseVector::from_entries(&f, usize::MAX, vec![(id, f.one())]);
            e = e.axpy(&f, &f.one(), &u);
            e.scale(&f, &scale)
        });
        for (k, row) in self.rows.iter_mut().enumerate() {
            if let Some(c) = row.get(col).cloned() {
                *row = row.axpy(&f, &c, &r);
                if let (Some(combos), Some(nc)) = (self.combos.as_mut(), combo.as_ref()) {
                    combos[k] = combos[k].axpy(&f, &c, nc);
                }
            }
        }
        let pos = self.pivots.partition_point(|&p| p < col);
        self.pivots.insert(pos, col);
        self.rows.insert(pos, r);
        if let (Some(combos), Some(nc)) = (self.combos.as_mut(), combo) {
            combos.insert(pos, nc);
        }
        Ok(true)
    }

    /// A certificate if `v` lies in the span, `None` otherwise.
    pub fn contains(&self, v: &SparseVector<F>) -> Result<Option<MembershipCertificate<F>>> {
        self.check_len(v)?;
        let (r, row_terms, used) = self.reduce(v);
        if !r.is_zero() {
            return Ok(None);
        }
        let generator_terms = used.map(|u| u.entries().to_vec());
        Ok(Some(MembershipCertificate {
            row_terms,
            generator_terms,
        }))
    }

    pub fn contains_vector(&self, v: &SparseVector<F>) -> bool {
        v.dim() == self.ambient && self.reduce(v).0.is_zero()
    }

    /// Residual of `v` after reduction; zero iff `v` is in the span.
    pub fn residual(&self, v: &SparseVector<F>) -> SparseVector<F> {
        self.reduce(v).0
    }

    pub fn is_subspace_of(&self, other: &SpanBasis<F>) -> bool {
        self.ambient == other.ambient && self.rows.iter().all(|r| other.contains_vector(r))
    }

    pub fn same_span(&self, other: &SpanBasis<F>) -> bool {
        // reduced echelon form is unique
        self.ambient == other.ambient && self.pivots == other.pivots && self.rows == other.rows
    }
}

/// The degree-`e` piece of the ideal generated by homogeneous `generators`
/// in `n + 1` variables, as a span over the monomials of `A(n, e)`.
pub fn ideal_degree_part<F: Field>(f: &F, n: usize, generators: &[Poly<F>], e: u32) -> Result<SpanBasis<F>> {
    let target = CoordinateBasis::enumerate(n, e)?;
    let mut span = SpanBasis::new(f.clone(), target.len());
    for g in generators {
        if g.nvars() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                got: g.nvars(),
            });
        }
        let Some(dg) = g.homogeneous_degree()? else {
            continue;
        };
        if dg > e {
            continue;
        }
        let multipliers = CoordinateBasis::enumerate(n, e - dg)?;
        for m in multipliers.iter() {
            let entries = g
                .terms()
                .map(|(mono, c)| {
                    let idx = target.index_of(&mono.add(m)).expect("degree e monomial");
                    (idx, c.clone())
                })
                .collect();
            span.insert(&SparseVector::from_entries(f, target.len(), entries))?;
        }
    }
    Ok(span)
}

/// Coefficient vector of a homogeneous polynomial in the basis `A(n, e)`.
pub fn poly_vector<F: Field>(f: &F, basis: &CoordinateBasis, p: &Poly<F>) -> Result<SparseVector<F>> {
    let mut entries = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let i = basis.index_of(m).ok_or(Error::WrongDegree {
            expected: basis.degree(),
            got: m.degree(),
        })?;
        entries.push((i, c.clone()));
    }
    Ok(SparseVector::from_entries(f, basis.len(), entries))
}

/// Inverse of [`poly_vector`].
pub fn vector_poly<F: Field>(f: &F, basis: &CoordinateBasis, v: &SparseVector<F>) -> Poly<F> {
    Poly::from_terms(
        f,
        basis.n() + 1,
        v.entries().iter().map(|(i, c)| (basis.get(*i).clone(), c.clone())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vec_q(v: &[i64]) -> SparseVector<Rationals> {
        let f = Rationals;
        SparseVector::from_dense(&f, &v.iter().map(|&x| f.from_i64(x)).collect::<Vec<_>>())
    }

    #[test]
    fn insert_zero_and_duplicates() {
        let mut b = SpanBasis::new(Rationals, 3);
        assert!(!b.insert(&vec_q(&[0, 0, 0])).unwrap());
        assert_eq!(b.dim(), 0);
        assert!(b.insert(&vec_q(&[1, 0, 0])).unwrap());
        assert!(!b.insert(&vec_q(&[1, 0, 0])).unwrap());
        assert_eq!(b.dim(), 1);
        assert!(b.insert(&vec_q(&[0, 0, 1])).is_ok());
        assert!(b.insert(&vec_q(&[1, 0])).is_err());
    }

    #[test]
    fn empty_span_contains_zero() {
        let b = SpanBasis::with_provenance(Rationals, 4);
        let cert = b.contains(&vec_q(&[0, 0, 0, 0])).unwrap().unwrap();
        assert!(cert.row_terms.is_empty());
        assert_eq!(cert.generator_terms, Some(vec![]));
        assert!(b.contains(&vec_q(&[0, 1, 0, 0])).unwrap().is_none());
    }

    #[test]
    fn rows_are_reduced() {
        let mut b = SpanBasis::new(Rationals, 4);
        for v in [[1, 2, 3, 4], [2, 4, 7, 1], [0, 1, 1, 1], [3, 7, 11, 6]] {
            b.insert(&vec_q(&v)).unwrap();
        }
        assert_eq!(b.dim(), 3);
        let f = Rationals;
        for (k, row) in b.rows().iter().enumerate() {
            let p = b.pivot_columns()[k];
            assert_eq!(row.leading().unwrap().0, p);
            assert_eq!(row.get(p), Some(&f.one()));
            for (j, &q) in b.pivot_columns().iter().enumerate() {
                if j != k {
                    assert!(row.get(q).is_none());
                }
            }
        }
        assert!(b.pivot_columns().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn certificates_replay() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gens: Vec<SparseVector<PrimeField>> = (0..6)
            .map(|_| {
                let v: Vec<u64> = (0..8).map(|_| if rng.gen_bool(0.4) { f.random(&mut rng) } else { 0 }).collect();
                SparseVector::from_dense(&f, &v)
            })
            .collect();
        let mut b = SpanBasis::with_provenance(f, 8);
        for g in &gens {
            b.insert(g).unwrap();
        }
        let target = gens[0].axpy(&f, &3, &gens[4]).axpy(&f, &5, &gens[2]);
        let cert = b.contains(&target).unwrap().unwrap();
        assert_eq!(cert.replay_rows(&f, &b), target);
        assert_eq!(cert.replay_generators(&f, &gens).unwrap(), target);
    }

    #[test]
    fn order_independence_and_was_new_agreement() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let mut vs: Vec<SparseVector<PrimeField>> = (0..7)
                .map(|_| {
                    let v: Vec<u64> = (0..6).map(|_| if rng.gen_bool(0.5) { f.random(&mut rng) } else { 0 }).collect();
                    SparseVector::from_dense(&f, &v)
                })
                .collect();
            let a = SpanBasis::from_vectors(f, 6, &vs).unwrap();
            vs.shuffle(&mut rng);
            let mut b = SpanBasis::new(f, 6);
            for v in &vs {
                let had = b.contains(v).unwrap().is_some();
                let grew = b.insert(v).unwrap();
                assert_eq!(had, !grew);
            }
            assert!(a.same_span(&b));
            assert!(a.is_subspace_of(&b) && b.is_subspace_of(&a));
        }
    }

    #[test]
    fn ideal_degree_part_conic() {
        let f = Rationals;
        let x = |k| Poly::var(&f, 3, k);
        let conic = x(0).mul(&f, &x(2)).sub(&f, &x(1).pow(&f, 2));
        assert_eq!(ideal_degree_part(&f, 2, std::slice::from_ref(&conic), 2).unwrap().dim(), 1);
        assert_eq!(ideal_degree_part(&f, 2, std::slice::from_ref(&conic), 3).unwrap().dim(), 3);
        let bad = conic.add(&f, &x(0));
        assert_eq!(ideal_degree_part(&f, 2, &[bad], 3).unwrap_err(), Error::Inhomogeneous);
    }

    #[test]
    fn dense_round_trip() {
        let f = Rationals;
        let v = vec_q(&[0, 3, 0, -1]);
        assert_eq!(SparseVector::from_dense(&f, &v.to_dense(&f)), v);
        assert_eq!(v.add(&f, &v).sub(&f, &v), v);
    }
}
