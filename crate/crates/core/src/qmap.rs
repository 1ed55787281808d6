//! The Q-map `Q(s,t,h) = f(s²h) f(t²h) - f(sth)²` on the Veronese ambient,
//! the featured generating set Γ built from it, and catalecticant
//! flattenings.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::multiindex::{binomial, CoordinateBasis, MultiIndex};
use crate::par;
use crate::poly::Poly;
use crate::quadform::{LinearForm, PairBasis, QuadraticForm};
use crate::span::{SpanBasis, SparseVector};
use crate::text::{format_poly, Vars};

/// Section spaces for `𝒪(d) = 𝒪(1)^{⊗2} ⊗ 𝒪(d-2)` on `ℙⁿ`: the variables
/// `x_0..x_n` and the monomials of degree `d - 2`.
#[derive(Clone, Debug)]
pub struct AmbientSections {
    n: usize,
    d: u32,
    coords: CoordinateBasis,
    h_basis: CoordinateBasis,
}

impl AmbientSections {
    pub fn new(n: usize, d: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument(format!("n must be at least 1, got {n}")));
        }
        if d < 2 {
            return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
        }
        Ok(AmbientSections {
            n,
            d,
            coords: CoordinateBasis::enumerate(n, d)?,
            h_basis: CoordinateBasis::enumerate(n, d - 2)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// The coordinates `z_I`, `I ∈ A(n,d)`.
    pub fn coordinates(&self) -> &CoordinateBasis {
        &self.coords
    }

    /// Monomials of degree `d - 2`.
    pub fn h_basis(&self) -> &CoordinateBasis {
        &self.h_basis
    }

    /// `p = n + 1`.
    pub fn p(&self) -> usize {
        self.n + 1
    }

    /// `q = binomial(n + d - 2, n)`.
    pub fn q(&self) -> usize {
        self.h_basis.len()
    }

    pub fn pair_dim(&self) -> usize {
        PairBasis::new(self.coords.len()).len()
    }

    /// `f`: a degree-`d` form `Σ c_I x^I` to the linear form `Σ c_I z_I`.
    pub fn expand<F: Field>(&self, f: &F, p: &Poly<F>) -> Result<LinearForm<F>> {
        expand(f, &self.coords, p)
    }

    pub fn q_of<F: Field>(&self, f: &F, s: &Poly<F>, t: &Poly<F>, h: &Poly<F>) -> Result<QuadraticForm<F>> {
        q_of(f, &self.coords, s, t, h)
    }
}

/// `f`: a degree-`d` form `Σ c_I x^I` to the linear form `Σ c_I z_I`.
pub fn expand<F: Field>(f: &F, coords: &CoordinateBasis, p: &Poly<F>) -> Result<LinearForm<F>> {
    if p.nvars() != coords.n() + 1 {
        return Err(Error::DimensionMismatch {
            expected: coords.n() + 1,
            got: p.nvars(),
        });
    }
    p.check_degree(coords.degree())?;
    let mut l = LinearForm::zero(coords.len());
    for (m, c) in p.terms() {
        l.add_term(f, coords.index_of(m).expect("degree checked"), c.clone());
    }
    Ok(l)
}

/// `Q(s,t,h) = f(s²h)·f(t²h) - f(sth)²` for linear `s, t` and `h` of
/// degree `d - 2`.
pub fn q_of<F: Field>(f: &F, coords: &CoordinateBasis, s: &Poly<F>, t: &Poly<F>, h: &Poly<F>) -> Result<QuadraticForm<F>> {
    s.check_degree(1)?;
    t.check_degree(1)?;
    h.check_degree(coords.degree() - 2)?;
    let ss = expand(f, coords, &s.mul(f, s).mul(f, h))?;
    let tt = expand(f, coords, &t.mul(f, t).mul(f, h))?;
    let st = expand(f, coords, &s.mul(f, t).mul(f, h))?;
    let a = QuadraticForm::product_of_linear(f, &ss, &tt)?;
    let b = QuadraticForm::product_of_linear(f, &st, &st)?;
    Ok(a.sub(f, &b))
}

/// Which family of Γ an element belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Part {
    /// `Q(x_i, x_j, h)`
    G11,
    /// `Q(x_i + x_j, x_k, h)`
    G12,
    /// `Q(x_i + x_j, x_k + x_l, h)`
    G22,
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::G11 => "Γ11",
            Part::G12 => "Γ12",
            Part::G22 => "Γ22",
        })
    }
}

/// The index triple behind a Γ element: `s` and `t` are sums of the listed
/// variables, `h` is a sum of the listed degree-`(d-2)` monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub h: Vec<usize>,
}

impl Triple {
    pub fn polys<F: Field>(&self, f: &F, sections: &AmbientSections) -> (Poly<F>, Poly<F>, Poly<F>) {
        let nv = sections.p();
        let sum_vars = |ix: &[usize]| ix.iter().fold(Poly::zero(nv), |acc, &k| acc.add(f, &Poly::var(f, nv, k)));
        let h = self.h.iter().fold(Poly::zero(nv), |acc, &k| {
            acc.add(f, &Poly::monomial(f, sections.h_basis().get(k).clone(), f.one()))
        });
        (sum_vars(&self.s), sum_vars(&self.t), h)
    }

    /// `Q(x0+x1,x2,x0*x1)` style label.
    pub fn label(&self, sections: &AmbientSections) -> String {
        let f = crate::field::Rationals;
        let (s, t, h) = self.polys(&f, sections);
        let vars = Vars::x(sections.n());
        let compact = |p: &Poly<_>| format_poly(&f, p, &vars).replace(' ', "");
        format!("Q({},{},{})", compact(&s), compact(&t), compact(&h))
    }
}

#[derive(Clone, Debug)]
pub struct GammaElement<F: Field> {
    pub part: Part,
    pub triple: Triple,
    pub label: String,
    pub form: QuadraticForm<F>,
    pub is_zero: bool,
    /// Position of the first earlier element with the same form.
    pub duplicate_of: Option<usize>,
}

/// The featured set Γ for `(ℙⁿ, 𝒪(d))`, one element per index tuple.
#[derive(Clone, Debug)]
pub struct GeneratorSet<F: Field> {
    field: F,
    sections: AmbientSections,
    elements: Vec<GammaElement<F>>,
}

/// Index tuples of Γ in a fixed order: Γ11, then Γ12, then Γ22; within a
/// family by the variable indices, and for each by `h` over
/// `h_1..h_q, h_1+h_2, ...`.
pub fn gamma_triples(sections: &AmbientSections) -> Vec<(Part, Triple)> {
    let p = sections.p();
    let q = sections.q();
    let mut hs: Vec<Vec<usize>> = (0..q).map(|a| vec![a]).collect();
    for a in 0..q {
        for b in a + 1..q {
            hs.push(vec![a, b]);
        }
    }
    let mut st: Vec<(Part, Vec<usize>, Vec<usize>)> = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            st.push((Part::G11, vec![i], vec![j]));
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            for k in (0..p).filter(|&k| k != i && k != j) {
                st.push((Part::G12, vec![i, j], vec![k]));
            }
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            for k in i + 1..p {
                for l in k + 1..p {
                    if j != k && j != l {
                        st.push((Part::G22, vec![i, j], vec![k, l]));
                    }
                }
            }
        }
    }
    let mut out = Vec::with_capacity(st.len() * hs.len());
    for (part, s, t) in st {
        for h in &hs {
            out.push((
                part,
                Triple {
                    s: s.clone(),
                    t: t.clone(),
                    h: h.clone(),
                },
            ));
        }
    }
    out
}

impl<F: Field> GeneratorSet<F> {
    pub fn build(field: F, n: usize, d: u32) -> Result<Self> {
        let sections = AmbientSections::new(n, d)?;
        let triples = gamma_triples(&sections);
        let forms = par::map(&triples, |(_, tr)| {
            let (s, t, h) = tr.polys(&field, &sections);
            sections.q_of(&field, &s, &t, &h).expect("degrees are consistent by construction")
        });
        let mut seen: HashMap<SparseVector<F>, usize> = HashMap::new();
        let mut elements = Vec::with_capacity(forms.len());
        for (pos, ((part, triple), form)) in triples.into_iter().zip(forms).enumerate() {
            let is_zero = form.is_zero();
            let duplicate_of = if is_zero {
                None
            } else {
                let first = *seen.entry(form.as_vector(&field)).or_insert(pos);
                (first != pos).then_some(first)
            };
            elements.push(GammaElement {
                part,
                label: triple.label(&sections),
                triple,
                form,
                is_zero,
                duplicate_of,
            });
        }
        Ok(GeneratorSet {
            field,
            sections,
            elements,
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn sections(&self) -> &AmbientSections {
        &self.sections
    }

    pub fn elements(&self) -> &[GammaElement<F>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn count(&self, part: Part) -> usize {
        self.elements.iter().filter(|e| e.part == part).count()
    }

    pub fn forms(&self) -> Vec<QuadraticForm<F>> {
        self.elements.iter().map(|e| e.form.clone()).collect()
    }

    pub fn vectors(&self) -> Vec<SparseVector<F>> {
        par::map(&self.elements, |e| e.form.as_vector(&self.field))
    }

    /// Row-reduced span of all elements.
    pub fn span(&self) -> Result<SpanBasis<F>> {
        SpanBasis::from_vectors(self.field.clone(), self.sections.pair_dim(), &self.vectors())
    }

    /// Span that remembers each row as a combination of the elements.
    pub fn span_with_provenance(&self) -> Result<SpanBasis<F>> {
        let mut s = SpanBasis::with_provenance(self.field.clone(), self.sections.pair_dim());
        for v in self.vectors() {
            s.insert(&v)?;
        }
        Ok(s)
    }
}

/// `binomial(binomial(p,2)+1, 2) · binomial(q+1, 2)`.
pub fn gamma_size_bound(p: u64, q: u64) -> u64 {
    binomial(binomial(p, 2) + 1, 2) * binomial(q + 1, 2)
}

/// The catalecticant matrix with rows `A(n,a)`, columns `A(n,d-a)` and
/// entries `z_{I+J}` (stored as coordinate positions).
#[derive(Clone, Debug)]
pub struct Flattening {
    coords: CoordinateBasis,
    rows: CoordinateBasis,
    cols: CoordinateBasis,
}

impl Flattening {
    pub fn new(n: usize, d: u32, a: u32) -> Result<Self> {
        if a < 1 || a >= d {
            return Err(Error::InvalidArgument(format!("split must satisfy 1 <= a < d, got a={a}, d={d}")));
        }
        Ok(Flattening {
            coords: CoordinateBasis::enumerate(n, d)?,
            rows: CoordinateBasis::enumerate(n, a)?,
            cols: CoordinateBasis::enumerate(n, d - a)?,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn coordinates(&self) -> &CoordinateBasis {
        &self.coords
    }

    /// Coordinate position of the entry `(r, c)`.
    pub fn entry(&self, r: usize, c: usize) -> usize {
        let m: MultiIndex = self.rows.get(r).add(self.cols.get(c));
        self.coords.index_of(&m).expect("entry degree is d")
    }

    pub fn entry_index(&self, r: usize, c: usize) -> &MultiIndex {
        self.coords.get(self.entry(r, c))
    }

    /// All 2×2 minors, rows `r1 < r2` and columns `c1 < c2`, in
    /// lexicographic order.
    pub fn minors2<F: Field>(&self, f: &F) -> Vec<QuadraticForm<F>> {
        let (nr, nc) = self.shape();
        let dim = self.coords.len();
        let mut out = Vec::new();
        for r1 in 0..nr {
            for r2 in r1 + 1..nr {
                for c1 in 0..nc {
                    for c2 in c1 + 1..nc {
                        out.push(QuadraticForm::binomial(
                            f,
                            dim,
                            (self.entry(r1, c1), self.entry(r2, c2)),
                            (self.entry(r1, c2), self.entry(r2, c1)),
                        ));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::quadform::binomial_generators;
    use crate::text::{parse_quadric, Vars};

    fn x(f: &Rationals, nv: usize, k: usize) -> Poly<Rationals> {
        Poly::var(f, nv, k)
    }

    #[test]
    fn expand_examples() {
        let f = Rationals;
        let b = CoordinateBasis::enumerate(1, 2).unwrap();
        let x0 = x(&f, 2, 0);
        let x1 = x(&f, 2, 1);
        assert_eq!(expand(&f, &b, &x0.mul(&f, &x0)).unwrap(), LinearForm::coordinate(&f, 3, 0));
        let sq = x0.add(&f, &x1).pow(&f, 2);
        let l = expand(&f, &b, &sq).unwrap();
        assert_eq!(l.terms().map(|(i, c)| (i, c.clone())).collect::<Vec<_>>(), vec![(0, f.one()), (1, f.from_i64(2)), (2, f.one())]);
        let b3 = CoordinateBasis::enumerate(1, 3).unwrap();
        let l3 = expand(&f, &b3, &x0.mul(&f, &x1).mul(&f, &x0)).unwrap();
        assert_eq!(l3, LinearForm::coordinate(&f, 4, b3.index_of(&MultiIndex::new(vec![2, 1])).unwrap()));
        assert!(expand(&f, &b, &x0).is_err());
        assert!(expand(&f, &b, &sq.add(&f, &x0)).is_err());
    }

    #[test]
    fn q_of_examples() {
        let f = Rationals;
        let sec = AmbientSections::new(2, 2).unwrap();
        let one = Poly::constant(&f, 3, f.one());
        let q = sec.q_of(&f, &x(&f, 3, 0), &x(&f, 3, 1), &one).unwrap();
        let z = Vars::z(2, 2).unwrap();
        assert_eq!(q, parse_quadric(&f, "z200*z020 - z110^2", &z).unwrap());
        assert_eq!(q.rank(&f), 3);
        assert!(sec.q_of(&f, &x(&f, 3, 2), &x(&f, 3, 2), &one).unwrap().is_zero());
        assert!(sec.q_of(&f, &x(&f, 3, 2), &one, &one).is_err());
    }

    #[test]
    fn rnc_f_i() {
        // F_i = Q(s, t, s^{d-2-i} t^i) = z_i z_{i+2} - z_{i+1}^2 on the rational normal curve
        let f = Rationals;
        let d = 6u32;
        let sec = AmbientSections::new(1, d).unwrap();
        let s = x(&f, 2, 0);
        let t = x(&f, 2, 1);
        for i in 0..=(d - 2) as usize {
            let h = s.pow(&f, d - 2 - i as u32).mul(&f, &t.pow(&f, i as u32));
            let q = sec.q_of(&f, &s, &t, &h).unwrap();
            assert_eq!(q, QuadraticForm::binomial(&f, (d + 1) as usize, (i, i + 2), (i + 1, i + 1)));
        }
    }

    #[test]
    fn gamma_sizes() {
        let f = Rationals;
        let g = GeneratorSet::build(f, 2, 2).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.span().unwrap().dim(), 6);
        let labels: Vec<_> = g.elements().iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, ["Q(x0,x1,1)", "Q(x0,x2,1)", "Q(x1,x2,1)", "Q(x0+x1,x2,1)", "Q(x0+x2,x1,1)", "Q(x1+x2,x0,1)"]);

        let g = GeneratorSet::build(f, 3, 2).unwrap();
        assert_eq!((g.count(Part::G11), g.count(Part::G12), g.count(Part::G22)), (6, 12, 3));
        let g22: Vec<_> = g.elements().iter().filter(|e| e.part == Part::G22).map(|e| e.label.clone()).collect();
        assert_eq!(g22, ["Q(x0+x1,x2+x3,1)", "Q(x0+x2,x1+x3,1)", "Q(x0+x3,x1+x2,1)"]);
        assert_eq!(g.len() as u64, gamma_size_bound(4, 1));

        for d in 2..=7u32 {
            let g = GeneratorSet::build(f, 1, d).unwrap();
            assert_eq!(g.len() as u64, binomial(d as u64, 2));
            assert_eq!(g.span().unwrap().dim() as u64, binomial(d as u64, 2));
            assert_eq!(gamma_size_bound(2, d as u64 - 1), binomial(d as u64, 2));
        }
        assert_eq!(gamma_size_bound(2, 1), 1);
        assert!(GeneratorSet::build(f, 2, 1).is_err());
    }

    #[test]
    fn gamma_elements_rank_three_and_vanish() {
        let f = PrimeField::new(7).unwrap();
        for (n, d) in [(1, 4), (2, 2), (2, 3), (3, 2), (3, 3)] {
            let g = GeneratorSet::build(f, n, d).unwrap();
            let sec = g.sections();
            assert!(g.len() as u64 <= gamma_size_bound(sec.p() as u64, sec.q() as u64));
            for e in g.elements() {
                if !e.is_zero {
                    assert_eq!(e.form.rank(&f), 3, "{}", e.label);
                }
                assert!(e.form.pullback_to_veronese(&f, sec.coordinates()).is_zero());
            }
        }
    }

    #[test]
    fn flattening_examples() {
        let f = Rationals;
        let fl = Flattening::new(1, 2, 1).unwrap();
        assert_eq!(fl.shape(), (2, 2));
        let m = fl.minors2(&f);
        assert_eq!(m, vec![QuadraticForm::binomial(&f, 3, (0, 2), (1, 1))]);

        let fl = Flattening::new(3, 2, 1).unwrap();
        assert_eq!(fl.shape(), (4, 4));
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(fl.entry(r, c), fl.entry(c, r));
            }
        }
        assert_eq!(fl.entry_index(0, 1), &MultiIndex::new(vec![1, 1, 0, 0]));

        let fl = Flattening::new(2, 3, 1).unwrap();
        let minors = SpanBasis::from_vectors(f, 55, &fl.minors2(&f).iter().map(|q| q.as_vector(&f)).collect::<Vec<_>>()).unwrap();
        let q = binomial_generators(&f, 2, 3).unwrap();
        let qs = SpanBasis::from_vectors(f, 55, &q.iter().map(|q| q.as_vector(&f)).collect::<Vec<_>>()).unwrap();
        assert_eq!(minors.dim(), 27);
        assert!(minors.same_span(&qs));
        assert!(Flattening::new(2, 3, 3).is_err());
        assert!(Flattening::new(2, 3, 0).is_err());
    }
}
