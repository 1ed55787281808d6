//! `X_d` as a linear section of the Veronese variety `V_{n,d}`.
//!
//! The degree-`d` part of `I(X)` is a space of linear forms in the Veronese
//! coordinates `z_I`; solving it for its echelon pivots leaves the free
//! coordinates `y_0..y_r` of `ℙ^{r(d)}`. Quadrics on the big ambient restrict
//! by substituting the pivots away.

use std::collections::HashSet;

use crate::certify::{check_gamma_size, Certificate, Coordinates, QuadricDims, Spanning, Status, Witness};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::idealfile::IdealPresentation;
use crate::multiindex::{binomial, CoordinateBasis};
use crate::par;
use crate::poly::Poly;
use crate::qmap::{Flattening, GeneratorSet};
use crate::quadform::{binomial_generators, LinearForm, PairBasis, QuadraticForm};
use crate::span::{ideal_degree_part, SpanBasis, SparseVector};
use crate::text::{format_quadric, Vars};

#[derive(Clone, Debug)]
pub struct LinearSection<F: Field> {
    coords: CoordinateBasis,
    linear: SpanBasis<F>,
    free: Vec<usize>,
    images: Vec<LinearForm<F>>,
}

impl<F: Field> LinearSection<F> {
    pub fn coordinates(&self) -> &CoordinateBasis {
        &self.coords
    }

    /// The degree-`d` forms of the ideal, as linear forms in `z`.
    pub fn linear_part(&self) -> &SpanBasis<F> {
        &self.linear
    }

    /// Big-ambient coordinates that survive as `y_0, y_1, ...`.
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    /// `r(d)`, the dimension of the section.
    pub fn r(&self) -> usize {
        self.free.len() - 1
    }

    /// Image of each `z_I` in the section coordinates.
    pub fn images(&self) -> &[LinearForm<F>] {
        &self.images
    }

    pub fn restrict(&self, f: &F, q: &QuadraticForm<F>) -> Result<QuadraticForm<F>> {
        if q.dim() != self.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coords.len(),
                got: q.dim(),
            });
        }
        Ok(q.substitute(f, &self.images, self.free.len()))
    }
}

/// Builds the section for `(X, d)`; refuses `d < m`.
pub fn build_section<F: Field>(f: &F, x: &IdealPresentation, d: u32) -> Result<LinearSection<F>> {
    if d < x.m {
        return Err(Error::Hypothesis(format!("d = {d} is below the regularity bound m = {}", x.m)));
    }
    let gens = x.generators_in(f)?;
    let coords = CoordinateBasis::enumerate(x.n, d)?;
    let linear = ideal_degree_part(f, x.n, &gens, d)?;
    let pivots: HashSet<usize> = linear.pivot_columns().iter().copied().collect();
    let free: Vec<usize> = (0..coords.len()).filter(|i| !pivots.contains(i)).collect();
    if free.is_empty() {
        return Err(Error::Hypothesis("the ideal contains every form of degree d; X is empty".into()));
    }
    let mut slot = vec![usize::MAX; coords.len()];
    for (k, &i) in free.iter().enumerate() {
        slot[i] = k;
    }
    let images = (0..coords.len())
        .map(|i| match linear.row_for_pivot(i) {
            // z_i + Σ c_j z_j = 0 on the section, with every j free
            Some(row) => LinearForm::from_terms(
                f,
                free.len(),
                row.entries().iter().filter(|(j, _)| *j != i).map(|(j, c)| (slot[*j], f.neg(c))),
            ),
            None => LinearForm::coordinate(f, free.len(), slot[i]),
        })
        .collect();
    Ok(LinearSection {
        coords,
        linear,
        free,
        images,
    })
}

/// `dim S_e - dim I(X)_e`.
pub fn hilbert_function<F: Field>(f: &F, x: &IdealPresentation, e: u32) -> Result<usize> {
    let gens = x.generators_in(f)?;
    let total = binomial(x.n as u64 + e as u64, x.n as u64) as usize;
    Ok(total - ideal_degree_part(f, x.n, &gens, e)?.dim())
}

/// Quadrics in the section coordinates vanishing on `X_d`, counted
/// directly: the kernel of `y_a y_b ↦ x^{I_a + I_b}` modulo `I(X)_{2d}`.
pub fn quadric_kernel_dim<F: Field>(f: &F, x: &IdealPresentation, section: &LinearSection<F>) -> Result<usize> {
    let gens = x.generators_in(f)?;
    let d = section.coords.degree();
    let big = CoordinateBasis::enumerate(x.n, 2 * d)?;
    let ideal = ideal_degree_part(f, x.n, &gens, 2 * d)?;
    let k = section.free.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
    let residuals = par::map(&pairs, |&(a, b)| {
        let m = section.coords.get(section.free[a]).add(section.coords.get(section.free[b]));
        let v = SparseVector::from_entries(f, big.len(), vec![(big.index_of(&m).expect("degree 2d"), f.one())]);
        ideal.residual(&v)
    });
    let image = SpanBasis::from_vectors(f.clone(), big.len(), &residuals)?;
    Ok(pairs.len() - image.dim())
}

fn check_characteristic<F: Field>(f: &F) -> Result<()> {
    match f.characteristic() {
        2 => Err(Error::CharacteristicTwo),
        3 => Err(Error::Hypothesis("re-embedding needs characteristic other than 2 and 3".into())),
        _ => Ok(()),
    }
}

/// Certifies that the restricted Γ(n,d) consists of quadrics of rank at
/// most 3 spanning `I(X_d)₂`.
pub fn verify_qr3_reembedding<F: Field>(f: &F, x: &IdealPresentation, d: u32) -> Result<Certificate> {
    check_characteristic(f)?;
    let section = build_section(f, x, d)?;
    check_gamma_size(x.n, d)?;
    let r = section.r();
    let coords = Coordinates::Section { count: r + 1 };
    let vars = Vars::y(r + 1);
    let mut cert = Certificate::new("qr3_reembedding", f.spec())
        .input("n", x.n)
        .input("d", d)
        .input("m", x.m)
        .input("generators", x.generators.len());
    cert.coordinates = Some(coords);

    let gamma = GeneratorSet::build(f.clone(), x.n, d)?;
    let restricted: Vec<QuadraticForm<F>> = par::map(gamma.elements(), |e| section.restrict(f, &e.form).expect("same ambient"));
    let ranks = crate::certify::ranks(f, &restricted);
    let pair_dim = PairBasis::new(r + 1).len();
    let vecs: Vec<SparseVector<F>> = par::map(&restricted, |q| q.as_vector(f));
    let mut seen = HashSet::new();
    let duplicates = vecs.iter().filter(|v| !v.is_zero() && !seen.insert(*v)).count();
    let span = SpanBasis::from_vectors(f.clone(), pair_dim, &vecs)?;

    let hf_d = hilbert_function(f, x, d)?;
    let hf_2d = hilbert_function(f, x, 2 * d)?;
    let target = (binomial(r as u64 + 2, 2) as usize)
        .checked_sub(hf_2d)
        .ok_or_else(|| Error::Hypothesis("Hilbert function exceeds the quadric count".into()))?;
    let kernel = quadric_kernel_dim(f, x, &section)?;

    let dims = QuadricDims {
        coordinates: r + 1,
        gamma_elements: restricted.len(),
        gamma_zero: restricted.iter().filter(|q| q.is_zero()).count(),
        gamma_duplicates: duplicates,
        gamma_span: span.dim(),
        ideal_quadrics: target,
        max_gamma_rank: ranks.iter().copied().max().unwrap_or(0),
    };
    cert.set("dims", &dims);
    cert.set("r", r);
    cert.set("r_from_hilbert_function", hf_d - 1);
    cert.set("linear_part", section.linear.dim());
    cert.set("hilbert_function_2d", hf_2d);
    cert.set("quadric_kernel", kernel);

    let mut ok = true;
    if hf_d != r + 1 || kernel != target {
        ok = false;
        cert.notes.push("hypothesis inconsistency: the linear-part and Hilbert-function counts disagree".into());
    }
    for (e, (&rank, q)) in gamma.elements().iter().zip(ranks.iter().zip(&restricted)) {
        if rank > 3 {
            ok = false;
            cert.witnesses.push(Witness::RankExceeds {
                label: e.label.clone(),
                form: format_quadric(f, q, &vars),
                rank,
                bound: 3,
            });
        }
    }
    // The restricted binomials span I(X_d)₂ when X_d is cut out by the section.
    let binomials = binomial_generators(f, x.n, d)?;
    let restricted_q: Vec<QuadraticForm<F>> = par::map(&binomials, |q| section.restrict(f, q).expect("same ambient"));
    let qspan = SpanBasis::from_vectors(f.clone(), pair_dim, &par::map(&restricted_q, |q| q.as_vector(f)))?;
    cert.set("restricted_binomial_span", qspan.dim());
    if span.dim() != target {
        ok = false;
        if let Some(q) = restricted_q.iter().find(|q| !span.contains_vector(&q.as_vector(f))) {
            let forms = span.rows().iter().map(|v| format_quadric(f, &QuadraticForm::from_vector(f, r + 1, v), &vars)).collect();
            cert.witnesses.push(Witness::OutsideSpan {
                label: "restricted binomial".into(),
                target: format_quadric(f, q, &vars),
                spanning: Spanning::Explicit { forms },
            });
        }
    }
    if d >= 2 {
        let minors = Flattening::new(x.n, d, 1)?.minors2(f);
        let restricted_m = par::map(&minors, |q| section.restrict(f, q).expect("same ambient").as_vector(f));
        let mspan = SpanBasis::from_vectors(f.clone(), pair_dim, &restricted_m)?;
        cert.set("restricted_minor_span", mspan.dim());
        ok &= mspan.dim() == target;
    }
    cert.status = if ok { Status::Verified } else { Status::Refuted };
    Ok(cert)
}

/// Restriction of a form given as a polynomial in `z`; convenience for
/// callers holding text.
pub fn restrict_poly<F: Field>(f: &F, section: &LinearSection<F>, q: &Poly<F>) -> Result<QuadraticForm<F>> {
    if q.nvars() != section.coords.len() {
        return Err(Error::DimensionMismatch {
            expected: section.coords.len(),
            got: q.nvars(),
        });
    }
    q.check_degree(2)?;
    section.restrict(f, &crate::text::quadric_from_poly(f, q))
}
