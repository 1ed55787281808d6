//! Reading and printing polynomials.
//!
//! Expressions use `+ - * ^`, parentheses, integer or `a/b` coefficients and
//! implicit multiplication (`2x0x1`, `x3^2`, `x2²`). Variables are a single
//! letter followed by digits (`x0`, `y12`) or, for Veronese coordinates,
//! `z[a0,...,an]` and the compact `z1100` when every exponent is one digit.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{parse_rational, Field, Rationals};
use crate::multiindex::{CoordinateBasis, MultiIndex};
use crate::poly::Poly;
use crate::quadform::{LinearForm, QuadraticForm};

/// How variable names map to variable positions.
#[derive(Clone, Debug)]
pub enum Vars {
    /// `{prefix}{first}` through `{prefix}{first + count - 1}`.
    Indexed { prefix: char, first: usize, count: usize },
    /// The coordinates `z_I` of a Veronese ambient space.
    Coordinates(CoordinateBasis),
}

impl Vars {
    /// `x0, ..., xn`.
    pub fn x(n: usize) -> Self {
        Vars::Indexed {
            prefix: 'x',
            first: 0,
            count: n + 1,
        }
    }

    /// `y0, ..., y{count-1}`.
    pub fn y(count: usize) -> Self {
        Vars::Indexed {
            prefix: 'y',
            first: 0,
            count,
        }
    }

    pub fn z(n: usize, d: u32) -> Result<Self> {
        Ok(Vars::Coordinates(CoordinateBasis::enumerate(n, d)?))
    }

    pub fn count(&self) -> usize {
        match self {
            Vars::Indexed { count, .. } => *count,
            Vars::Coordinates(b) => b.len(),
        }
    }

    pub fn name(&self, i: usize) -> String {
        match self {
            Vars::Indexed { prefix, first, .. } => format!("{prefix}{}", first + i),
            Vars::Coordinates(b) => b.get(i).coordinate_name(),
        }
    }

    fn resolve(&self, name: &str) -> Option<usize> {
        match self {
            Vars::Indexed { prefix, first, count } => {
                let rest = name.strip_prefix(*prefix)?;
                if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
                    return None;
                }
                let k: usize = rest.parse().ok()?;
                (k >= *first && k < first + count).then(|| k - first)
            }
            Vars::Coordinates(b) => {
                let rest = name.strip_prefix('z')?;
                let m = if rest.starts_with('[') {
                    rest.parse::<MultiIndex>().ok()?
                } else if rest.len() == b.n() + 1 && rest.bytes().all(|c| c.is_ascii_digit()) {
                    MultiIndex::new(rest.bytes().map(|c| (c - b'0') as u32).collect())
                } else {
                    return None;
                };
                b.index_of(&m)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Pow(u32),
    Open,
    Close,
}

fn superscript(c: char) -> Option<u32> {
    Some(match c {
        '⁰' => 0,
        '¹' => 1,
        '²' => 2,
        '³' => 3,
        '⁴' => 4,
        '⁵' => 5,
        '⁶' => 6,
        '⁷' => 7,
        '⁸' => 8,
        '⁹' => 9,
        _ => return None,
    })
}

fn err(column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line: 1,
        column,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::Open,
            ')' => Tok::Close,
            _ if superscript(c).is_some() => {
                let mut e = 0u32;
                while let Some(v) = chars.get(i).copied().and_then(superscript) {
                    e = e * 10 + v;
                    i += 1;
                }
                out.push((Tok::Pow(e), col));
                continue;
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let r = parse_rational(&s).ok_or_else(|| err(col, format!("bad number `{s}`")))?;
                out.push((Tok::Num(r), col));
                continue;
            }
            _ if c.is_ascii_alphabetic() => {
                let start = i;
                i += 1;
                if c == 'z' && chars.get(i) == Some(&'[') {
                    while i < chars.len() && chars[i] != ']' {
                        i += 1;
                    }
                    if i == chars.len() {
                        return Err(err(col, "unterminated `z[`"));
                    }
                    i += 1;
                } else {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
                continue;
            }
            _ => return Err(err(col, format!("unexpected character `{c}`"))),
        };
        out.push((tok, col));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a Vars,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, c)| *c)
    }

    fn expr(&mut self) -> Result<Poly<Rationals>> {
        let f = Rationals;
        let mut acc = Poly::zero(self.vars.count());
        let mut sign = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -1
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc.sub(&f, &t) } else { acc.add(&f, &t) };
            sign = match self.peek() {
                Some(Tok::Plus) => 1,
                Some(Tok::Minus) => -1,
                _ => return Ok(acc),
            };
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Poly<Rationals>> {
        let f = Rationals;
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Open) => {}
                _ => return Ok(acc),
            }
            let next = self.factor()?;
            acc = acc.mul(&f, &next);
        }
    }

    fn factor(&mut self) -> Result<Poly<Rationals>> {
        let f = Rationals;
        let base = self.primary()?;
        let e = match self.peek() {
            Some(Tok::Caret) => {
                self.pos += 1;
                let col = self.column();
                match self.peek() {
                    Some(Tok::Num(r)) if r.is_integer() && *r >= BigRational::zero() => {
                        let e = r.to_integer().to_string().parse::<u32>().map_err(|_| err(col, "exponent too large"))?;
                        self.pos += 1;
                        e
                    }
                    _ => return Err(err(col, "expected a non-negative integer exponent")),
                }
            }
            Some(Tok::Pow(e)) => {
                let e = *e;
                self.pos += 1;
                e
            }
            _ => return Ok(base),
        };
        Ok(base.pow(&f, e))
    }

    fn primary(&mut self) -> Result<Poly<Rationals>> {
        let f = Rationals;
        let n = self.vars.count();
        let col = self.column();
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(constant(n, r))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let k = self
                    .vars
                    .resolve(&name)
                    .ok_or_else(|| err(col, format!("unknown variable `{name}`")))?;
                Ok(Poly::var(&f, n, k))
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::Close) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(err(self.column(), "expected `)`")),
                }
            }
            Some(t) => Err(err(col, format!("unexpected token {t:?}"))),
            None => Err(err(col, "unexpected end of input")),
        }
    }
}

fn constant(nvars: usize, r: BigRational) -> Poly<Rationals> {
    Poly::from_terms(&Rationals, nvars, [(MultiIndex::zero(nvars - 1), r)])
}

/// Parses an expression into a polynomial with rational coefficients.
pub fn parse_rational_poly(src: &str, vars: &Vars) -> Result<Poly<Rationals>> {
    let toks = lex(src)?;
    let end = src.chars().count() + 1;
    if toks.is_empty() {
        return Err(err(end, "empty expression"));
    }
    let mut p = Parser { toks, pos: 0, vars, end };
    let poly = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err(p.column(), "trailing input"));
    }
    Ok(poly)
}

/// Image of a rational polynomial in another field.
pub fn to_field<F: Field>(f: &F, p: &Poly<Rationals>) -> Result<Poly<F>> {
    let mut out = Poly::zero(p.nvars());
    for (m, c) in p.terms() {
        let c = f
            .from_rational(c)
            .ok_or_else(|| Error::InvalidArgument(format!("coefficient {c} has a denominator divisible by {}", f.characteristic())))?;
        out.add_term(f, m.clone(), c);
    }
    Ok(out)
}

pub fn parse_poly<F: Field>(f: &F, src: &str, vars: &Vars) -> Result<Poly<F>> {
    to_field(f, &parse_rational_poly(src, vars)?)
}

/// Parses a homogeneous quadric in the given coordinates.
pub fn parse_quadric<F: Field>(f: &F, src: &str, vars: &Vars) -> Result<QuadraticForm<F>> {
    let p = parse_poly(f, src, vars)?;
    p.check_degree(2)?;
    Ok(quadric_from_poly(f, &p))
}

/// A homogeneous degree-2 polynomial as a quadratic form.
pub fn quadric_from_poly<F: Field>(f: &F, p: &Poly<F>) -> QuadraticForm<F> {
    QuadraticForm::from_terms(
        f,
        p.nvars(),
        p.terms().map(|(m, c)| {
            let mut vars = m.exponents().iter().enumerate().flat_map(|(k, &e)| std::iter::repeat_n(k, e as usize));
            let i = vars.next().expect("degree 2");
            let j = vars.next().expect("degree 2");
            ((i, j), c.clone())
        }),
    )
}

pub fn quadric_to_poly<F: Field>(f: &F, q: &QuadraticForm<F>) -> Poly<F> {
    let n = q.dim();
    Poly::from_terms(
        f,
        n,
        q.terms().map(|((i, j), c)| {
            let mut e = vec![0u32; n];
            e[i] += 1;
            e[j] += 1;
            (MultiIndex::new(e), c.clone())
        }),
    )
}

pub fn linear_to_poly<F: Field>(f: &F, l: &LinearForm<F>) -> Poly<F> {
    let n = l.dim();
    Poly::from_terms(f, n, l.terms().map(|(i, c)| (MultiIndex::unit(n - 1, i), c.clone())))
}

/// Canonical text: terms in graded-lex descending order, unit coefficients
/// omitted, `*` between factors.
pub fn format_poly<F: Field>(_f: &F, p: &Poly<F>, vars: &Vars) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let mut coeff = c.to_string();
        let negative = coeff.starts_with('-');
        if negative {
            coeff.remove(0);
        }
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mono = format_monomial(m, vars);
        match (mono.is_empty(), coeff == "1") {
            (true, _) => out.push_str(&coeff),
            (false, true) => out.push_str(&mono),
            (false, false) => {
                let _ = write!(out, "{coeff}*{mono}");
            }
        }
    }
    out
}

fn format_monomial(m: &MultiIndex, vars: &Vars) -> String {
    let mut parts = Vec::new();
    for (k, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vars.name(k)),
            _ => parts.push(format!("{}^{e}", vars.name(k))),
        }
    }
    parts.join("*")
}

pub fn format_quadric<F: Field>(f: &F, q: &QuadraticForm<F>, vars: &Vars) -> String {
    format_poly(f, &quadric_to_poly(f, q), vars)
}

pub fn format_linear<F: Field>(f: &F, l: &LinearForm<F>, vars: &Vars) -> String {
    format_poly(f, &linear_to_poly(f, l), vars)
}

/// Parses a coefficient such as `-3/4` into the field.
pub fn parse_scalar<F: Field>(f: &F, s: &str) -> Result<F::Elem> {
    let r = parse_rational(s.trim()).ok_or_else(|| Error::InvalidArgument(format!("bad scalar `{s}`")))?;
    f.from_rational(&r)
        .ok_or_else(|| Error::InvalidArgument(format!("scalar {s} is undefined in characteristic {}", f.characteristic())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use proptest::prelude::*;

    #[test]
    fn parses_subscripted_input() {
        let f = Rationals;
        let vars = Vars::Indexed {
            prefix: 'x',
            first: 1,
            count: 6,
        };
        let q6 = parse_poly(&f, "x5² − x6x1 + 2x6x2 + x6x3 − 2x6x4", &vars).unwrap();
        assert_eq!(q6.len(), 5);
        assert_eq!(q6.homogeneous_degree().unwrap(), Some(2));
        assert_eq!(
            format_poly(&f, &q6, &vars),
            "-x1*x6 + 2*x2*x6 + x3*x6 - 2*x4*x6 + x5^2"
        );
    }

    #[test]
    fn parentheses_and_powers() {
        let f = Rationals;
        let v = Vars::x(1);
        let p = parse_poly(&f, "(x0+x1)^2", &v).unwrap();
        assert_eq!(format_poly(&f, &p, &v), "x0^2 + 2*x0*x1 + x1^2");
        let q = parse_poly(&f, "1/2 x0 x1 - 3", &v).unwrap();
        assert_eq!(format_poly(&f, &q, &v), "1/2*x0*x1 - 3");
    }

    #[test]
    fn coordinates() {
        let f = Rationals;
        let v = Vars::z(3, 2).unwrap();
        let a = parse_quadric(&f, "z1100*z0011 - z1010*z0101", &v).unwrap();
        let b = parse_quadric(&f, "z[1,1,0,0] z[0,0,1,1] - z[1,0,1,0] z[0,1,0,1]", &v).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rank(&f), 4);
        assert_eq!(
            format_quadric(&f, &a, &v),
            "z[1,1,0,0]*z[0,0,1,1] - z[1,0,1,0]*z[0,1,0,1]"
        );
    }

    #[test]
    fn errors_carry_columns() {
        let f = Rationals;
        let v = Vars::x(2);
        match parse_poly(&f, "x0 + x7", &v) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_poly(&f, "x0 +", &v).is_err());
        assert!(parse_poly(&f, "(x0", &v).is_err());
        assert!(parse_poly(&f, "x0 $", &v).is_err());
        assert!(parse_quadric(&f, "x0^2 + x1", &v).is_err());
        assert!(parse_poly(&PrimeField::new(3).unwrap(), "1/3 x0", &v).is_err());
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(terms in proptest::collection::vec(((0u32..3, 0u32..3, 0u32..3), -20i64..20, 1i64..5), 0..6)) {
            let f = Rationals;
            let v = Vars::x(2);
            let p = Poly::from_terms(&f, 3, terms.iter().map(|&((a, b, c), num, den)| {
                (MultiIndex::new(vec![a, b, c]), BigRational::new(num.into(), den.into()))
            }));
            let s = format_poly(&f, &p, &v);
            prop_assert_eq!(parse_poly(&f, &s, &v).unwrap(), p.clone());
            let g = PrimeField::new(7).unwrap();
            let pg = to_field(&g, &p).unwrap();
            prop_assert_eq!(parse_poly(&g, &format_poly(&g, &pg, &v), &v).unwrap(), pg);
        }
    }
}
