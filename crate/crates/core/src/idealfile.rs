//! Text format for homogeneous ideals.
//!
//! ```text
//! # twisted cubic
//! n: 3
//! char: 0
//! m: 2
//! x0*x2 - x1^2
//! x0*x3 - x1*x2
//! x1*x3 - x2^2
//! ```
//!
//! Header lines are `key: value` with keys `n` (required), `char`
//! (default 0), `m` (default: the largest generator degree, at least 1)
//! and `vars` (default `x0..xn`; e.g. `vars: x1..x6` for one-based names).
//! Every other non-empty line is one homogeneous generator; `#` starts a
//! comment.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec, Rationals};
use crate::poly::Poly;
use crate::text::{format_poly, parse_rational_poly, to_field, Vars};

#[derive(Clone, Debug)]
pub struct IdealPresentation {
    pub n: usize,
    pub field: FieldSpec,
    /// Caller-asserted bound: normal in every degree `≥ m` and generated in
    /// degrees `≤ m`.
    pub m: u32,
    pub vars: Vars,
    pub generators: Vec<Poly<Rationals>>,
}

impl IdealPresentation {
    /// `ℙⁿ` itself: no generators.
    pub fn projective_space(n: usize, field: FieldSpec) -> Self {
        IdealPresentation {
            n,
            field,
            m: 1,
            vars: Vars::x(n),
            generators: Vec::new(),
        }
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.generators
            .iter()
            .map(|g| g.homogeneous_degree().ok().flatten().unwrap_or(0))
            .collect()
    }

    /// Generators reduced into `f`; fails when a denominator vanishes there.
    pub fn generators_in<F: Field>(&self, f: &F) -> Result<Vec<Poly<F>>> {
        self.generators.iter().map(|g| to_field(f, g)).collect()
    }

    /// Canonical text form; parsing it gives back an equal presentation.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n: {}", self.n).unwrap();
        writeln!(out, "char: {}", self.field.characteristic()).unwrap();
        writeln!(out, "m: {}", self.m).unwrap();
        if let Vars::Indexed { prefix, first, count } = self.vars {
            if prefix != 'x' || first != 0 {
                writeln!(out, "vars: {prefix}{first}..{prefix}{}", first + count - 1).unwrap();
            }
        }
        for g in &self.generators {
            writeln!(out, "{}", format_poly(&Rationals, g, &self.vars)).unwrap();
        }
        out
    }
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_vars(value: &str, line: usize, column: usize) -> Result<Vars> {
    let bad = || parse_error(line, column, format!("expected vars like x0..x5, got '{value}'"));
    let (a, b) = value.split_once("..").ok_or_else(bad)?;
    let split = |s: &str| -> Option<(char, usize)> {
        let mut chars = s.trim().chars();
        let prefix = chars.next().filter(|c| c.is_ascii_alphabetic())?;
        Some((prefix, chars.as_str().parse().ok()?))
    };
    let ((p1, first), (p2, last)) = (split(a).ok_or_else(bad)?, split(b).ok_or_else(bad)?);
    if p1 != p2 || last < first {
        return Err(bad());
    }
    Ok(Vars::Indexed {
        prefix: p1,
        first,
        count: last - first + 1,
    })
}

impl FromStr for IdealPresentation {
    type Err = Error;

    fn from_str(src: &str) -> Result<Self> {
        let mut n = None;
        let mut field = FieldSpec::Rationals;
        let mut m = None;
        let mut vars = None;
        let mut body: Vec<(usize, usize, &str)> = Vec::new();
        for (k, raw) in src.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim_start();
            let indent = content.len() - trimmed.len();
            let trimmed = trimmed.trim_end();
            if trimmed.is_empty() {
                continue;
            }
            if let Some((key, value)) = trimmed.split_once(':') {
                let value_col = indent + key.len() + 2 + (value.len() - value.trim_start().len());
                let value = value.trim();
                if !body.is_empty() {
                    return Err(parse_error(line, indent + 1, "header lines must precede the generators"));
                }
                let number = || -> Result<u64> {
                    value
                        .parse()
                        .map_err(|_| parse_error(line, value_col, format!("expected a non-negative integer, got '{value}'")))
                };
                match key.trim() {
                    "n" => n = Some(number()? as usize),
                    "char" => {
                        field = FieldSpec::new(number()?)
                            .map_err(|e| parse_error(line, value_col, format!("bad characteristic: {e}")))?;
                    }
                    "m" => m = Some(number()? as u32),
                    "vars" => vars = Some(parse_vars(value, line, value_col)?),
                    other => return Err(parse_error(line, indent + 1, format!("unknown header key '{other}'"))),
                }
                continue;
            }
            body.push((line, indent, trimmed));
        }
        let n = n.ok_or_else(|| parse_error(1, 1, "missing header 'n: <ambient dimension>'"))?;
        if n == 0 {
            return Err(parse_error(1, 1, "n must be at least 1"));
        }
        let vars = vars.unwrap_or_else(|| Vars::x(n));
        if vars.count() != n + 1 {
            return Err(parse_error(1, 1, format!("vars name {} variables but n = {n} needs {}", vars.count(), n + 1)));
        }
        let mut generators = Vec::with_capacity(body.len());
        let mut max_degree = 1;
        for (line, indent, text) in body {
            let g = parse_rational_poly(text, &vars).map_err(|e| match e {
                Error::Parse { column, message, .. } => parse_error(line, indent + column, message),
                other => other,
            })?;
            match g.homogeneous_degree() {
                Ok(Some(deg)) => max_degree = max_degree.max(deg),
                Ok(None) => return Err(parse_error(line, indent + 1, "zero generator")),
                Err(_) => return Err(parse_error(line, indent + 1, "inhomogeneous polynomial: terms of different degrees")),
            }
            generators.push(g);
        }
        let m = m.unwrap_or(max_degree);
        if m < max_degree {
            return Err(parse_error(1, 1, format!("m = {m} is below the largest generator degree {max_degree}")));
        }
        let pres = IdealPresentation {
            n,
            field,
            m,
            vars,
            generators,
        };
        if let FieldSpec::Prime(p) = field {
            let f = crate::field::PrimeField::new(p)?;
            pres.generators_in(&f)?;
        }
        Ok(pres)
    }
}
