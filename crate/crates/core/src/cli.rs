//! Command-line front end. [`dispatch`] turns an argument list into
//! certificate documents and an exit code: 0 verified, 1 refuted, 2 usage or
//! precondition error.

use std::path::Path;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;

use crate::certify::{self, Certificate, Coordinates, Inclusion, RelationInstance, RelationKind, Status};
use crate::document::{replay_certificate, CertificateDocument};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::idealfile::IdealPresentation;
use crate::multiindex::{CoordinateBasis, MultiIndex};
use crate::par;
use crate::qmap::GeneratorSet;
use crate::quadform::binomial_generators;
use crate::reembed::verify_qr3_reembedding;
use crate::text::{format_quadric, parse_quadric, quadric_from_poly, to_field, Vars};
use crate::with_field;

/// Ideal files shipped with the crate, addressable as `fixture:<name>`.
pub const FIXTURES: [(&str, &str); 4] = [
    ("canonical_curve", include_str!("../fixtures/canonical_curve.ideal")),
    ("conic", include_str!("../fixtures/conic.ideal")),
    ("elliptic_quartic", include_str!("../fixtures/elliptic_quartic.ideal")),
    ("twisted_cubic", include_str!("../fixtures/twisted_cubic.ideal")),
];

#[derive(Parser, Debug)]
#[command(name = "qr3", version, about = "Certify rank-3 quadratic generation of Veronese embeddings and re-embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Field characteristic: 0 for ℚ, or an odd prime.
    #[arg(long = "char", default_value_t = 0)]
    pub characteristic: u64,
    /// Seed for randomized commands.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Range of instances, e.g. `1-3:2-4` for n ∈ 1..=3, d ∈ 2..=4, or `2,5:2`.
    /// `rnc` takes a single range of d.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Γ spans the quadrics of the Veronese variety and has rank 3.
    Veronese {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Independent rank-3 generators of the rational normal curve.
    Rnc {
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Checks every binomial z_I z_J - z_K z_L against span Γ separately.
    EquivAll {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Monomial relations modulo span Γ, one instance or whole families.
    Relations {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        d: u32,
        /// Family name (exchange1..exchange6, shift311, shift1221, shift1100) or `all`.
        #[arg(long, default_value = "all")]
        relation: String,
        /// Positions i,j,... for a single instance.
        #[arg(long)]
        positions: Option<String>,
        /// Multi-indices for a single instance, e.g. `1,0,0;0,1,0`.
        #[arg(long)]
        indices: Option<String>,
        /// Number of degree d-2 multi-indices sampled per family.
        #[arg(long, default_value_t = 20)]
        sample: usize,
        /// Report families that divide by 3 in characteristic 3 instead of refusing.
        #[arg(long)]
        lenient: bool,
        #[command(flatten)]
        common: Common,
    },
    /// σ(Q(s,t,h)) = Q(σs,σt,σh) for random invertible σ.
    PglCheck {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Characteristic 3: Γ spans for n ≤ 2 and falls short for n ≥ 3 (d = 2).
    Char3 {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Rank of a quadric given as text, or of every generator in `--file`.
    Rank {
        /// Quadric in x0..xn, or in z coordinates when --d is given.
        expression: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        file: Option<String>,
        /// Refute when some rank exceeds this bound.
        #[arg(long)]
        bound: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Random elements of the quadric span; every rank ≤ 3 hit must lie in
    /// the span of the low-rank generators (or of Γ with --n/--d).
    Rank3Search {
        #[arg(long)]
        file: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Rank-3 generation of I(X_d) through the Veronese linear section.
    Reembed {
        #[arg(long)]
        file: String,
        #[arg(long)]
        d: Option<u32>,
        /// Overrides the file's regularity bound.
        #[arg(long)]
        m: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// 2-minors of a catalecticant matrix span the Veronese quadrics.
    Flattening {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        /// Row degree of the catalecticant matrix.
        #[arg(long, default_value_t = 1)]
        a: u32,
        #[command(flatten)]
        common: Common,
    },
    /// The inclusion of a smaller instance maps Γ into span Γ.
    Inclusion {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        d: u32,
        /// `iota` (add a variable) or `delta` (raise the degree).
        #[arg(long, default_value = "iota")]
        map: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Re-checks the witnesses of a certificate document.
    Replay {
        #[arg(long)]
        file: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Veronese { .. } => "veronese",
            Command::Rnc { .. } => "rnc",
            Command::EquivAll { .. } => "equiv-all",
            Command::Relations { .. } => "relations",
            Command::PglCheck { .. } => "pgl-check",
            Command::Char3 { .. } => "char3",
            Command::Rank { .. } => "rank",
            Command::Rank3Search { .. } => "rank3-search",
            Command::Reembed { .. } => "reembed",
            Command::Flattening { .. } => "flattening",
            Command::Inclusion { .. } => "inclusion",
            Command::Replay { .. } => "replay",
        }
    }
}

/// Result of a command line.
#[derive(Debug)]
pub struct Outcome {
    pub documents: Vec<CertificateDocument>,
    pub exit_code: i32,
    /// Usage or precondition message for standard error.
    pub error: Option<String>,
    /// Grid runs print one compact document per line.
    pub lines: bool,
}

impl Outcome {
    /// Standard output: one pretty document, or one line per grid instance.
    pub fn stdout(&self) -> String {
        if self.lines {
            self.documents.iter().map(|d| d.to_json_line() + "\n").collect()
        } else {
            self.documents.iter().map(|d| d.to_json() + "\n").collect()
        }
    }
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Verified => 0,
        Status::Refuted | Status::Inconclusive => 1,
    }
}

/// Parses and runs a command line (`args[0]` is the program name).
pub fn dispatch<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome {
                documents: Vec::new(),
                exit_code: code,
                error: Some(e.to_string()),
                lines: false,
            };
        }
    };
    let name = cli.command.name();
    let grid = is_grid(&cli.command);
    match run(&cli.command) {
        Ok(timed) => {
            let exit_code = timed.iter().map(|(c, _)| exit_code(c.status)).max().unwrap_or(0);
            let documents = timed
                .into_iter()
                .map(|(c, ms)| {
                    let mut doc = CertificateDocument::new(name, c);
                    doc.elapsed_ms = Some(ms);
                    doc
                })
                .collect::<Vec<_>>();
            Outcome {
                documents,
                exit_code,
                error: None,
                lines: grid,
            }
        }
        Err(e) => Outcome {
            documents: Vec::new(),
            exit_code: 2,
            error: Some(format!("error: {e}")),
            lines: false,
        },
    }
}

fn is_grid(cmd: &Command) -> bool {
    match cmd {
        Command::Veronese { common, .. }
        | Command::Rnc { common, .. }
        | Command::EquivAll { common, .. }
        | Command::Relations { common, .. }
        | Command::PglCheck { common, .. }
        | Command::Flattening { common, .. } => common.grid.is_some(),
        _ => false,
    }
}

fn timed(f: impl FnOnce() -> Result<Certificate>) -> Result<(Certificate, u64)> {
    let start = Instant::now();
    let c = f()?;
    Ok((c, start.elapsed().as_millis() as u64))
}

fn parse_range(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidArgument(format!("bad range '{s}'"));
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

/// `n-range:d-range` into instances, `n` outermost.
pub fn parse_grid(s: &str) -> Result<Vec<(usize, u32)>> {
    let (ns, ds) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("grid '{s}' must look like 1-3:2-4")))?;
    let (ns, ds) = (parse_range(ns)?, parse_range(ds)?);
    Ok(ns.iter().flat_map(|&n| ds.iter().map(move |&d| (n as usize, d as u32))).collect())
}

/// Runs one instance per grid point (or the single `(n, d)`).
fn over_grid(
    common: &Common,
    n: usize,
    d: u32,
    job: impl Fn(FieldSpec, usize, u32) -> Result<Certificate> + Sync,
) -> Result<Vec<(Certificate, u64)>> {
    let spec = FieldSpec::new(common.characteristic)?;
    let points = match &common.grid {
        Some(g) => parse_grid(g)?,
        None => vec![(n, d)],
    };
    par::map(&points, |&(n, d)| timed(|| job(spec, n, d))).into_iter().collect()
}

fn load_ideal(source: &str) -> Result<IdealPresentation> {
    let text = match source.strip_prefix("fixture:") {
        Some(name) => FIXTURES
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown fixture '{name}'")))?,
        None => std::fs::read_to_string(Path::new(source)).map_err(|e| Error::InvalidArgument(format!("cannot read {source}: {e}")))?,
    };
    text.parse()
}

fn parse_positions(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad position '{p}'"))))
        .collect()
}

fn parse_indices(s: &str) -> Result<Vec<MultiIndex>> {
    s.split(';').map(|m| m.trim().parse()).collect()
}

fn kinds(name: &str) -> Result<Vec<RelationKind>> {
    if name == "all" {
        return Ok(RelationKind::ALL.to_vec());
    }
    name.split(',')
        .map(|k| RelationKind::parse(k.trim()).ok_or_else(|| Error::InvalidArgument(format!("unknown relation '{k}'"))))
        .collect()
}

/// A fixed, seed-determined sample of `A(n, e)`; all of it when small.
pub fn sample_indices(n: usize, e: u32, size: usize, seed: u64) -> Result<Vec<MultiIndex>> {
    let mut all: Vec<MultiIndex> = CoordinateBasis::enumerate(n, e)?.iter().cloned().collect();
    if all.len() > size {
        all.shuffle(&mut certify::trial_rng(seed, 0));
        all.truncate(size);
        all.sort();
        all.reverse();
    }
    Ok(all)
}

fn run(cmd: &Command) -> Result<Vec<(Certificate, u64)>> {
    match cmd {
        Command::Veronese { n, d, common } => {
            over_grid(common, *n, *d, |spec, n, d| with_field!(spec, |f| certify::verify_qr3_veronese(&f, n, d)))
        }
        Command::Rnc { d, common } => {
            let spec = FieldSpec::new(common.characteristic)?;
            let ds = match &common.grid {
                Some(g) => parse_range(g.rsplit(':').next().unwrap_or(g))?.into_iter().map(|d| d as u32).collect(),
                None => vec![*d],
            };
            par::map(&ds, |&d| timed(|| with_field!(spec, |f| certify::verify_rnc(&f, d)))).into_iter().collect()
        }
        Command::EquivAll { n, d, common } => {
            over_grid(common, *n, *d, |spec, n, d| with_field!(spec, |f| certify::verify_equiv_all(&f, n, d)))
        }
        Command::Relations {
            n,
            d,
            relation,
            positions,
            indices,
            sample,
            lenient,
            common,
        } => {
            let kinds = kinds(relation)?;
            match (positions, indices) {
                (None, None) => over_grid(common, *n, *d, |spec, n, d| {
                    let picked = match d.checked_sub(2) {
                        Some(e) => Some(sample_indices(n, e, *sample, common.seed)?),
                        None => None,
                    };
                    with_field!(spec, |f| certify::verify_relation_suite(&f, n, d, &kinds, picked.as_deref(), !lenient))
                }),
                (p, i) => {
                    let [kind] = kinds[..] else {
                        return Err(Error::InvalidArgument("a single instance needs one --relation".into()));
                    };
                    let inst = RelationInstance::new(
                        kind,
                        p.as_deref().map(parse_positions).transpose()?.unwrap_or_default(),
                        i.as_deref().map(parse_indices).transpose()?.unwrap_or_default(),
                    );
                    let spec = FieldSpec::new(common.characteristic)?;
                    Ok(vec![timed(|| with_field!(spec, |f| certify::verify_relation(&f, *n, *d, &inst, !lenient)))?])
                }
            }
        }
        Command::PglCheck { n, d, samples, common } => over_grid(common, *n, *d, |spec, n, d| {
            with_field!(spec, |f| certify::pgl_check(&f, n, d, *samples, common.seed))
        }),
        Command::Char3 { n } => Ok(vec![timed(|| certify::char3_dichotomy(*n))?]),
        Command::Rank {
            expression,
            n,
            d,
            file,
            bound,
            common,
        } => Ok(vec![timed(|| rank_command(expression.as_deref(), *n, *d, file.as_deref(), *bound, common))?]),
        Command::Rank3Search { file, n, d, samples, common } => {
            Ok(vec![timed(|| rank3_command(file.as_deref(), *n, *d, *samples, common))?])
        }
        Command::Reembed { file, d, m, common } => {
            let mut x = load_ideal(file)?;
            if let Some(m) = m {
                x.m = *m;
            }
            let spec = if common.characteristic != 0 {
                FieldSpec::new(common.characteristic)?
            } else {
                x.field
            };
            let d = d.unwrap_or(x.m);
            Ok(vec![timed(|| with_field!(spec, |f| verify_qr3_reembedding(&f, &x, d)))?])
        }
        Command::Flattening { n, d, a, common } => {
            over_grid(common, *n, *d, |spec, n, d| with_field!(spec, |f| certify::verify_flattening(&f, n, d, *a)))
        }
        Command::Inclusion { n, d, map, k, common } => {
            let kind = match map.as_str() {
                "iota" => Inclusion::Iota(*k),
                "delta" => Inclusion::Delta(*k),
                other => return Err(Error::InvalidArgument(format!("unknown inclusion '{other}'"))),
            };
            let spec = FieldSpec::new(common.characteristic)?;
            Ok(vec![timed(|| with_field!(spec, |f| certify::inclusion_check(&f, kind, *n, *d)))?])
        }
        Command::Replay { file } => {
            let text = if file == "-" {
                std::io::read_to_string(std::io::stdin()).map_err(|e| Error::InvalidArgument(e.to_string()))?
            } else {
                std::fs::read_to_string(file).map_err(|e| Error::InvalidArgument(format!("cannot read {file}: {e}")))?
            };
            let doc = CertificateDocument::from_json(&text)?;
            Ok(vec![timed(|| replay_certificate(&doc))?])
        }
    }
}

fn rank_command(expression: Option<&str>, n: Option<usize>, d: Option<u32>, file: Option<&str>, bound: Option<usize>, common: &Common) -> Result<Certificate> {
    let (spec, coords, forms, labels) = match (expression, file) {
        (Some(e), None) => {
            let spec = FieldSpec::new(common.characteristic)?;
            let coords = match (n, d) {
                (Some(n), Some(d)) => Coordinates::Veronese { n, d },
                (Some(n), None) => Coordinates::Projective { n },
                (None, _) => Coordinates::Projective { n: infer_n(e) },
            };
            (spec, coords, vec![e.to_string()], vec!["expression".to_string()])
        }
        (None, Some(path)) => {
            let x = load_ideal(path)?;
            let spec = if common.characteristic != 0 {
                FieldSpec::new(common.characteristic)?
            } else {
                x.field
            };
            let forms = x.generators.iter().map(|g| crate::text::format_poly(&crate::field::Rationals, g, &Vars::x(x.n))).collect();
            let labels = (1..=x.generators.len()).map(|i| format!("generator {i}")).collect();
            (spec, Coordinates::Projective { n: x.n }, forms, labels)
        }
        _ => return Err(Error::InvalidArgument("rank takes an expression or --file".into())),
    };
    let vars = coords.vars()?;
    with_field!(spec, |f| {
        let qs = forms.iter().map(|s| parse_quadric(&f, s, &vars)).collect::<Result<Vec<_>>>()?;
        let ranks = certify::ranks(&f, &qs);
        let mut cert = Certificate::new("rank", spec).input("forms", &forms);
        if let Some(b) = bound {
            cert = cert.input("bound", b);
        }
        cert.coordinates = Some(coords);
        let table: Vec<serde_json::Value> = labels
            .iter()
            .zip(&ranks)
            .map(|(l, r)| serde_json::json!({"label": l, "rank": r}))
            .collect();
        cert.set("ranks", table);
        let mut ok = true;
        if let Some(b) = bound {
            for ((l, q), &r) in labels.iter().zip(&qs).zip(&ranks) {
                if r > b {
                    ok = false;
                    cert.witnesses.push(certify::Witness::RankExceeds {
                        label: l.clone(),
                        form: format_quadric(&f, q, &vars),
                        rank: r,
                        bound: b,
                    });
                }
            }
        }
        cert.status = if ok { Status::Verified } else { Status::Refuted };
        Ok(cert)
    })
}

/// Largest `x<k>` mentioned, so `rank "x0*x3 - x1^2"` needs no `--n`.
fn infer_n(expr: &str) -> usize {
    let bytes = expr.as_bytes();
    let mut best = 1;
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'x' {
            let digits: String = expr[i + 1..].chars().take_while(|c| c.is_ascii_digit()).collect();
            if let Ok(k) = digits.parse::<usize>() {
                best = best.max(k);
            }
        }
    }
    best
}

fn rank3_command(file: Option<&str>, n: Option<usize>, d: Option<u32>, samples: u64, common: &Common) -> Result<Certificate> {
    match (file, n, d) {
        (Some(path), None, None) => {
            let x = load_ideal(path)?;
            let spec = if common.characteristic != 0 {
                FieldSpec::new(common.characteristic)?
            } else {
                x.field
            };
            let FieldSpec::Prime(_) = spec else {
                return Err(Error::InvalidArgument("rank3-search samples over a prime field; pass --char p".into()));
            };
            with_field!(spec, |f| {
                let quadrics = x
                    .generators
                    .iter()
                    .filter(|g| g.homogeneous_degree().ok().flatten() == Some(2))
                    .map(|g| Ok(quadric_from_poly(&f, &to_field(&f, g)?)))
                    .collect::<Result<Vec<_>>>()?;
                if quadrics.is_empty() {
                    return Err(Error::InvalidArgument("the ideal has no quadric generators".into()));
                }
                let reference: Vec<_> = quadrics.iter().filter(|q| q.rank(&f) <= 3).cloned().collect();
                let mut cert = certify::rank3_certificate(&f, &quadrics, &reference, Coordinates::Projective { n: x.n }, samples, common.seed)?;
                cert.inputs.insert("file".into(), serde_json::json!(path));
                cert.set("generator_ranks", certify::ranks(&f, &quadrics));
                Ok(cert)
            })
        }
        (None, Some(n), Some(d)) => {
            let spec = FieldSpec::new(common.characteristic)?;
            let FieldSpec::Prime(_) = spec else {
                return Err(Error::InvalidArgument("rank3-search samples over a prime field; pass --char p".into()));
            };
            with_field!(spec, |f| {
                let quadrics = binomial_generators(&f, n, d)?;
                let gamma = GeneratorSet::build(f, n, d)?.forms();
                let mut cert = certify::rank3_certificate(&f, &quadrics, &gamma, Coordinates::Veronese { n, d }, samples, common.seed)?;
                cert.inputs.insert("n".into(), serde_json::json!(n));
                cert.inputs.insert("d".into(), serde_json::json!(d));
                Ok(cert)
            })
        }
        _ => Err(Error::InvalidArgument("rank3-search takes --file, or --n with --d".into())),
    }
}
