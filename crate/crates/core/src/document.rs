//! Certificate documents and witness replay.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::certify::{Certificate, Coordinates, Spanning, Status, Witness};
use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::qmap::GeneratorSet;
use crate::quadform::{PairBasis, QuadraticForm};
use crate::span::SpanBasis;
use crate::text::{parse_quadric, parse_scalar, Vars};
use crate::with_field;

pub const SCHEMA: &str = "qr3-certificate/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub schema: String,
    pub command: String,
    pub certificate: Certificate,
    /// Wall time; the only field that varies between identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl CertificateDocument {
    pub fn new(command: &str, certificate: Certificate) -> Self {
        CertificateDocument {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            certificate,
            elapsed_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    /// Single-line form used for one-per-line grid output.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("documents serialize")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let doc: CertificateDocument = serde_json::from_str(src).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if doc.schema != SCHEMA {
            return Err(Error::InvalidArgument(format!("unsupported schema '{}'", doc.schema)));
        }
        Ok(doc)
    }

    /// The document with wall time removed, for reproducibility checks.
    pub fn body(&self) -> String {
        let mut copy = self.clone();
        copy.elapsed_ms = None;
        copy.to_json()
    }
}

/// Outcome of replaying one witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub kind: String,
    pub label: String,
    pub consistent: bool,
    pub detail: String,
}

/// Re-checks every witness of a certificate from its text alone (Γ is
/// rebuilt when a witness refers to it by `(n, d)`).
pub fn replay(cert: &Certificate) -> Result<Vec<ReplayOutcome>> {
    let coords = cert
        .coordinates
        .ok_or_else(|| Error::InvalidArgument("certificate has no coordinate system".into()))?;
    let vars = coords.vars()?;
    with_field!(cert.field, |f| cert.witnesses.iter().map(|w| replay_one(&f, coords, &vars, w)).collect())
}

fn replay_one<F: Field>(f: &F, coords: Coordinates, vars: &Vars, w: &Witness) -> Result<ReplayOutcome> {
    let parse = |s: &str| parse_quadric(f, s, vars);
    let dim = coords.count();
    let outcome = |kind: &str, label: &str, consistent: bool, detail: String| ReplayOutcome {
        kind: kind.to_string(),
        label: label.to_string(),
        consistent,
        detail,
    };
    Ok(match w {
        Witness::Membership { target, terms } => {
            let mut acc = QuadraticForm::zero(dim);
            for t in terms {
                acc = acc.add(f, &parse(&t.form)?.scale(f, &parse_scalar(f, &t.coefficient)?));
            }
            let consistent = acc == parse(target)?;
            outcome("membership", target, consistent, format!("{} terms", terms.len()))
        }
        Witness::OutsideSpan { label, target, spanning } => {
            let forms = match spanning {
                Spanning::Gamma { n, d } => GeneratorSet::build(f.clone(), *n, *d)?.forms(),
                Spanning::Explicit { forms } => forms.iter().map(|s| parse(s)).collect::<Result<_>>()?,
            };
            let vectors: Vec<_> = forms.iter().map(|q| q.as_vector(f)).collect();
            let span = SpanBasis::from_vectors(f.clone(), PairBasis::new(dim).len(), &vectors)?;
            let consistent = !span.contains_vector(&parse(target)?.as_vector(f));
            outcome("outside_span", label, consistent, format!("span dimension {}", span.dim()))
        }
        Witness::RankExceeds { label, form, rank, bound } => {
            let actual = parse(form)?.rank(f);
            outcome("rank_exceeds", label, actual == *rank && actual > *bound, format!("rank {actual}"))
        }
        Witness::Mismatch { label, left, right } => {
            let consistent = parse(left)? != parse(right)?;
            outcome("mismatch", label, consistent, String::new())
        }
    })
}

/// Wraps replay outcomes in a certificate of their own.
pub fn replay_certificate(doc: &CertificateDocument) -> Result<Certificate> {
    let outcomes = replay(&doc.certificate)?;
    let field: FieldSpec = doc.certificate.field;
    let mut cert = Certificate::new("replay", field)
        .input("claim", &doc.certificate.claim)
        .input("status", doc.certificate.status);
    cert.coordinates = doc.certificate.coordinates;
    let consistent = outcomes.iter().all(|o| o.consistent);
    cert.set("witnesses", outcomes.len());
    cert.set("outcomes", json!(outcomes));
    cert.status = if consistent { Status::Verified } else { Status::Refuted };
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{verify_qr3_veronese, verify_relation, RelationInstance, RelationKind};
    use crate::field::{PrimeField, Rationals};
    use crate::multiindex::MultiIndex;

    #[test]
    fn refutation_replays() {
        let f = PrimeField::new(3).unwrap();
        let doc = CertificateDocument::new("veronese", verify_qr3_veronese(&f, 3, 2).unwrap());
        let back = CertificateDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        let r = replay_certificate(&back).unwrap();
        assert_eq!(r.status, Status::Verified);
        assert_eq!(r.get("witnesses").unwrap(), &json!(1));
    }

    #[test]
    fn membership_replays_and_tampering_is_caught() {
        let inst = RelationInstance::new(RelationKind::Exchange2, vec![0, 1, 2], vec![MultiIndex::new(vec![0, 0, 1])]);
        let mut cert = verify_relation(&Rationals, 2, 3, &inst, true).unwrap();
        assert!(replay(&cert).unwrap().iter().all(|o| o.consistent));
        if let Witness::Membership { terms, .. } = &mut cert.witnesses[0] {
            terms[0].coefficient.push('7');
        }
        assert!(!replay(&cert).unwrap()[0].consistent);
    }

    #[test]
    fn schema_is_checked() {
        let doc = CertificateDocument::new("x", Certificate::new("c", FieldSpec::Rationals));
        let text = doc.to_json().replace(SCHEMA, "other/9");
        assert!(CertificateDocument::from_json(&text).is_err());
        assert!(CertificateDocument::from_json("{").is_err());
    }
}
