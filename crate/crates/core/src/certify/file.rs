//! JSON form of certificates.
//!
//! ```json
//! {
//!   "context": {"algebra": {...}, "sigma": "s", "n": 1, "c": "2"},
//!   "claim": {"degree": 2, "lhs": "{1 + 2*s^2, 2}", "rhs": "...", "rhs_modulus": null},
//!   "steps": [{"rule": "steinberg.introduce", "position": [1, 0], "payload": ["-1", "1 + 2*s^2", "-2*s^2"]}]
//! }
//! ```
//!
//! Payloads by rule: `bilinearity.merge` [other term], `bilinearity.absorb`
//! [exponent], `*.introduce` [coefficient, entries…], `torsion-scale.kill`
//! [m], `torsion-scale.scale` [factor], `entry-factor` [entry],
//! `entry-identity` [polynomial], `projection` [N]; the rest take none.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::laurent::{LEntry, LState, SPoly};
use super::rules::{Relation, Step};
use super::{CertContext, Certificate};
use crate::algebra::{build_algebra, AlgebraElement, AlgebraSpec};
use crate::expr::parse_rational;
use crate::{fmt_q, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextRecord {
    pub algebra: AlgebraSpec,
    pub sigma: String,
    pub n: u32,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimRecord {
    pub degree: usize,
    pub lhs: String,
    pub rhs: String,
    /// Set when the right-hand side lives in `A[σ]/σ^N`.
    pub rhs_modulus: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub rule: String,
    pub position: [usize; 2],
    pub payload: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub context: ContextRecord,
    pub claim: ClaimRecord,
    pub steps: Vec<StepRecord>,
}

fn parse_int<T: FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("expected an integer, got `{s}`")))
}

fn payload(rec: &StepRecord, len: usize) -> Result<&[String]> {
    let ok = if len == usize::MAX { !rec.payload.is_empty() } else { rec.payload.len() == len };
    if ok {
        Ok(&rec.payload)
    } else {
        Err(Error::Parse(format!("rule `{}` has a malformed payload", rec.rule)))
    }
}

impl Certificate {
    pub fn to_file(&self) -> CertificateFile {
        let sigma = &self.context.sigma;
        let entry = |e: &LEntry| e.display(sigma);
        let steps = self
            .steps
            .iter()
            .map(|s| {
                let payload = match s {
                    Step::Merge { other, .. } => vec![other.to_string()],
                    Step::Absorb { exponent, .. } => vec![exponent.to_string()],
                    Step::Introduce { coeff, entries, .. } => {
                        std::iter::once(fmt_q(coeff)).chain(entries.iter().map(entry)).collect()
                    }
                    Step::KillTorsion { m, .. } => vec![m.to_string()],
                    Step::Scale { factor } => vec![fmt_q(factor)],
                    Step::EntryFactor { entry: e, .. } => vec![entry(e)],
                    Step::EntryIdentity { poly, .. } => vec![poly.display(sigma)],
                    Step::Projection { modulus } => vec![modulus.to_string()],
                    Step::Split { .. } | Step::Eliminate { .. } | Step::InverseNegation { .. } => {
                        Vec::new()
                    }
                };
                StepRecord { rule: s.label().to_string(), position: s.position(), payload }
            })
            .collect();
        CertificateFile {
            context: ContextRecord {
                algebra: self.context.base.spec().clone(),
                sigma: sigma.clone(),
                n: self.context.n,
                c: self.context.c.to_string(),
            },
            claim: ClaimRecord {
                degree: self.start.degree,
                lhs: self.start.display(),
                rhs: self.goal.display(),
                rhs_modulus: self.goal.modulus,
            },
            steps,
        }
    }

    pub fn from_file(f: &CertificateFile) -> Result<Certificate> {
        let base = build_algebra(&f.context.algebra)?;
        let sigma = f.context.sigma.as_str();
        if base.vars().iter().any(|v| v == sigma) {
            return Err(Error::NameCollision(sigma.to_string()));
        }
        let c = AlgebraElement::parse(&base, &f.context.c)?;
        let degree = f.claim.degree;
        let start = LState::parse(&base, sigma, degree, &f.claim.lhs)?;
        let mut goal = LState::parse(&base, sigma, degree, &f.claim.rhs)?;
        if let Some(n) = f.claim.rhs_modulus {
            goal.modulus = Some(n);
            for t in &mut goal.terms {
                for e in &mut t.1 {
                    *e = e.truncate(n);
                }
            }
            goal.normalize();
        }
        let entry = |s: &str| LEntry::parse(&base, sigma, s);
        let steps = f
            .steps
            .iter()
            .map(|rec| {
                let [term, slot] = rec.position;
                let step = match rec.rule.as_str() {
                    "bilinearity.split" => Step::Split { term, slot },
                    "bilinearity.merge" => {
                        Step::Merge { term, other: parse_int(&payload(rec, 1)?[0])?, slot }
                    }
                    "bilinearity.absorb" => {
                        Step::Absorb { term, slot, exponent: parse_int(&payload(rec, 1)?[0])? }
                    }
                    "steinberg.introduce" | "minus-arg.introduce" => {
                        let p = payload(rec, usize::MAX)?;
                        let relation = if rec.rule.starts_with("steinberg") {
                            Relation::Steinberg
                        } else {
                            Relation::MinusArg
                        };
                        Step::Introduce {
                            relation,
                            term,
                            slot,
                            coeff: parse_rational(&p[0])?,
                            entries: p[1..].iter().map(|e| entry(e)).collect::<Result<_>>()?,
                        }
                    }
                    "steinberg.eliminate" => Step::Eliminate { relation: Relation::Steinberg, term, slot },
                    "minus-arg.eliminate" => Step::Eliminate { relation: Relation::MinusArg, term, slot },
                    "inverse-negation" => Step::InverseNegation { term, slot },
                    "torsion-scale.kill" => Step::KillTorsion { term, slot, m: parse_int(&payload(rec, 1)?[0])? },
                    "torsion-scale.scale" => Step::Scale { factor: parse_rational(&payload(rec, 1)?[0])? },
                    "entry-factor" => Step::EntryFactor { term, slot, entry: entry(&payload(rec, 1)?[0])? },
                    "entry-identity" => Step::EntryIdentity {
                        term,
                        slot,
                        poly: SPoly::parse(&base, sigma, &payload(rec, 1)?[0])?,
                    },
                    "projection" => Step::Projection { modulus: parse_int(&payload(rec, 1)?[0])? },
                    other => return Err(Error::Parse(format!("unknown rule `{other}`"))),
                };
                Ok(step)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Certificate {
            context: CertContext { base: base.clone(), sigma: sigma.to_string(), n: f.context.n, c },
            start,
            goal,
            steps,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("certificate serializes")
    }

    pub fn from_json(src: &str) -> Result<Certificate> {
        let f: CertificateFile =
            serde_json::from_str(src).map_err(|e| Error::Parse(format!("certificate file: {e}")))?;
        Certificate::from_file(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{eq7_certificate, eq8_certificate};
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let a = build_algebra(&AlgebraSpec::new(&["t"], &["t^2"])).unwrap();
        let c = AlgebraElement::parse(&a, "1+t").unwrap();
        for cert in [eq7_certificate(&a, "s", &c, 2).unwrap(), eq8_certificate(&a, "s", &c, 1).unwrap()] {
            let json = cert.to_json();
            let back = Certificate::from_json(&json).unwrap();
            assert_eq!(back.steps, cert.steps);
            assert_eq!(back.start, back.start);
            assert_eq!(back.to_json(), json);
            assert!(back.goal.value_equal(&cert.goal));
        }
    }

    #[test]
    fn unknown_rule_is_a_parse_error() {
        let f = crate::algebra::Algebra::field();
        let cert = eq7_certificate(&f, "s", &AlgebraElement::integer(&f, 2), 1).unwrap();
        let mut file = cert.to_file();
        file.steps[0].rule = "magic".into();
        assert!(matches!(Certificate::from_file(&file), Err(Error::Parse(_))));
    }
}
