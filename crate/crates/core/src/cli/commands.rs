//! The computations behind each subcommand and scenario kind.

use std::sync::Arc;

use serde::Deserialize;

use crate::algebra::{build_algebra, truncated_extension, Algebra, AlgebraElement, AlgebraSpec};
use crate::certify::{check_certificate, crosscheck_dlog, eq7_certificate, eq8_certificate, Certificate};
use crate::family::SIGMA;
use crate::kahler::{decomposition_report, omega_module, Verdict};
use crate::milnor::{phi_generators, span_check, tangent_realize, tau_transport, theorem2_span, PhiSamples, SpanVerdict};
use crate::report::{Record, Report};
use crate::towers::{limit_dim, ml_window_check, surjectivity_check, TowerSpec};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    AlgebraInfo,
    Omega,
    Decomposition,
    Phi,
    Theorem2,
    TangentSpan,
    CertifyEq7,
    CertifyEq8,
    Tau,
    Tower,
}

impl Kind {
    pub const ALL: [Kind; 10] = [
        Kind::AlgebraInfo,
        Kind::Omega,
        Kind::Decomposition,
        Kind::Phi,
        Kind::Theorem2,
        Kind::TangentSpan,
        Kind::CertifyEq7,
        Kind::CertifyEq8,
        Kind::Tau,
        Kind::Tower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::AlgebraInfo => "algebra-info",
            Kind::Omega => "omega",
            Kind::Decomposition => "decomposition",
            Kind::Phi => "phi",
            Kind::Theorem2 => "theorem2",
            Kind::TangentSpan => "tangent-span",
            Kind::CertifyEq7 => "certify-eq7",
            Kind::CertifyEq8 => "certify-eq8",
            Kind::Tau => "tau",
            Kind::Tower => "tower",
        }
    }

    pub fn from_name(s: &str) -> Result<Kind> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown scenario kind `{s}`")))
    }

    /// Parameters the kind requires, then those it merely accepts.
    fn schema(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Kind::AlgebraInfo => (&[], &["algebra"]),
            Kind::Omega => (&["p"], &["algebra"]),
            Kind::Decomposition | Kind::Phi | Kind::Theorem2 => (&["n", "p"], &["algebra"]),
            Kind::TangentSpan => (&["p"], &["algebra"]),
            Kind::CertifyEq7 | Kind::CertifyEq8 => (&["c", "n"], &["algebra", "precision"]),
            Kind::Tau => (&["algebra", "n"], &[]),
            Kind::Tower => (&["tower"], &[]),
        }
    }
}

/// Parameters shared by the subcommands and scenario files.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub algebra: Option<AlgebraSpec>,
    pub p: Option<i64>,
    pub n: Option<i64>,
    pub c: Option<String>,
    pub precision: Option<i64>,
    pub tower: Option<TowerSpec>,
}

impl Params {
    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (name, set) in [
            ("algebra", self.algebra.is_some()),
            ("p", self.p.is_some()),
            ("n", self.n.is_some()),
            ("c", self.c.is_some()),
            ("precision", self.precision.is_some()),
            ("tower", self.tower.is_some()),
        ] {
            if set {
                out.push(name);
            }
        }
        out
    }

    /// Checks presence and ranges against the kind's schema.
    pub fn validate(&self, kind: Kind) -> Result<()> {
        let (required, optional) = kind.schema();
        for r in required {
            if !self.present().contains(r) {
                return Err(Error::InvalidSpec(format!("{} needs `{r}`", kind.name())));
            }
        }
        for p in self.present() {
            if !required.contains(&p) && !optional.contains(&p) {
                return Err(Error::InvalidSpec(format!("{} does not take `{p}`", kind.name())));
            }
        }
        let min_p = match kind {
            Kind::Omega => 0,
            Kind::Decomposition => 1,
            _ => 2,
        };
        if let Some(p) = self.p {
            if p < min_p {
                return Err(Error::InvalidSpec(format!("{} needs p ≥ {min_p}, got {p}", kind.name())));
            }
        }
        if let Some(n) = self.n {
            if n < 1 || n > i64::from(u32::MAX) {
                return Err(Error::InvalidSpec(format!("n must be a positive integer, got {n}")));
            }
        }
        if let Some(prec) = self.precision {
            if prec < 1 || prec > i64::from(u32::MAX) {
                return Err(Error::InvalidSpec(format!("precision must be positive, got {prec}")));
            }
        }
        Ok(())
    }

    fn p(&self) -> usize {
        self.p.expect("validated") as usize
    }

    fn n(&self) -> u32 {
        self.n.expect("validated") as u32
    }

    fn precision(&self) -> Option<u32> {
        self.precision.map(|p| p as u32)
    }

    fn spec(&self) -> AlgebraSpec {
        self.algebra.clone().unwrap_or_default()
    }

    /// The base algebra `A` and the name to use for σ. A `sigma` key that
    /// names no variable (and comes without `order`) only chooses that name.
    fn base(&self) -> Result<(Arc<Algebra>, String)> {
        let mut spec = self.spec();
        let mut sigma = SIGMA.to_string();
        if let (Some(s), None) = (&spec.sigma, spec.order) {
            if !spec.variables.contains(s) {
                sigma = s.clone();
                spec.sigma = None;
            }
        }
        let a = build_algebra(&spec)?;
        if a.sigma_name().is_some() {
            return Err(Error::InvalidSpec("expected a base algebra without a distinguished variable".into()));
        }
        if a.vars().contains(&sigma) {
            return Err(Error::NameCollision(sigma));
        }
        Ok((a, sigma))
    }
}

/// A report plus whether every verdict in it passed.
pub struct Outcome {
    pub report: Report,
    pub ok: bool,
}

impl Outcome {
    fn pass(record: Record) -> Self {
        Outcome { report: Report::single(record), ok: true }
    }
}

fn list<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn execute(kind: Kind, params: &Params) -> Result<Outcome> {
    params.validate(kind)?;
    match kind {
        Kind::AlgebraInfo => algebra_info(params),
        Kind::Omega => {
            let a = build_algebra(&params.spec())?;
            let m = omega_module(&a, params.p());
            Ok(Outcome::pass(
                Record::new("omega")
                    .field("p", params.p())
                    .field("dim", m.dimension())
                    .field("basis", list(m.basis_labels())),
            ))
        }
        Kind::Decomposition => {
            let (a, sigma) = params.base()?;
            let r = decomposition_report(&a, &sigma, params.n(), params.p())?;
            let rec = Record::new("decomposition")
                .field("n", r.n)
                .field("p", r.p)
                .field("direct_dim", r.direct_dim)
                .opt("eq5_dim", r.eq5_dim)
                .opt("eq6_literal_dim", r.eq6_literal_dim)
                .opt("eq6_corrected_dim", r.eq6_corrected_dim)
                .field("verdict", r.verdict);
            Ok(Outcome { report: Report::single(rec), ok: r.verdict != Verdict::Neither })
        }
        Kind::Phi => {
            let (a, sigma) = params.base()?;
            let ext = truncated_extension(&a, &sigma, params.n() + 1)?;
            let gens = phi_generators(&ext, params.n(), params.p(), &PhiSamples::grid(&a))?;
            let mut rec = Record::new("phi")
                .field("n", params.n())
                .field("p", params.p())
                .field("generators", gens.len());
            for (i, g) in gens.iter().enumerate() {
                rec.push(&format!("generator.{i}"), g);
            }
            Ok(Outcome::pass(rec))
        }
        Kind::Theorem2 => {
            let (a, sigma) = params.base()?;
            let v = theorem2_span(&a, &sigma, params.n(), params.p())?;
            Ok(span_outcome("theorem2", Some(params.n()), params.p(), &v))
        }
        Kind::TangentSpan => {
            let (a, sigma) = params.base()?;
            let ext = truncated_extension(&a, &sigma, 2)?;
            let p = params.p();
            let gens = phi_generators(&ext, 1, p, &PhiSamples::grid(&a))?;
            let images = gens.iter().map(tangent_realize).collect::<Result<Vec<_>>>()?;
            let v = span_check(&images, &omega_module(&a, p - 1))?;
            Ok(span_outcome("tangent-span", None, p, &v))
        }
        Kind::CertifyEq7 | Kind::CertifyEq8 => certificate_outcome(&build_certificate(kind, params)?, params.precision()),
        Kind::Tau => {
            let b = build_algebra(&params.spec())?;
            let r = tau_transport(&b, params.n())?;
            let rec = Record::new("tau")
                .field("n", r.n)
                .field("quotient_dim", r.quotient_dim)
                .field("source_dim", r.source_dim)
                .field("target_dim", r.target_dim)
                .field("tau_well_defined", r.tau_well_defined)
                .field("tau_surjective", r.tau_surjective)
                .field("graded_piece_dim", r.graded_piece_dim)
                .field("degenerate", r.degenerate)
                .field("generators_checked", r.generators_checked)
                .field("compatible", r.compatible)
                .field("holds", r.holds());
            Ok(Outcome { report: Report::single(rec), ok: r.holds() })
        }
        Kind::Tower => {
            let t = params.tower.as_ref().expect("validated").build()?;
            let ml = ml_window_check(&t);
            let lim = limit_dim(&t);
            let mut rec = Record::new("tower")
                .field("levels", t.length())
                .field("dims", list(t.dims()))
                .field("surjective", list(surjectivity_check(&t)));
            for l in &ml {
                rec.push(
                    &format!("level.{}", l.level),
                    format!(
                        "image_ranks=[{}] stabilized={} offset={}",
                        list(&l.image_ranks),
                        l.stabilized,
                        l.offset.map_or("-".to_string(), |o| o.to_string())
                    ),
                );
            }
            rec.push("limit_dim", lim.limit_dim);
            rec.push("stabilized", lim.stabilized);
            Ok(Outcome::pass(rec))
        }
    }
}

/// The built-in certificate for a `certify-eq7` or `certify-eq8` request.
pub fn build_certificate(kind: Kind, params: &Params) -> Result<Certificate> {
    params.validate(kind)?;
    let (a, sigma) = params.base()?;
    let c = AlgebraElement::parse(&a, params.c.as_deref().expect("validated"))?;
    match kind {
        Kind::CertifyEq7 => eq7_certificate(&a, &sigma, &c, params.n()),
        Kind::CertifyEq8 => eq8_certificate(&a, &sigma, &c, params.n()),
        other => Err(Error::InvalidSpec(format!("{} does not produce a certificate", other.name()))),
    }
}

fn algebra_info(params: &Params) -> Result<Outcome> {
    let a = build_algebra(&params.spec())?;
    let basis = (0..a.dimension()).map(|i| AlgebraElement::basis_monomial(&a, i));
    let rec = Record::new("algebra-info")
        .field("variables", list(a.vars()))
        .field("relations", list(&a.spec().relations))
        .field("groebner_basis", list(a.relation_strings()))
        .field("dimension", a.dimension())
        .field("basis", list(basis))
        .opt("sigma", a.sigma_name())
        .field("artinian", true)
        .field("local", true);
    Ok(Outcome::pass(rec))
}

fn span_outcome(kind: &str, n: Option<u32>, p: usize, v: &SpanVerdict) -> Outcome {
    let rec = Record::new(kind)
        .opt("n", n)
        .field("p", p)
        .field("rank", v.rank)
        .field("dim", v.dim)
        .field("spans", v.spans)
        .field("basis", list(&v.basis));
    Outcome { report: Report::single(rec), ok: v.spans }
}

/// Runs the rule checker and the dlog crosscheck on a certificate.
pub fn certificate_outcome(cert: &Certificate, precision: Option<u32>) -> Result<Outcome> {
    let verdict = check_certificate(cert);
    let file = cert.to_file();
    let mut head = Record::new("certificate")
        .field("n", cert.context.n)
        .field("c", &cert.context.c)
        .field("lhs", &file.claim.lhs)
        .field("rhs", &file.claim.rhs)
        .opt("rhs_modulus", file.claim.rhs_modulus)
        .field("steps", cert.steps.len())
        .field("final_state", &verdict.final_state)
        .field("final_matches_goal", verdict.final_matches_goal)
        .opt("failed_step", verdict.failed_step)
        .field("valid", verdict.valid);
    let mut steps = Record::new("steps");
    for s in &verdict.steps {
        let mut line = format!("{} [{}, {}] {}", s.rule, s.position[0], s.position[1], if s.ok { "ok" } else { "FAILED" });
        if let Some(m) = &s.message {
            line.push_str(&format!(": {m}"));
        }
        steps.push(&format!("step.{}", s.index), line);
        if let Some(note) = &s.annotation {
            steps.push(&format!("step.{}.annotation", s.index), note);
        }
    }
    let mut ok = verdict.valid;
    let cross = match crosscheck_dlog(cert, precision) {
        Ok(r) => {
            ok &= r.all_agree && r.goal_agrees;
            let mut rec = Record::new("crosscheck")
                .field("precision", r.precision)
                .field("all_agree", r.all_agree)
                .opt("first_disagreement", r.first_disagreement)
                .field("goal_agrees", r.goal_agrees)
                .field("final_realizes_to_zero", r.final_realizes_to_zero);
            for s in &r.steps {
                rec.push(&format!("step.{}", s.index), if s.agrees { "agree" } else { "DISAGREE" });
            }
            rec
        }
        Err(e @ Error::PrecisionInsufficient { .. }) => return Err(e),
        Err(e) => {
            ok = false;
            Record::new("crosscheck").field("error", e)
        }
    };
    head.push("verdict", if ok { "pass" } else { "fail" });
    Ok(Outcome { report: Report { records: vec![head, steps, cross] }, ok })
}
