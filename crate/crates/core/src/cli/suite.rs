//! Built-in verification suites over the fixed algebra family.

use std::sync::Arc;

use crate::algebra::{build_algebra, Algebra, AlgebraElement, AlgebraSpec};
use crate::certify::{
    check_certificate, corrupted_control, crosscheck_dlog, eq7_certificate, eq8_certificate, Certificate,
};
use crate::family::{builtin_family, coefficient_grid, steinberg_samples, unit_grid, FamilyMember, FAMILY_VERSION, SIGMA};
use crate::kahler::{d, decomposition_report, omega_module, Verdict};
use crate::milnor::{
    dlog_realize, phi_generators, span_check, symbol_of, tangent_realize, tau_transport, theorem2_span, PhiSamples,
};
use crate::report::{Record, Report};
use crate::towers::{
    eventually_isomorphic_towers, isomorphism_towers, limit_dim, ml_window_check, surjective_towers,
};
use crate::{q, Error, Result};

pub const SUITES: [&str; 4] = ["certify", "kahler", "milnor", "towers"];

struct Checks {
    name: &'static str,
    results: Vec<(String, bool)>,
}

impl Checks {
    fn new(name: &'static str) -> Self {
        Checks { name, results: Vec::new() }
    }

    fn add(&mut self, key: String, ok: bool) {
        self.results.push((key, ok));
    }

    /// Records `Ok(true)` as a pass and anything else as a failure.
    fn add_result(&mut self, key: String, r: Result<bool>) {
        self.add(key, matches!(r, Ok(true)));
    }

    fn record(&self) -> Record {
        let passed = self.results.iter().filter(|r| r.1).count();
        let mut rec = Record::new("suite")
            .field("name", self.name)
            .field("family_version", FAMILY_VERSION);
        for (k, ok) in &self.results {
            rec.push(k, if *ok { "pass" } else { "FAIL" });
        }
        rec.field("passed", passed).field("failed", self.results.len() - passed)
    }
}

/// Runs one suite, or all of them for `"all"`. The second value is true
/// when every check passed.
pub fn run_suite(name: &str) -> Result<(Report, bool)> {
    let names: Vec<&str> = match name {
        "all" => SUITES.to_vec(),
        n if SUITES.contains(&n) => vec![n],
        other => return Err(Error::InvalidSpec(format!("unknown suite `{other}`"))),
    };
    let family = builtin_family();
    let mut report = Report::default();
    let mut ok = true;
    for n in names {
        let checks = match n {
            "certify" => certify_suite(&family),
            "kahler" => kahler_suite(&family),
            "milnor" => milnor_suite(&family),
            _ => towers_suite(),
        };
        ok &= checks.results.iter().all(|r| r.1);
        report.push(checks.record());
    }
    Ok((report, ok))
}

fn kahler_suite(family: &[FamilyMember]) -> Checks {
    let mut c = Checks::new("kahler");
    for m in 2..=6u32 {
        let a = build_algebra(&AlgebraSpec::new(&["t"], &[&format!("t^{m}")])).expect("truncated line");
        c.add(format!("omega1_dim[Q[t]/(t^{m})]"), omega_module(&a, 1).dimension() == (m - 1) as usize);
    }
    let sq = &family[4];
    c.add(format!("omega2_dim[{}]", sq.name), omega_module(&sq.algebra, 2).dimension() == 1);
    for fm in family {
        let a = &fm.algebra;
        for p in 0..=2 {
            let m = omega_module(a, p);
            let ok = (0..m.dimension()).all(|i| m.basis_form(i).d().d().is_zero());
            c.add(format!("d_squared[{};p:{p}]", fm.name), ok);
        }
        let grid = coefficient_grid(a);
        let leibniz = grid.iter().all(|x| {
            grid.iter().all(|y| {
                let lhs = d(&x.mul(y));
                let rhs = d(y).scale_by(x).add(&d(x).scale_by(y)).expect("same module");
                lhs == rhs
            })
        });
        c.add(format!("leibniz[{}]", fm.name), leibniz);
        for n in 2..=4 {
            let r = decomposition_report(a, SIGMA, n, 1);
            c.add_result(format!("omega1_split[{};n:{n}]", fm.name), r.map(|r| r.verdict == Verdict::Match));
            let r = decomposition_report(a, SIGMA, n, 2);
            c.add_result(
                format!("omega2_corrected[{};n:{n}]", fm.name),
                r.map(|r| r.eq6_corrected_dim == Some(r.direct_dim)),
            );
        }
    }
    let lit = decomposition_report(&family[1].algebra, SIGMA, 2, 2);
    c.add_result(
        format!("omega2_literal_fails[{};n:2]", family[1].name),
        lit.map(|r| r.eq6_literal_dim != Some(r.direct_dim)),
    );
    c
}

fn realizes_to_zero(elements: &[AlgebraElement]) -> bool {
    symbol_of(elements, q(1)).map(|s| dlog_realize(&s).is_zero()).unwrap_or(false)
}

/// Builds the partner of `a` in a relation from `1` and `a`.
type Partner = fn(&AlgebraElement, &AlgebraElement) -> AlgebraElement;

fn milnor_suite(family: &[FamilyMember]) -> Checks {
    let mut c = Checks::new("milnor");
    for fm in family {
        let a = &fm.algebra;
        let one = AlgebraElement::one(a);
        let xs = steinberg_samples(a);
        let rels: [(&str, Partner); 3] = [
            ("a,1-a", |one, x| one.sub(x)),
            ("a,-a", |_, x| x.neg()),
            ("a,a", |_, x| x.clone()),
        ];
        for (label, other) in rels {
            let ok = xs.iter().all(|x| realizes_to_zero(&[x.clone(), other(&one, x)]));
            c.add(format!("steinberg[{};{label}]", fm.name), ok);
        }
        let us = unit_grid(a);
        let anti = us.iter().all(|u| {
            us.iter().all(|v| {
                let (Ok(x), Ok(y)) = (symbol_of(&[u.clone(), v.clone()], q(1)), symbol_of(&[v.clone(), u.clone()], q(1)))
                else {
                    return false;
                };
                x.add(&y).map(|s| dlog_realize(&s).is_zero()).unwrap_or(false)
            })
        });
        c.add(format!("antisymmetry[{}]", fm.name), anti);
        for p in 2..=3 {
            for n in 1..=4 {
                let v = theorem2_span(a, SIGMA, n, p);
                c.add_result(format!("theorem2_span[{};p:{p};n:{n}]", fm.name), v.map(|v| v.spans));
            }
            c.add_result(format!("tangent_span[{};p:{p}]", fm.name), tangent_span(a, p));
        }
    }
    for (label, vars, rels, n) in [
        ("Q[s]/(s^4)", &["s"][..], &["s^4"][..], 2),
        ("Q[t,s]/(t^2,s^3,ts)", &["t", "s"][..], &["t^2", "s^3", "t*s"][..], 2),
    ] {
        let spec = AlgebraSpec::new(vars, rels).with_sigma("s");
        let r = build_algebra(&spec).and_then(|b| tau_transport(&b, n));
        c.add_result(format!("tau[{label};n:{n}]"), r.map(|r| r.holds()));
    }
    c
}

fn tangent_span(a: &Arc<Algebra>, p: usize) -> Result<bool> {
    let ext = crate::algebra::truncated_extension(a, "e", 2)?;
    let gens = phi_generators(&ext, 1, p, &PhiSamples::grid(a))?;
    let images = gens.iter().map(tangent_realize).collect::<Result<Vec<_>>>()?;
    Ok(span_check(&images, &omega_module(a, p - 1))?.spans)
}

fn certificate_passes(cert: &Certificate, eq8: bool) -> Result<bool> {
    let v = check_certificate(cert);
    let x = crosscheck_dlog(cert, None)?;
    Ok(v.valid && x.all_agree && x.goal_agrees && (!eq8 || x.final_realizes_to_zero))
}

fn certify_suite(family: &[FamilyMember]) -> Checks {
    let mut c = Checks::new("certify");
    for fm in family {
        let a = &fm.algebra;
        for u in unit_grid(a) {
            for n in 1..=3 {
                let key = |eq: &str| format!("{eq}[{};c:{u};n:{n}]", fm.name);
                let r7 = eq7_certificate(a, SIGMA, &u, n).and_then(|cert| certificate_passes(&cert, false));
                c.add_result(key("eq7"), r7);
                let r8 = eq8_certificate(a, SIGMA, &u, n).and_then(|cert| certificate_passes(&cert, true));
                c.add_result(key("eq8"), r8);
            }
        }
    }
    let a = &family[1].algebra;
    let u = AlgebraElement::one(a).add(&AlgebraElement::var(a, 0));
    for n in 1..=3 {
        let r = eq7_certificate(a, SIGMA, &u, n).and_then(|cert| {
            let (at, bad) = corrupted_control(&cert).ok_or_else(|| Error::InvalidSpec("no factor to corrupt".into()))?;
            let checker = check_certificate(&bad).failed_step == Some(at);
            let cross = crosscheck_dlog(&bad, None)?.first_disagreement == Some(at);
            Ok(checker && cross)
        });
        c.add_result(format!("negative_control[{};c:{u};n:{n}]", family[1].name), r);
        let r = eq8_certificate(a, SIGMA, &u, n).and_then(|cert| {
            let back = Certificate::from_json(&cert.to_json())?;
            Ok(back.to_json() == cert.to_json() && check_certificate(&back).valid)
        });
        c.add_result(format!("file_round_trip[{};c:{u};n:{n}]", family[1].name), r);
    }
    c
}

fn towers_suite() -> Checks {
    let mut c = Checks::new("towers");
    for (i, t) in surjective_towers().iter().enumerate() {
        let ok = ml_window_check(t).iter().all(|l| l.stabilized && l.offset.is_none_or(|o| o == 0));
        c.add(format!("surjective_offset_zero[{i}]"), ok);
    }
    for (i, t) in isomorphism_towers().iter().enumerate() {
        let lim = limit_dim(t);
        c.add(format!("isomorphism_limit[{i}]"), lim.limit_dim == t.dims()[0] && lim.stabilized);
    }
    for (i, (t, stable)) in eventually_isomorphic_towers().iter().enumerate() {
        let lim = limit_dim(t);
        c.add(format!("eventually_isomorphic[{i}]"), lim.limit_dim == *stable && lim.stabilized);
    }
    c
}
