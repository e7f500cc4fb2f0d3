//! Machine-checked rewrite certificates for identities in `K₂ ⊗ ℚ` over
//! `A((σ))` and `A[σ]/σ^N`, with an independent `dlog` cross-check.
//!
//! Two chains are built in. With `P = 1 + cσⁿ⁺¹` and `Q = 1 + cσⁿ⁺¹ - cσⁿ`:
//!
//! * `{P, c} = (n+1)·{(1-σ)·P, Q}` over `A((σ))`, from the Steinberg
//!   relations `{P, -cσⁿ⁺¹} = 0` and `{(1-σ)P, σQ} = 0` (note
//!   `(1-σ)P + σQ = 1`).
//! * `0 = {1-σ, 1-(n+1)cσⁿ}` over `A[σ]/σⁿ⁺¹`, by running the first chain
//!   from zero and projecting.
//!
//! Along the way `{P, σ} = -{(1-σ)P, Q}`; the sign matters and is forced by
//! the second Steinberg instance.

mod crosscheck;
mod file;
mod laurent;
mod rules;

use std::sync::Arc;

use num_traits::One;
use serde::Serialize;

pub use crosscheck::{crosscheck_dlog, CrosscheckReport, StepAgreement};
pub use file::{CertificateFile, ClaimRecord, ContextRecord, StepRecord};
pub use laurent::{is_root_of_unity, sum_check, value_eq, LEntry, LState, LTerm, SPoly};
pub use rules::{apply_step, check_step, positions_valid, Relation, RuleKind, Step, StepContext};

use crate::algebra::{Algebra, AlgebraElement};
use crate::{q, Error, Result, Q};

/// Annotation attached to projection steps: lifting the Laurent identity to
/// `A[[σ]]` relies on injectivity of `K_M(R) → K_M(R[1/σ])` for the regular
/// local ring `R = A[[σ]]` (Kerz), which is assumed rather than checked.
pub const SURVIVAL_NOTE: &str =
    "survival: lift from A((s)) to A[[s]] assumed via injectivity of K_M(R) -> K_M(R[1/s]) (Kerz)";

#[derive(Clone, Debug)]
pub struct CertContext {
    pub base: Arc<Algebra>,
    pub sigma: String,
    pub n: u32,
    pub c: AlgebraElement,
}

impl PartialEq for CertContext {
    fn eq(&self, other: &Self) -> bool {
        self.base.same_as(&other.base) && self.sigma == other.sigma && self.n == other.n && self.c == other.c
    }
}

impl Eq for CertContext {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub context: CertContext,
    pub start: LState,
    pub goal: LState,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepStatus {
    pub index: usize,
    pub rule: String,
    pub position: [usize; 2],
    pub ok: bool,
    pub message: Option<String>,
    pub annotation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateVerdict {
    pub steps: Vec<StepStatus>,
    pub failed_step: Option<usize>,
    pub final_state: String,
    pub goal: String,
    pub final_matches_goal: bool,
    pub valid: bool,
}

/// Runs every step through its side-condition check, stopping at the first
/// failure, and compares the final state with the goal.
pub fn check_certificate(cert: &Certificate) -> CertificateVerdict {
    let ctx = StepContext { start_is_zero: cert.start.is_zero() };
    let mut state = cert.start.clone();
    let mut statuses = Vec::new();
    let mut failed = None;
    for (i, step) in cert.steps.iter().enumerate() {
        let mut status = StepStatus {
            index: i,
            rule: step.label().to_string(),
            position: step.position(),
            ok: true,
            message: None,
            annotation: matches!(step, Step::Projection { .. }).then(|| SURVIVAL_NOTE.to_string()),
        };
        match check_step(&state, step, ctx) {
            Ok(next) => state = next,
            Err(e) => {
                status.ok = false;
                status.message = Some(e.to_string());
                failed = Some(i);
            }
        }
        statuses.push(status);
        if failed.is_some() {
            break;
        }
    }
    let matches = failed.is_none() && state.value_equal(&cert.goal);
    CertificateVerdict {
        steps: statuses,
        failed_step: failed,
        final_state: state.display(),
        goal: cert.goal.display(),
        final_matches_goal: matches,
        valid: matches,
    }
}

/// Records steps while simulating the state, so positions can be looked up
/// by content.
struct Builder {
    state: LState,
    steps: Vec<Step>,
    ctx: StepContext,
}

impl Builder {
    fn new(start: LState) -> Self {
        let ctx = StepContext { start_is_zero: start.is_zero() };
        Builder { state: start, steps: Vec::new(), ctx }
    }

    fn push(&mut self, step: Step) -> Result<()> {
        self.state = check_step(&self.state, &step, self.ctx)?;
        self.steps.push(step);
        Ok(())
    }

    fn find(&self, entries: &[LEntry]) -> Result<usize> {
        self.state
            .terms
            .iter()
            .position(|(_, es)| es == entries)
            .ok_or_else(|| Error::PositionInvalid("expected term missing while building".into()))
    }

    fn end(&self) -> usize {
        self.state.terms.len()
    }
}

struct Pieces {
    p: SPoly,
    qq: SPoly,
    c: SPoly,
    one_minus_sigma: SPoly,
    sigma: SPoly,
}

fn pieces(ctx: &CertContext) -> Pieces {
    let a = &ctx.base;
    let n = ctx.n as usize;
    let one = SPoly::one(a);
    let p = one.add(&SPoly::monomial(ctx.c.clone(), n + 1));
    let qq = p.sub(&SPoly::monomial(ctx.c.clone(), n));
    Pieces {
        p,
        qq,
        c: SPoly::constant(ctx.c.clone()),
        one_minus_sigma: one.sub(&SPoly::sigma(a)),
        sigma: SPoly::sigma(a),
    }
}

fn single(f: &SPoly) -> LEntry {
    LEntry::single(f.clone())
}

fn atoms(list: &[(&SPoly, i64)]) -> LEntry {
    LEntry { atoms: list.iter().map(|(f, m)| ((*f).clone(), *m)).collect() }
}

fn context(base: &Arc<Algebra>, sigma: &str, c: &AlgebraElement, n: u32) -> Result<CertContext> {
    if n == 0 {
        return Err(Error::InvalidSpec("certificates need n ≥ 1".into()));
    }
    if !c.algebra().same_as(base) {
        return Err(Error::AlgebraMismatch);
    }
    if !c.is_unit() {
        return Err(Error::NonUnitC(c.to_string()));
    }
    if base.vars().iter().any(|v| v == sigma) {
        return Err(Error::NameCollision(sigma.to_string()));
    }
    Ok(CertContext { base: base.clone(), sigma: sigma.to_string(), n, c: c.clone() })
}

/// The shared chain. Adds `coeff·({P, c} - (n+1){(1-σ)·P, Q})`-equivalent
/// relation instances so that a state holding `coeff·{P, c}` ends up holding
/// `coeff·(n+1)·{(1-σ)·P, Q}` with the first entry as a two-atom product.
fn laurent_chain(b: &mut Builder, pc: &Pieces, n: u32, coeff: &Q) -> Result<()> {
    let a = b.state.base.clone();
    let minus_one = SPoly::constant(AlgebraElement::integer(&a, -1));
    let m = i64::from(n) + 1;
    let neg_c_top = pc.c.neg().mul(&pc.sigma.pow(n + 1));
    // {P, -cσⁿ⁺¹} = 0
    let t = b.end();
    b.push(Step::Introduce {
        relation: Relation::Steinberg,
        term: t,
        slot: 0,
        coeff: -coeff.clone(),
        entries: vec![single(&pc.p), single(&neg_c_top)],
    })?;
    let t = b.find(&[single(&pc.p), single(&neg_c_top)])?;
    b.push(Step::EntryFactor {
        term: t,
        slot: 1,
        entry: atoms(&[(&minus_one, 1), (&pc.c, 1), (&pc.sigma, m)]),
    })?;
    b.push(Step::Split { term: t, slot: 1 })?;
    // {P, -1} is 2-torsion
    let t = b.find(&[single(&pc.p), single(&minus_one)])?;
    b.push(Step::KillTorsion { term: t, slot: 1, m: 2 })?;
    let sig_m = atoms(&[(&pc.sigma, m)]);
    let t = b.find(&[single(&pc.p), sig_m])?;
    b.push(Step::Absorb { term: t, slot: 1, exponent: 1 })?;
    // {(1-σ)P, σQ} = 0 since (1-σ)P + σQ = 1
    let x = pc.one_minus_sigma.mul(&pc.p);
    let y = pc.sigma.mul(&pc.qq);
    let t = b.end();
    b.push(Step::Introduce {
        relation: Relation::Steinberg,
        term: t,
        slot: 0,
        coeff: coeff * q(m),
        entries: vec![single(&x), single(&y)],
    })?;
    let t = b.find(&[single(&x), single(&y)])?;
    let first = atoms(&[(&pc.one_minus_sigma, 1), (&pc.p, 1)]);
    b.push(Step::EntryFactor { term: t, slot: 0, entry: first.clone() })?;
    b.push(Step::EntryFactor { term: t, slot: 1, entry: atoms(&[(&pc.sigma, 1), (&pc.qq, 1)]) })?;
    b.push(Step::Split { term: t, slot: 1 })?;
    let t = b.find(&[first, single(&pc.sigma)])?;
    b.push(Step::Split { term: t, slot: 0 })?;
    let t = b.find(&[single(&pc.one_minus_sigma), single(&pc.sigma)])?;
    b.push(Step::Eliminate { relation: Relation::Steinberg, term: t, slot: 0 })?;
    Ok(())
}

/// `{1+cσⁿ⁺¹, c} = (n+1)·{(1-σ)(1+cσⁿ⁺¹), 1+cσⁿ⁺¹-cσⁿ}` over `A((σ))`.
pub fn eq7_certificate(base: &Arc<Algebra>, sigma: &str, c: &AlgebraElement, n: u32) -> Result<Certificate> {
    let ctx = context(base, sigma, c, n)?;
    let pc = pieces(&ctx);
    let mut start = LState::zero(base, sigma, 2);
    start.terms.push((Q::one(), vec![single(&pc.p), single(&pc.c)]));
    let mut b = Builder::new(start.clone());
    laurent_chain(&mut b, &pc, n, &Q::one())?;
    let mut goal = LState::zero(base, sigma, 2);
    goal.terms.push((
        q(i64::from(n) + 1),
        vec![atoms(&[(&pc.one_minus_sigma, 1), (&pc.p, 1)]), single(&pc.qq)],
    ));
    Ok(Certificate { context: ctx, start, goal, steps: b.steps })
}

/// `0 = {1-σ, 1-(n+1)cσⁿ}` over `A[σ]/σⁿ⁺¹`.
pub fn eq8_certificate(base: &Arc<Algebra>, sigma: &str, c: &AlgebraElement, n: u32) -> Result<Certificate> {
    let ctx = context(base, sigma, c, n)?;
    let pc = pieces(&ctx);
    let start = LState::zero(base, sigma, 2);
    let mut b = Builder::new(start.clone());
    // leaves (n+1){(1-σ)·P, Q} - {P, c}
    laurent_chain(&mut b, &pc, n, &Q::one())?;
    b.push(Step::Projection { modulus: n + 1 })?;
    let one = SPoly::one(base);
    let t = b.find(&[single(&one), single(&pc.c)])?;
    b.push(Step::KillTorsion { term: t, slot: 0, m: 1 })?;
    let qq = pc.qq.truncate(n + 1);
    let t = b.find(&[atoms(&[(&pc.one_minus_sigma, 1), (&one, 1)]), single(&qq)])?;
    b.push(Step::EntryFactor { term: t, slot: 0, entry: single(&pc.one_minus_sigma) })?;
    b.push(Step::Absorb { term: t, slot: 1, exponent: i64::from(n) + 1 })?;
    let target = one.sub(&SPoly::monomial(ctx.c.scale(&q(i64::from(n) + 1)), n as usize));
    b.push(Step::EntryIdentity { term: t, slot: 1, poly: target.clone() })?;
    let mut goal = LState::zero(base, sigma, 2);
    goal.modulus = Some(n + 1);
    goal.terms.push((Q::one(), vec![single(&pc.one_minus_sigma), single(&target)]));
    Ok(Certificate { context: ctx, start, goal, steps: b.steps })
}

/// Negative control: flips the sign of the σ-coefficient in the first
/// one-unit factor `1 + aσ + …` (with `a ≠ 0`) of an `entry-factor` step. Returns the index
/// of the corrupted step.
pub fn corrupted_control(cert: &Certificate) -> Option<(usize, Certificate)> {
    let mut out = cert.clone();
    for (i, step) in out.steps.iter_mut().enumerate() {
        let Step::EntryFactor { entry, .. } = step else { continue };
        for (poly, _) in entry.atoms.iter_mut() {
            let lin = poly.coeff(1);
            if lin.is_zero() || !poly.coeff(0).is_one() {
                continue;
            }
            let mut coeffs = poly.coeffs().to_vec();
            coeffs[1] = lin.neg();
            *poly = SPoly::from_coeffs(poly.algebra(), coeffs);
            return Some((i, out));
        }
    }
    None
}
