//! Independent soundness monitor: every relation the rewrite rules use is
//! killed by `dlog`, so realizing the state before and after each step must
//! give the same form.
//!
//! Over `A((σ))` a form is stored as `η + θ ∧ dlog σ` with `η` a form over
//! `A[σ]/σ^M` and `θ` a σ-free form over `A`. An atom `σ^k·g` with `g(0)` a
//! unit contributes `dlog g + k·dlog σ`. Anything of the shape
//! `σ^j ω ∧ dlog σ` with `j ≥ 1` is rewritten as `σ^{j-1} ω ∧ dσ` and moved
//! into `η`, which makes the pair canonical.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::laurent::{LEntry, LState, SPoly};
use super::rules::{apply_step, positions_valid};
use super::Certificate;
use crate::algebra::{projection, truncated_extension, Algebra, AlgebraElement};
use crate::kahler::{dlog, omega_module, DifferentialForm};
use crate::poly::Monomial;
use crate::{q, Error, Result, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepAgreement {
    pub index: usize,
    pub rule: String,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    pub precision: u32,
    pub steps: Vec<StepAgreement>,
    pub first_disagreement: Option<usize>,
    /// The realization of the final state equals that of the goal.
    pub goal_agrees: bool,
    /// The realization of the final state is the zero form.
    pub final_realizes_to_zero: bool,
    pub all_agree: bool,
}

/// Realized form; `theta` is absent over truncated rings.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Realized {
    eta: DifferentialForm,
    theta: Option<DifferentialForm>,
}

impl Realized {
    fn is_zero(&self) -> bool {
        self.eta.is_zero() && self.theta.as_ref().is_none_or(DifferentialForm::is_zero)
    }
}

/// A realization cache key: the ring modulus and the polynomial's coefficients.
type MemoKey = (Option<u32>, Vec<Vec<Q>>);

struct Realizer {
    base: Arc<Algebra>,
    sigma: String,
    precision: u32,
    /// `A[σ]/σ^{M+1}`: one extra order so that shifting by `σ⁻¹` stays exact
    /// modulo `σ^M`.
    wide: Arc<Algebra>,
    /// `A[σ]/σ^M`.
    laurent: Arc<Algebra>,
    truncated: HashMap<u32, Arc<Algebra>>,
    memo: HashMap<MemoKey, (DifferentialForm, i64)>,
}

impl Realizer {
    fn new(base: &Arc<Algebra>, sigma: &str, precision: u32) -> Result<Self> {
        Ok(Realizer {
            base: base.clone(),
            sigma: sigma.to_string(),
            precision,
            wide: truncated_extension(base, sigma, precision + 1)?,
            laurent: truncated_extension(base, sigma, precision)?,
            truncated: HashMap::new(),
            memo: HashMap::new(),
        })
    }

    fn ring(&mut self, modulus: Option<u32>) -> Result<Arc<Algebra>> {
        match modulus {
            None => Ok(self.wide.clone()),
            Some(n) => {
                if let Some(r) = self.truncated.get(&n) {
                    return Ok(r.clone());
                }
                let r = truncated_extension(&self.base, &self.sigma, n)?;
                self.truncated.insert(n, r.clone());
                Ok(r)
            }
        }
    }

    /// `dlog` of one atom as (form, multiple of `dlog σ`).
    fn atom(&mut self, f: &SPoly, modulus: Option<u32>) -> Result<(DifferentialForm, i64)> {
        let key = (modulus, f.key());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let ring = self.ring(modulus)?;
        let (g, k) = match modulus {
            None => {
                let k = f.low().ok_or_else(|| Error::NonUnitEntry("0".into()))?;
                (f.shift_down(k), k as i64)
            }
            Some(n) => (f.truncate(n), 0),
        };
        let v = (dlog(&g.to_element(&ring)?)?, k);
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    fn entry(&mut self, e: &LEntry, modulus: Option<u32>) -> Result<(DifferentialForm, i64)> {
        let ring = self.ring(modulus)?;
        let mut omega = omega_module(&ring, 1).zero();
        let mut a = 0i64;
        for (f, m) in &e.atoms {
            if *m == 0 {
                continue;
            }
            let (w, k) = self.atom(f, modulus)?;
            omega = omega.add(&w.scale(&q(*m)))?;
            a += m * k;
        }
        Ok((omega, a))
    }

    fn state(&mut self, st: &LState) -> Result<Realized> {
        if st.max_degree() >= self.precision as usize {
            return Err(Error::PrecisionInsufficient {
                precision: self.precision,
                reason: format!("an atom has σ-degree {}", st.max_degree()),
            });
        }
        if let Some(n) = st.modulus {
            if n > self.precision {
                return Err(Error::PrecisionInsufficient {
                    precision: self.precision,
                    reason: format!("state lives modulo σ^{n}"),
                });
            }
        }
        let ring = self.ring(st.modulus)?;
        let p = st.degree;
        let mut eta = omega_module(&ring, p).zero();
        let mut theta = omega_module(&ring, p.saturating_sub(1)).zero();
        for (c, es) in &st.terms {
            let slots = es.iter().map(|e| self.entry(e, st.modulus)).collect::<Result<Vec<_>>>()?;
            let mut w = crate::kahler::as_form(&AlgebraElement::one(&ring));
            for (o, _) in &slots {
                w = w.wedge(o)?;
            }
            eta = eta.add(&w.scale(c))?;
            for (i, (_, a)) in slots.iter().enumerate() {
                if *a == 0 {
                    continue;
                }
                let mut w = crate::kahler::as_form(&AlgebraElement::one(&ring));
                for (j, (o, _)) in slots.iter().enumerate() {
                    if j != i {
                        w = w.wedge(o)?;
                    }
                }
                // moving dlog σ from slot i to the end passes p-1-i one-forms
                let sign = if (p - 1 - i).is_multiple_of(2) { q(1) } else { q(-1) };
                theta = theta.add(&w.scale(&(c * q(*a) * sign)))?;
            }
        }
        match st.modulus {
            Some(_) => Ok(Realized { eta, theta: None }),
            None => self.canonical(eta, theta, p),
        }
    }

    fn canonical(&self, eta: DifferentialForm, theta: DifferentialForm, p: usize) -> Result<Realized> {
        let wide = &self.wide;
        let s = wide.nvars() - 1;
        let mut shifted = Vec::new();
        let mut base_terms = Vec::new();
        for (mi, w, c) in theta.terms() {
            if w.contains(&s) {
                continue;
            }
            let mono = &wide.monomial_basis()[mi];
            let k = mono.0[s];
            let x = Monomial(mono.0[..s].to_vec());
            if k == 0 {
                let j = self.base.monomial_index(&x).expect("standard monomial of the base");
                base_terms.push((AlgebraElement::basis_monomial(&self.base, j).scale(&c), w));
            } else {
                let mut e = x.0.clone();
                e.push(k - 1);
                let j = wide.monomial_index(&Monomial(e)).expect("divisor of a standard monomial");
                let mut w = w.clone();
                w.push(s);
                shifted.push((AlgebraElement::basis_monomial(wide, j).scale(&c), w));
            }
        }
        let eta = eta.add(&omega_module(wide, p).from_terms(&shifted))?;
        let down = projection(wide, &self.laurent)?;
        let eta = eta.pushforward(&down)?;
        let theta = omega_module(&self.base, p.saturating_sub(1)).from_terms(&base_terms);
        Ok(Realized { eta, theta: Some(theta) })
    }

    /// Brings `r` (realized for a state with modulus `from`) to modulus `to`.
    fn project(&mut self, r: &Realized, to: u32) -> Result<Option<Realized>> {
        if r.theta.as_ref().is_some_and(|t| !t.is_zero()) {
            return Ok(None);
        }
        let target = self.ring(Some(to))?;
        let map = projection(r.eta.module().algebra(), &target)?;
        Ok(Some(Realized { eta: r.eta.pushforward(&map)?, theta: None }))
    }

    fn agree(&mut self, a: &Realized, b: &Realized) -> Result<bool> {
        let (am, bm) = (modulus_of(a), modulus_of(b));
        if am == bm {
            return Ok(a == b);
        }
        let to = match (am, bm) {
            (None, Some(n)) | (Some(n), None) => n,
            (Some(x), Some(y)) => x.min(y),
            (None, None) => unreachable!(),
        };
        let (pa, pb) = (self.project(a, to)?, self.project(b, to)?);
        Ok(matches!((pa, pb), (Some(x), Some(y)) if x == y))
    }
}

fn modulus_of(r: &Realized) -> Option<u32> {
    match r.theta {
        Some(_) => None,
        None => r.eta.module().algebra().extension().map(|e| e.order),
    }
}

/// Realizes every intermediate state of `cert` and compares neighbours.
/// Steps are applied without their side conditions, so an unsound step shows
/// up as a disagreement. `precision` defaults to `3(n+2)`.
pub fn crosscheck_dlog(cert: &Certificate, precision: Option<u32>) -> Result<CrosscheckReport> {
    let ctx = &cert.context;
    let precision = precision.unwrap_or(3 * (ctx.n + 2));
    if precision == 0 {
        return Err(Error::PrecisionInsufficient { precision, reason: "precision must be positive".into() });
    }
    let mut r = Realizer::new(&ctx.base, &ctx.sigma, precision)?;
    let mut state = cert.start.clone();
    let mut current = r.state(&state)?;
    let mut steps = Vec::new();
    let mut first = None;
    for (i, step) in cert.steps.iter().enumerate() {
        if !positions_valid(&state, step) {
            return Err(Error::PositionInvalid(format!("step {i} names a missing position")));
        }
        state = apply_step(&state, step);
        let next = r.state(&state)?;
        let agrees = r.agree(&current, &next)?;
        if !agrees && first.is_none() {
            first = Some(i);
        }
        steps.push(StepAgreement { index: i, rule: step.label().to_string(), agrees });
        current = next;
    }
    let goal = r.state(&cert.goal)?;
    let goal_agrees = r.agree(&current, &goal)?;
    Ok(CrosscheckReport {
        precision,
        all_agree: first.is_none() && goal_agrees,
        first_disagreement: first,
        goal_agrees,
        final_realizes_to_zero: current.is_zero(),
        steps,
    })
}
