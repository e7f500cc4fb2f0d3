//! Rewrite steps on symbol combinations and their side conditions.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use super::laurent::{is_root_of_unity, sum_check, value_eq, LEntry, LState, SPoly};
use crate::{fmt_q, q, Error, Result, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RuleKind {
    Bilinearity,
    Steinberg,
    MinusArg,
    InverseNegation,
    TorsionScale,
    EntryFactor,
    EntryIdentity,
    Projection,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Which relation an introduced or eliminated term instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `{x, 1-x}`
    Steinberg,
    /// `{x, -x}`
    MinusArg,
}

/// One rewrite. `term` indexes the state's term list, `slot` an entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// `q{…, ∏aᵢ^{mᵢ}, …}` ↦ `Σ q{…, aᵢ^{mᵢ}, …}`, in place.
    Split { term: usize, slot: usize },
    /// Inverse of `Split` for two terms with equal coefficients that differ
    /// only at `slot`; the atoms of `other` are appended.
    Merge { term: usize, other: usize, slot: usize },
    /// `q{…, a^k, …}` ↦ `(q·k/e){…, a^e, …}` for a single-atom entry.
    Absorb { term: usize, slot: usize, exponent: i64 },
    /// Appends `coeff·{entries}` (inserted at `term`), a relation instance
    /// at slots `slot`, `slot+1`.
    Introduce { relation: Relation, term: usize, slot: usize, coeff: Q, entries: Vec<LEntry> },
    /// Removes a term that is a relation instance at slots `slot`, `slot+1`.
    Eliminate { relation: Relation, term: usize, slot: usize },
    /// `q{…, a, …}` ↦ `-q{…, a⁻¹, …}`.
    InverseNegation { term: usize, slot: usize },
    /// Removes a term whose entry at `slot` satisfies `value^m = 1`.
    KillTorsion { term: usize, slot: usize, m: i64 },
    /// Multiplies the whole state by a nonzero rational; allowed only when
    /// the certified claim starts from zero.
    Scale { factor: Q },
    /// Replaces an entry by a value-equal atom list.
    EntryFactor { term: usize, slot: usize, entry: LEntry },
    /// Replaces an entry by a single value-equal polynomial.
    EntryIdentity { term: usize, slot: usize, poly: SPoly },
    /// Maps every entry along `A((σ)) ⊃ A[[σ]] → A[σ]/σ^N`.
    Projection { modulus: u32 },
}

impl Step {
    pub fn kind(&self) -> RuleKind {
        match self {
            Step::Split { .. } | Step::Merge { .. } | Step::Absorb { .. } => RuleKind::Bilinearity,
            Step::Introduce { relation: Relation::Steinberg, .. }
            | Step::Eliminate { relation: Relation::Steinberg, .. } => RuleKind::Steinberg,
            Step::Introduce { relation: Relation::MinusArg, .. }
            | Step::Eliminate { relation: Relation::MinusArg, .. } => RuleKind::MinusArg,
            Step::InverseNegation { .. } => RuleKind::InverseNegation,
            Step::KillTorsion { .. } | Step::Scale { .. } => RuleKind::TorsionScale,
            Step::EntryFactor { .. } => RuleKind::EntryFactor,
            Step::EntryIdentity { .. } => RuleKind::EntryIdentity,
            Step::Projection { .. } => RuleKind::Projection,
        }
    }

    /// `kind.mode` label used in files and reports.
    pub fn label(&self) -> &'static str {
        match self {
            Step::Split { .. } => "bilinearity.split",
            Step::Merge { .. } => "bilinearity.merge",
            Step::Absorb { .. } => "bilinearity.absorb",
            Step::Introduce { relation: Relation::Steinberg, .. } => "steinberg.introduce",
            Step::Eliminate { relation: Relation::Steinberg, .. } => "steinberg.eliminate",
            Step::Introduce { relation: Relation::MinusArg, .. } => "minus-arg.introduce",
            Step::Eliminate { relation: Relation::MinusArg, .. } => "minus-arg.eliminate",
            Step::InverseNegation { .. } => "inverse-negation",
            Step::KillTorsion { .. } => "torsion-scale.kill",
            Step::Scale { .. } => "torsion-scale.scale",
            Step::EntryFactor { .. } => "entry-factor",
            Step::EntryIdentity { .. } => "entry-identity",
            Step::Projection { .. } => "projection",
        }
    }

    /// `[term, slot]`; zero for steps acting on the whole state.
    pub fn position(&self) -> [usize; 2] {
        match self {
            Step::Split { term, slot }
            | Step::Merge { term, slot, .. }
            | Step::Absorb { term, slot, .. }
            | Step::Introduce { term, slot, .. }
            | Step::Eliminate { term, slot, .. }
            | Step::InverseNegation { term, slot }
            | Step::KillTorsion { term, slot, .. }
            | Step::EntryFactor { term, slot, .. }
            | Step::EntryIdentity { term, slot, .. } => [*term, *slot],
            Step::Scale { .. } | Step::Projection { .. } => [0, 0],
        }
    }
}

/// Facts the checker needs beyond the state itself.
#[derive(Clone, Copy, Debug, Default)]
pub struct StepContext {
    pub start_is_zero: bool,
}

fn pos_err(msg: String) -> Error {
    Error::PositionInvalid(msg)
}

fn side(msg: String) -> Error {
    Error::SideConditionFailed(msg)
}

fn term_at(st: &LState, term: usize) -> Result<()> {
    if term < st.terms.len() {
        Ok(())
    } else {
        Err(pos_err(format!("term {term} out of range (state has {} terms)", st.terms.len())))
    }
}

fn slot_at(st: &LState, term: usize, slot: usize) -> Result<()> {
    term_at(st, term)?;
    if slot < st.degree {
        Ok(())
    } else {
        Err(pos_err(format!("slot {slot} out of range for degree {}", st.degree)))
    }
}

fn pair_at(st: &LState, slot: usize) -> Result<()> {
    if slot + 1 < st.degree {
        Ok(())
    } else {
        Err(pos_err(format!("slots {slot}, {} out of range for degree {}", slot + 1, st.degree)))
    }
}

fn relation_holds(st: &LState, rel: Relation, a: &LEntry, b: &LEntry) -> Result<()> {
    let alg = &st.base;
    let target = match rel {
        Relation::Steinberg => SPoly::one(alg),
        Relation::MinusArg => SPoly::zero(alg),
    };
    sum_check(a, b, &target, st.modulus).map_err(|(l, r)| {
        let what = match rel {
            Relation::Steinberg => "x + y = 1",
            Relation::MinusArg => "x + y = 0",
        };
        side(format!(
            "{what} fails for x = {}, y = {}: cleared identity {} = {}",
            a.display(&st.sigma),
            b.display(&st.sigma),
            l.display(&st.sigma),
            r.display(&st.sigma)
        ))
    })
}

/// Checks the step's side conditions and applies it.
pub fn check_step(st: &LState, step: &Step, ctx: StepContext) -> Result<LState> {
    let m = st.modulus;
    match step {
        Step::Split { term, slot } => slot_at(st, *term, *slot)?,
        Step::Merge { term, other, slot } => {
            slot_at(st, *term, *slot)?;
            term_at(st, *other)?;
            if term == other {
                return Err(pos_err("merge of a term with itself".into()));
            }
            let (a, b) = (&st.terms[*term], &st.terms[*other]);
            if a.0 != b.0 {
                return Err(side(format!("coefficients {} and {} differ", fmt_q(&a.0), fmt_q(&b.0))));
            }
            if (0..st.degree).any(|i| i != *slot && a.1[i] != b.1[i]) {
                return Err(side("terms differ outside the merged slot".into()));
            }
        }
        Step::Absorb { term, slot, exponent } => {
            slot_at(st, *term, *slot)?;
            let atoms = &st.terms[*term].1[*slot].atoms;
            if atoms.len() != 1 || atoms[0].1 == 0 || *exponent == 0 {
                return Err(side("absorb needs a single atom with nonzero exponents".into()));
            }
        }
        Step::Introduce { relation, term, slot, entries, .. } => {
            if *term > st.terms.len() {
                return Err(pos_err(format!("insertion point {term} out of range")));
            }
            pair_at(st, *slot)?;
            if entries.len() != st.degree {
                return Err(side(format!("introduced symbol needs {} entries", st.degree)));
            }
            for e in entries {
                e.validate(m, &st.sigma)?;
            }
            relation_holds(st, *relation, &entries[*slot], &entries[*slot + 1])?;
        }
        Step::Eliminate { relation, term, slot } => {
            term_at(st, *term)?;
            pair_at(st, *slot)?;
            let es = &st.terms[*term].1;
            relation_holds(st, *relation, &es[*slot], &es[*slot + 1])?;
        }
        Step::InverseNegation { term, slot } => slot_at(st, *term, *slot)?,
        Step::KillTorsion { term, slot, m: k } => {
            slot_at(st, *term, *slot)?;
            let e = &st.terms[*term].1[*slot];
            if *k == 0 || !is_root_of_unity(e, *k, m) {
                return Err(side(format!("({})^{k} = 1 fails", e.display(&st.sigma))));
            }
        }
        Step::Scale { factor } => {
            if !ctx.start_is_zero {
                return Err(side("scaling is only sound for claims of the form 0 = X".into()));
            }
            if factor.is_zero() {
                return Err(side("scale factor must be nonzero".into()));
            }
        }
        Step::EntryFactor { term, slot, entry } => {
            slot_at(st, *term, *slot)?;
            entry.validate(m, &st.sigma)?;
            let old = &st.terms[*term].1[*slot];
            if !value_eq(old, entry, m) {
                return Err(side(format!(
                    "{} ≠ {}",
                    old.display(&st.sigma),
                    entry.display(&st.sigma)
                )));
            }
        }
        Step::EntryIdentity { term, slot, poly } => {
            slot_at(st, *term, *slot)?;
            let new = LEntry::single(poly.clone());
            new.validate(m, &st.sigma)?;
            let old = &st.terms[*term].1[*slot];
            if !value_eq(old, &new, m) {
                let (n, d) = old.parts(m);
                let rhs = match m {
                    Some(k) => poly.mul(&d).truncate(k),
                    None => poly.mul(&d),
                };
                return Err(side(format!(
                    "identity fails: {} ≠ {}",
                    n.display(&st.sigma),
                    rhs.display(&st.sigma)
                )));
            }
        }
        Step::Projection { modulus } => {
            if *modulus == 0 {
                return Err(side("projection modulus must be positive".into()));
            }
            if let Some(cur) = m {
                if *modulus > cur {
                    return Err(side(format!("cannot project from σ^{cur} to σ^{modulus}")));
                }
            }
            for (_, es) in &st.terms {
                for e in es {
                    for (f, k) in &e.atoms {
                        if *k != 0 && !f.coeff(0).is_unit() {
                            return Err(side(format!(
                                "atom {} is not a unit of A[[{}]]",
                                f.display(&st.sigma),
                                st.sigma
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(apply_step(st, step))
}

/// Applies the transformation without checking side conditions. Positions
/// must be in range.
pub fn apply_step(st: &LState, step: &Step) -> LState {
    let mut out = st.clone();
    match step {
        Step::Split { term, slot } => {
            let (c, es) = out.terms.remove(*term);
            let pieces: Vec<_> = es[*slot]
                .atoms
                .iter()
                .map(|a| {
                    let mut es = es.clone();
                    es[*slot] = LEntry { atoms: vec![a.clone()] };
                    (c.clone(), es)
                })
                .collect();
            out.terms.splice(*term..*term, pieces);
        }
        Step::Merge { term, other, slot } => {
            let extra = out.terms[*other].1[*slot].atoms.clone();
            out.terms[*term].1[*slot].atoms.extend(extra);
            out.terms.remove(*other);
        }
        Step::Absorb { term, slot, exponent } => {
            let t = &mut out.terms[*term];
            let k = t.1[*slot].atoms[0].1;
            t.0 = &t.0 * q(k) / q(*exponent);
            t.1[*slot].atoms[0].1 = *exponent;
        }
        Step::Introduce { term, coeff, entries, .. } => {
            out.terms.insert(*term, (coeff.clone(), entries.clone()));
        }
        Step::Eliminate { term, .. } | Step::KillTorsion { term, .. } => {
            out.terms.remove(*term);
        }
        Step::InverseNegation { term, slot } => {
            let t = &mut out.terms[*term];
            t.0 = -t.0.clone();
            for a in &mut t.1[*slot].atoms {
                a.1 = -a.1;
            }
        }
        Step::Scale { factor } => {
            for t in &mut out.terms {
                t.0 = &t.0 * factor;
            }
        }
        Step::EntryFactor { term, slot, entry } => out.terms[*term].1[*slot] = entry.clone(),
        Step::EntryIdentity { term, slot, poly } => {
            out.terms[*term].1[*slot] = LEntry::single(poly.clone());
        }
        Step::Projection { modulus } => {
            out.modulus = Some(*modulus);
            for t in &mut out.terms {
                for e in &mut t.1 {
                    *e = e.truncate(*modulus);
                }
            }
        }
    }
    out.normalize();
    out
}

/// True when every position the step names exists in `st`, so that
/// [`apply_step`] cannot panic.
pub fn positions_valid(st: &LState, step: &Step) -> bool {
    let n = st.terms.len();
    let d = st.degree;
    match step {
        Step::Split { term, slot }
        | Step::Absorb { term, slot, .. }
        | Step::InverseNegation { term, slot }
        | Step::KillTorsion { term, slot, .. }
        | Step::EntryFactor { term, slot, .. }
        | Step::EntryIdentity { term, slot, .. } => {
            *term < n && *slot < d && (!matches!(step, Step::Absorb { .. }) || st.terms[*term].1[*slot].atoms.len() == 1)
        }
        Step::Merge { term, other, slot } => *term < n && *other < n && term != other && *slot < d,
        Step::Introduce { term, entries, .. } => *term <= n && entries.len() == d,
        Step::Eliminate { term, slot, .. } => *term < n && slot + 1 < d,
        Step::Scale { .. } | Step::Projection { .. } => true,
    }
}
