//! Milnor symbols with formal-product entries, their dlog realization in
//! `Ω^p`, the generator families of the relative groups `φ_{p,n}`, and the
//! evaluation map onto `Ω^{p-1}_A ⊗ σⁿ/σⁿ⁺¹`.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{
    build_algebra, inclusion, truncated_extension, Algebra, AlgebraElement, AlgebraMap,
    AlgebraSpec,
};
use crate::family::{coefficient_grid, unit_grid};
use crate::kahler::{as_form, dlog, omega_module, DifferentialForm, OmegaModule};
use crate::linalg::{to_sparse, Echelon};
use crate::poly::{Monomial, Poly};
use crate::{fmt_q, Error, Result, Q};

/// A formal product `∏ aᵢ^{mᵢ}` of units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolEntry {
    atoms: Vec<(AlgebraElement, i64)>,
}

impl SymbolEntry {
    pub fn new(atoms: Vec<(AlgebraElement, i64)>) -> Result<Self> {
        let Some((first, _)) = atoms.first() else {
            return Err(Error::InvalidSpec("symbol entry with no atoms".into()));
        };
        let alg = first.algebra().clone();
        for (a, m) in &atoms {
            if !a.algebra().same_as(&alg) {
                return Err(Error::AlgebraMismatch);
            }
            if *m != 0 && !a.is_unit() {
                return Err(Error::NonUnitEntry(a.to_string()));
            }
        }
        Ok(SymbolEntry { atoms })
    }

    pub fn single(a: AlgebraElement) -> Result<Self> {
        Self::new(vec![(a, 1)])
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.atoms[0].0.algebra()
    }

    pub fn atoms(&self) -> &[(AlgebraElement, i64)] {
        &self.atoms
    }

    /// The product with inverses materialized.
    pub fn value(&self) -> AlgebraElement {
        let mut v = AlgebraElement::one(self.algebra());
        for (a, m) in &self.atoms {
            v = v.mul(&a.pow_signed(*m).expect("atoms are units"));
        }
        v
    }

    pub fn dlog(&self) -> DifferentialForm {
        let mut out = omega_module(self.algebra(), 1).zero();
        for (a, m) in &self.atoms {
            if *m != 0 {
                let f = dlog(a).expect("atoms are units").scale(&Q::from_integer((*m).into()));
                out = out.add(&f).expect("same algebra");
            }
        }
        out
    }

    pub fn map(&self, f: &AlgebraMap) -> SymbolEntry {
        SymbolEntry { atoms: self.atoms.iter().map(|(a, m)| (f.apply(a), *m)).collect() }
    }
}

impl fmt::Display for SymbolEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let texts: Vec<(String, i64)> = self.atoms.iter().map(|(a, m)| (a.to_string(), *m)).collect();
        f.write_str(&format_entry(&texts))
    }
}

/// An ordered list of entries over one algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilnorSymbol {
    entries: Vec<SymbolEntry>,
}

impl MilnorSymbol {
    pub fn new(entries: Vec<SymbolEntry>) -> Result<Self> {
        if let Some(first) = entries.first() {
            let alg = first.algebra();
            if entries.iter().any(|e| !e.algebra().same_as(alg)) {
                return Err(Error::AlgebraMismatch);
            }
        }
        Ok(MilnorSymbol { entries })
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[SymbolEntry] {
        &self.entries
    }

    /// `dlog e₁ ∧ … ∧ dlog e_p`.
    pub fn realize(&self, alg: &Arc<Algebra>) -> DifferentialForm {
        let mut out = as_form(&AlgebraElement::one(alg));
        for e in &self.entries {
            out = out.wedge(&e.dlog()).expect("same algebra");
        }
        out
    }

    pub fn map(&self, f: &AlgebraMap) -> MilnorSymbol {
        MilnorSymbol { entries: self.entries.iter().map(|e| e.map(f)).collect() }
    }
}

impl fmt::Display for MilnorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A ℚ-linear combination of degree-`p` symbols over one algebra.
#[derive(Clone, Debug)]
pub struct SymbolCombination {
    alg: Arc<Algebra>,
    degree: usize,
    terms: Vec<(Q, MilnorSymbol)>,
}

/// Structural equality: same terms in the same order.
impl PartialEq for SymbolCombination {
    fn eq(&self, other: &Self) -> bool {
        self.alg.same_as(&other.alg) && self.degree == other.degree && self.terms == other.terms
    }
}

impl Eq for SymbolCombination {}

impl SymbolCombination {
    pub fn zero(alg: &Arc<Algebra>, degree: usize) -> Self {
        SymbolCombination { alg: alg.clone(), degree, terms: Vec::new() }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[(Q, MilnorSymbol)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·s`, merging with a structurally equal symbol if present.
    pub fn push(&mut self, c: Q, s: MilnorSymbol) -> Result<()> {
        if s.degree() != self.degree {
            return Err(Error::InvalidSpec(format!(
                "degree {} symbol in a degree {} combination",
                s.degree(),
                self.degree
            )));
        }
        if s.entries.first().is_some_and(|e| !e.algebra().same_as(&self.alg)) {
            return Err(Error::AlgebraMismatch);
        }
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.iter().position(|(_, t)| *t == s) {
            Some(i) => {
                self.terms[i].0 += c;
                if self.terms[i].0.is_zero() {
                    self.terms.remove(i);
                }
            }
            None => self.terms.push((c, s)),
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.alg.same_as(&other.alg) {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = self.clone();
        for (c, s) in &other.terms {
            out.push(c.clone(), s.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(&self.alg, self.degree);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(a, s)| (a * c, s.clone())).collect();
        }
        out
    }

    pub fn map(&self, f: &AlgebraMap) -> Result<Self> {
        if !f.source().same_as(&self.alg) {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = Self::zero(f.target(), self.degree);
        for (c, s) in &self.terms {
            out.push(c.clone(), s.map(f))?;
        }
        Ok(out)
    }
}

impl fmt::Display for SymbolCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(Q, String)> = self.terms.iter().map(|(c, s)| (c.clone(), s.to_string())).collect();
        f.write_str(&format_combination(&terms))
    }
}

/// A single-term combination `coeff·{entries}`.
pub fn make_symbol(entries: Vec<SymbolEntry>, coeff: Q) -> Result<SymbolCombination> {
    let alg = entries
        .first()
        .map(|e| e.algebra().clone())
        .ok_or_else(|| Error::InvalidSpec("symbol needs at least one entry".into()))?;
    for e in &entries {
        if !e.value().is_unit() {
            return Err(Error::NonUnitEntry(e.to_string()));
        }
    }
    let s = MilnorSymbol::new(entries)?;
    let mut out = SymbolCombination::zero(&alg, s.degree());
    out.push(coeff, s)?;
    Ok(out)
}

/// Convenience: a symbol whose entries are single elements.
pub fn symbol_of(elements: &[AlgebraElement], coeff: Q) -> Result<SymbolCombination> {
    let entries = elements
        .iter()
        .map(|a| {
            if a.is_unit() {
                SymbolEntry::single(a.clone())
            } else {
                Err(Error::NonUnitEntry(a.to_string()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    make_symbol(entries, coeff)
}

/// `Σ qᵢ · dlog u₁ ∧ … ∧ dlog u_p` in `Ω^p` of the combination's algebra.
pub fn dlog_realize(s: &SymbolCombination) -> DifferentialForm {
    let mut out = omega_module(&s.alg, s.degree).zero();
    for (c, sym) in &s.terms {
        out = out.add(&sym.realize(&s.alg).scale(c)).expect("same module");
    }
    out
}

/// Sample values feeding the generator families.
#[derive(Clone, Debug)]
pub struct PhiSamples {
    pub coefficients: Vec<AlgebraElement>,
    pub units: Vec<AlgebraElement>,
}

impl PhiSamples {
    /// The deterministic grid over `a`.
    pub fn grid(a: &Arc<Algebra>) -> Self {
        PhiSamples { coefficients: coefficient_grid(a), units: unit_grid(a) }
    }
}

fn sigma_shift(ext: &Arc<Algebra>, c: &AlgebraElement, n: u32) -> Result<AlgebraElement> {
    let base = &ext.extension().ok_or(Error::SigmaNotDesignated)?.base;
    let mut coeffs = vec![AlgebraElement::zero(base); n as usize + 1];
    coeffs[0] = AlgebraElement::one(base);
    coeffs[n as usize] = c.clone();
    AlgebraElement::from_sigma_coefficients(ext, &coeffs)
}

fn tuples(units: &[AlgebraElement], k: usize) -> Vec<Vec<AlgebraElement>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                units.iter().map(move |u| {
                    let mut t = t.clone();
                    t.push(u.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Generators of `φ_{p,n}` over `ext = A[σ]/σⁿ⁺¹`: first
/// `{1+cσⁿ, u₁, …, u_{p-1}}` for every coefficient sample `c`, then
/// `{1+eσⁿ, 1-σ, u₂, …, u_{p-1}}` for every coefficient sample `e` that is a
/// unit. Samples live in the base `A`.
pub fn phi_generators(
    ext: &Arc<Algebra>,
    n: u32,
    p: usize,
    samples: &PhiSamples,
) -> Result<Vec<SymbolCombination>> {
    let info = ext.extension().ok_or(Error::SigmaNotDesignated)?;
    if info.order != n + 1 || n == 0 || p < 2 {
        return Err(Error::InvalidSpec(format!(
            "generators of φ_{{{p},{n}}} need p ≥ 2, n ≥ 1 and an extension of order n+1"
        )));
    }
    let iota = inclusion(ext)?;
    let units: Vec<AlgebraElement> = samples.units.iter().map(|u| iota.apply(u)).collect();
    let one_minus_sigma = sigma_shift(ext, &AlgebraElement::integer(&info.base, -1), 1)?;
    let mut out = Vec::new();
    for c in &samples.coefficients {
        let first = sigma_shift(ext, c, n)?;
        for t in tuples(&units, p - 1) {
            let mut es = vec![first.clone()];
            es.extend(t);
            out.push(symbol_of(&es, Q::one())?);
        }
    }
    for e in samples.coefficients.iter().filter(|e| e.is_unit()) {
        let first = sigma_shift(ext, e, n)?;
        for t in tuples(&units, p - 2) {
            let mut es = vec![first.clone(), one_minus_sigma.clone()];
            es.extend(t);
            out.push(symbol_of(&es, Q::one())?);
        }
    }
    Ok(out)
}

/// Image of a generator-shaped combination under
/// `{1+cσⁿ, u₁, …} ↦ c · dlog u₁ ∧ … ⊗ σⁿ`. The σⁿ factor is kept as the tag
/// `sigma_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem2Image {
    pub form: DifferentialForm,
    pub sigma_power: u32,
}

fn shape_error(s: &MilnorSymbol, why: &str) -> Error {
    Error::NotGeneratorShape(format!("{s}: {why}"))
}

pub fn theorem2_eval(g: &SymbolCombination, n: u32) -> Result<Theorem2Image> {
    let info = g.alg.extension().ok_or(Error::SigmaNotDesignated)?;
    let base = info.base.clone();
    if n == 0 || info.order < n + 1 || g.degree == 0 {
        return Err(Error::NotGeneratorShape(format!(
            "need n ≥ 1, degree ≥ 1 and an extension of order ≥ {}",
            n + 1
        )));
    }
    let one_minus_sigma = sigma_shift(&g.alg, &AlgebraElement::integer(&base, -1), 1)?;
    let mut out = omega_module(&base, g.degree - 1).zero();
    for (q, s) in &g.terms {
        let first = s.entries[0].value().sigma_coefficients()?;
        if !first[0].is_one() || first[1..n as usize].iter().any(|x| !x.is_zero()) {
            return Err(shape_error(s, "first entry is not 1 + c·σⁿ mod σⁿ⁺¹"));
        }
        let c = first[n as usize].clone();
        let mut form = as_form(&c);
        let mut vanishes = false;
        for e in &s.entries[1..] {
            let v = e.value();
            if v == one_minus_sigma {
                vanishes = true;
                continue;
            }
            let coeffs = v.sigma_coefficients()?;
            if coeffs[1..].iter().any(|x| !x.is_zero()) {
                return Err(shape_error(s, "later entry is neither σ-free nor 1 - σ"));
            }
            form = form.wedge(&dlog(&coeffs[0])?)?;
        }
        if !vanishes {
            out = out.add(&form.scale(q))?;
        }
    }
    Ok(Theorem2Image { form: out, sigma_power: n })
}

/// `TK_p(A) → Ω^{p-1}_A` for combinations over `A[ε]/ε²`.
pub fn tangent_realize(s: &SymbolCombination) -> Result<DifferentialForm> {
    match s.alg.extension() {
        Some(e) if e.order == 2 => Ok(theorem2_eval(s, 1)?.form),
        _ => Err(Error::NotGeneratorShape("tangent symbols live over A[ε]/ε²".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanVerdict {
    pub rank: usize,
    pub dim: usize,
    pub spans: bool,
    /// Indices of targets forming a basis of their span, in first-seen order.
    pub basis: Vec<usize>,
}

pub fn span_check(targets: &[DifferentialForm], m: &OmegaModule) -> Result<SpanVerdict> {
    let mut ech = Echelon::new(m.dimension());
    let mut basis = Vec::new();
    for (i, t) in targets.iter().enumerate() {
        if !t.module().same_as(m) {
            return Err(Error::AlgebraMismatch);
        }
        if ech.insert(to_sparse(t.coords())) {
            basis.push(i);
        }
    }
    let rank = ech.rank();
    Ok(SpanVerdict { rank, dim: m.dimension(), spans: rank == m.dimension(), basis })
}

/// Rank of the Theorem-2 images of the sample-grid generators against
/// `dim Ω^{p-1}_A`.
pub fn theorem2_span(a: &Arc<Algebra>, sigma: &str, n: u32, p: usize) -> Result<SpanVerdict> {
    let ext = truncated_extension(a, sigma, n + 1)?;
    let gens = phi_generators(&ext, n, p, &PhiSamples::grid(a))?;
    let images = gens
        .iter()
        .map(|g| theorem2_eval(g, n).map(|t| t.form))
        .collect::<Result<Vec<_>>>()?;
    span_check(&images, &omega_module(a, p - 1))
}

/// Outcome of transporting the Theorem-2 picture along
/// `τ: A'[λ]/λⁿ⁺¹ → B/σⁿ⁺¹`, `A' = B/σ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransportReport {
    pub n: u32,
    pub quotient_dim: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub tau_well_defined: bool,
    pub tau_surjective: bool,
    /// `dim B/σⁿ⁺¹ - dim B/σⁿ`.
    pub graded_piece_dim: usize,
    /// σⁿ = 0 in `B`.
    pub degenerate: bool,
    pub generators_checked: usize,
    pub compatible: bool,
}

impl TransportReport {
    pub fn holds(&self) -> bool {
        self.tau_well_defined && self.tau_surjective && self.compatible
    }
}

fn quotient_by_sigma_power(b: &Arc<Algebra>, s: usize, k: u32) -> Result<Arc<Algebra>> {
    let mut spec = AlgebraSpec {
        variables: b.vars().to_vec(),
        relations: b.relation_strings(),
        sigma: b.sigma_name().map(str::to_string),
        order: None,
        nilpotency_bound_hint: None,
    };
    spec.relations.push(format!("{}^{k}", b.vars()[s]));
    build_algebra(&spec)
}

/// `B/σ` as an algebra in the remaining variables.
fn quotient_by_sigma(b: &Arc<Algebra>, s: usize) -> Result<Arc<Algebra>> {
    let vars: Vec<String> = b.vars()[..s].to_vec();
    let relations: Vec<String> = b
        .groebner_basis()
        .iter()
        .map(|g| {
            // σ is the last variable, so dropping it truncates exponent vectors
            let mut h = Poly::zero(s);
            for (m, c) in g.kill_var(s).terms() {
                h.add_term(Monomial(m.0[..s].to_vec()), c.clone());
            }
            h
        })
        .filter(|g| !g.is_zero())
        .map(|g| g.display(&vars))
        .collect();
    let spec = AlgebraSpec {
        variables: vars,
        relations,
        sigma: None,
        order: None,
        nilpotency_bound_hint: None,
    };
    build_algebra(&spec).map_err(|e| match e {
        Error::NotLocal(m) | Error::NotArtinian(m) => Error::QuotientNotLocal(m),
        other => other,
    })
}

pub fn tau_transport(b: &Arc<Algebra>, n: u32) -> Result<TransportReport> {
    let s = b.sigma_index().ok_or(Error::SigmaNotDesignated)?;
    if s + 1 != b.nvars() {
        return Err(Error::SigmaNotDesignated);
    }
    if n == 0 {
        return Err(Error::InvalidSpec("transport needs n ≥ 1".into()));
    }
    let a = quotient_by_sigma(b, s)?;
    let target = quotient_by_sigma_power(b, s, n + 1)?;
    let lower = quotient_by_sigma_power(b, s, n)?;
    let lambda = if a.vars().iter().any(|v| v == "lambda") { "lambda_" } else { "lambda" };
    let source = truncated_extension(&a, lambda, n + 1)?;
    let images: Vec<AlgebraElement> =
        (0..b.nvars()).map(|i| AlgebraElement::var(&target, i)).collect();
    let tau = AlgebraMap::by_variables(&source, &target, images);
    let sigma_n = AlgebraElement::var(b, s).pow(n);
    let mut report = TransportReport {
        n,
        quotient_dim: a.dimension(),
        source_dim: source.dimension(),
        target_dim: target.dimension(),
        tau_well_defined: tau.is_well_defined(),
        tau_surjective: tau.is_surjective(),
        graded_piece_dim: target.dimension() - lower.dimension(),
        degenerate: sigma_n.is_zero(),
        generators_checked: 0,
        compatible: false,
    };
    if !report.tau_well_defined {
        return Ok(report);
    }
    let iota = inclusion(&source)?;
    let sn = AlgebraElement::var(&target, s).pow(n);
    let mut compatible = true;
    for p in 2..=3usize {
        for g in phi_generators(&source, n, p, &PhiSamples::grid(&a))? {
            let pushed = dlog_realize(&g).pushforward(&tau)?;
            let transported = dlog_realize(&g.map(&tau)?);
            let t2 = theorem2_eval(&g, n)?.form;
            let lifted = t2.pushforward(&iota)?.pushforward(&tau)?.scale_by(&sn).d();
            compatible &= pushed == transported && pushed == lifted;
            report.generators_checked += 1;
        }
    }
    report.compatible = compatible;
    Ok(report)
}

// ---- brace notation ----

/// Splits at top-level occurrences of `sep` (outside parentheses/braces).
pub(crate) fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn has_top_level_sum(s: &str) -> bool {
    let mut depth = 0i32;
    let mut prev = ' ';
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            // a sign right after `^` belongs to an exponent
            '+' | '-' if depth == 0 && prev != '^' => return true,
            _ => {}
        }
        if !ch.is_whitespace() {
            prev = ch;
        }
    }
    false
}

/// Renders atoms `(text, exponent)` as an entry. A lone atom with exponent 1
/// is printed bare unless that would make it read as a product.
pub fn format_entry(atoms: &[(String, i64)]) -> String {
    if let [(t, 1)] = atoms {
        if has_top_level_sum(t) || split_top(t, '*').len() == 1 {
            return t.clone();
        }
    }
    atoms
        .iter()
        .map(|(t, m)| if *m == 1 { format!("({t})") } else { format!("({t})^{m}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// Inverse of [`format_entry`].
pub fn parse_entry(src: &str) -> Result<Vec<(String, i64)>> {
    let s = src.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty symbol entry".into()));
    }
    if has_top_level_sum(s) {
        return Ok(vec![(s.to_string(), 1)]);
    }
    split_top(s, '*')
        .into_iter()
        .map(|f| {
            let f = f.trim();
            if let Some(rest) = f.strip_prefix('(') {
                let close = matching_paren(rest)
                    .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in `{f}`")))?;
                let inner = &rest[..close];
                let tail = rest[close + 1..].trim();
                if tail.is_empty() {
                    return Ok((inner.trim().to_string(), 1));
                }
                if let Some(k) = tail.strip_prefix('^') {
                    let k: i64 = k
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad atom exponent in `{f}`")))?;
                    return Ok((inner.trim().to_string(), k));
                }
            }
            Ok((f.to_string(), 1))
        })
        .collect()
}

fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 1i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

/// `q1*{...} + q2*{...}`, or `0`.
pub fn format_combination(terms: &[(Q, String)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (c, s)) in terms.iter().enumerate() {
        let neg = c < &Q::zero();
        let a = if neg { -c.clone() } else { c.clone() };
        out.push_str(match (i, neg) {
            (0, false) => "",
            (0, true) => "-",
            (_, false) => " + ",
            (_, true) => " - ",
        });
        if !a.is_one() {
            out.push_str(&fmt_q(&a));
            out.push('*');
        }
        out.push_str(s);
    }
    out
}

/// Parses a combination into (coefficient, entry texts) terms.
pub fn parse_combination(src: &str) -> Result<Vec<(Q, Vec<String>)>> {
    let s = src.trim();
    if s == "0" {
        return Ok(Vec::new());
    }
    let bad = || Error::Parse(format!("malformed symbol combination `{src}`"));
    let mut out = Vec::new();
    let mut rest = s;
    let mut first = true;
    while !rest.is_empty() {
        let mut sign = Q::one();
        match rest.chars().next() {
            Some('+') if !first => rest = rest[1..].trim_start(),
            Some('-') => {
                sign = -sign;
                rest = rest[1..].trim_start();
            }
            _ if first => {}
            _ => return Err(bad()),
        }
        first = false;
        let open = rest.find('{').ok_or_else(bad)?;
        let coeff_text = rest[..open].trim();
        let coeff = if coeff_text.is_empty() {
            Q::one()
        } else {
            let t = coeff_text.strip_suffix('*').ok_or_else(bad)?.trim();
            crate::expr::parse_rational(t)?
        };
        let body = &rest[open + 1..];
        let mut depth = 1i32;
        let mut close = None;
        for (i, ch) in body.char_indices() {
            match ch {
                '{' | '(' => depth += 1,
                ')' => depth -= 1,
                '}' => {
                    depth -= 1;
                    if depth == 0 {
                        close = Some(i);
                        break;
                    }
                }
                _ => {}
            }
        }
        let close = close.ok_or_else(bad)?;
        let entries: Vec<String> =
            split_top(&body[..close], ',').into_iter().map(|e| e.trim().to_string()).collect();
        if entries.iter().any(|e| e.is_empty()) {
            return Err(bad());
        }
        out.push((sign * coeff, entries));
        rest = body[close + 1..].trim_start();
    }
    Ok(out)
}

/// Parses a combination over `alg`, each entry text read by [`parse_entry`].
pub fn parse_symbol_combination(alg: &Arc<Algebra>, src: &str) -> Result<SymbolCombination> {
    let terms = parse_combination(src)?;
    let degree = terms.first().map_or(0, |t| t.1.len());
    let mut out = SymbolCombination::zero(alg, degree);
    for (c, entries) in terms {
        let entries = entries
            .iter()
            .map(|e| {
                let atoms = parse_entry(e)?
                    .into_iter()
                    .map(|(t, m)| Ok((AlgebraElement::parse(alg, &t)?, m)))
                    .collect::<Result<Vec<_>>>()?;
                SymbolEntry::new(atoms)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(c, MilnorSymbol::new(entries)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_algebra, AlgebraSpec};
    use crate::q;

    fn alg(vars: &[&str], rels: &[&str]) -> Arc<Algebra> {
        build_algebra(&AlgebraSpec::new(vars, rels)).unwrap()
    }

    fn el(a: &Arc<Algebra>, s: &str) -> AlgebraElement {
        AlgebraElement::parse(a, s).unwrap()
    }

    #[test]
    fn make_symbol_guards_units() {
        let a = alg(&["t"], &["t^3"]);
        assert!(symbol_of(&[el(&a, "1+t"), el(&a, "2")], q(1)).is_ok());
        assert!(matches!(
            symbol_of(&[el(&a, "t"), el(&a, "1+t")], q(1)),
            Err(Error::NonUnitEntry(_))
        ));
    }

    #[test]
    fn steinberg_with_sigma_dies() {
        let a = alg(&["t"], &["t^2"]);
        let b = truncated_extension(&a, "s", 2).unwrap();
        let s = symbol_of(&[el(&b, "1+t*s"), el(&b, "1-s")], q(1)).unwrap();
        assert!(dlog_realize(&s).is_zero());
    }

    #[test]
    fn generators_over_the_field() {
        let f = Algebra::field();
        let ext = truncated_extension(&f, "s", 2).unwrap();
        let samples = PhiSamples {
            coefficients: vec![AlgebraElement::one(&f)],
            units: vec![AlgebraElement::integer(&f, 2)],
        };
        let g = phi_generators(&ext, 1, 2, &samples).unwrap();
        let text: Vec<String> = g.iter().map(|x| x.to_string()).collect();
        assert_eq!(text, ["{1 + s, 2}", "{1 + s, 1 - s}"]);
        let empty = PhiSamples { coefficients: vec![], units: vec![] };
        assert!(phi_generators(&ext, 1, 2, &empty).unwrap().is_empty());
    }

    #[test]
    fn theorem2_on_truncated_line() {
        let a = alg(&["t"], &["t^3"]);
        let ext = truncated_extension(&a, "s", 2).unwrap();
        let g = symbol_of(&[el(&ext, "1+t*s"), el(&ext, "1+t")], q(1)).unwrap();
        let img = theorem2_eval(&g, 1).unwrap();
        // t·dlog(1+t) = t·dt - t²·dt and t²·dt = 0
        assert_eq!(img.form.coords(), &[q(0), q(1)]);
        let h = symbol_of(&[el(&ext, "1+s"), el(&ext, "1-s")], q(1)).unwrap();
        assert!(theorem2_eval(&h, 1).unwrap().form.is_zero());
        let bad = symbol_of(&[el(&ext, "1+t"), el(&ext, "2")], q(1)).unwrap();
        assert!(matches!(theorem2_eval(&bad, 1), Err(Error::NotGeneratorShape(_))));
    }

    #[test]
    fn tangent_span_on_truncated_line() {
        let a = alg(&["t"], &["t^3"]);
        let ext = truncated_extension(&a, "e", 2).unwrap();
        let mut images = Vec::new();
        for c in ["1", "t", "t^2"] {
            for u in ["1+t", "2", "1-t"] {
                let g = symbol_of(&[el(&ext, &format!("1+({c})*e")), el(&ext, u)], q(1)).unwrap();
                images.push(tangent_realize(&g).unwrap());
            }
        }
        let v = span_check(&images, &omega_module(&a, 1)).unwrap();
        assert!(v.spans);
        assert_eq!((v.rank, v.dim), (2, 2));
    }

    #[test]
    fn transport_examples() {
        let b = build_algebra(&AlgebraSpec::new(&["s"], &["s^4"]).with_sigma("s")).unwrap();
        let r = tau_transport(&b, 2).unwrap();
        assert!(r.holds() && !r.degenerate);
        assert_eq!(r.graded_piece_dim, 1);
        let b = build_algebra(&AlgebraSpec::new(&["t", "s"], &["t^2", "s^3", "t*s"]).with_sigma("s"))
            .unwrap();
        let r = tau_transport(&b, 1).unwrap();
        assert!(r.holds());
        assert_eq!(r.quotient_dim, 2);
        let r = tau_transport(&b, 3).unwrap();
        assert!(r.degenerate && r.graded_piece_dim == 0);
    }

    #[test]
    fn notation_round_trips() {
        let atoms = vec![("1 - s".to_string(), 1), ("1 + 2*s^2".to_string(), -1)];
        let text = format_entry(&atoms);
        assert_eq!(text, "(1 - s)*(1 + 2*s^2)^-1");
        assert_eq!(parse_entry(&text).unwrap(), atoms);
        let lone = vec![("2*s".to_string(), 1)];
        assert_eq!(parse_entry(&format_entry(&lone)).unwrap(), lone);
        let terms = parse_combination("2*{1 + s, 2} - 1/3*{(s)^-1, 3}").unwrap();
        assert_eq!(terms[1].0, Q::new(q(-1).numer().clone(), q(3).numer().clone()));
        assert_eq!(terms[1].1, ["(s)^-1", "3"]);
    }
}
