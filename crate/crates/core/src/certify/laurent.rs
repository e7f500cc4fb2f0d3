//! Polynomials in σ with coefficients in a base algebra `A`, formal products
//! of them with integer exponents, and the symbol-combination states the
//! rewrite checker works on.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::{Algebra, AlgebraElement};
use crate::expr::parse_poly;
use crate::milnor::{format_combination, format_entry, parse_combination, parse_entry};
use crate::poly::{Monomial, Poly};
use crate::{Error, Result, Q};

/// `Σ_k c_k σ^k` with `c_k ∈ A`; no trailing zero coefficients.
#[derive(Clone)]
pub struct SPoly {
    alg: Arc<Algebra>,
    coeffs: Vec<AlgebraElement>,
}

impl fmt::Debug for SPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SPoly({})", self.display("s"))
    }
}

impl SPoly {
    pub fn from_coeffs(alg: &Arc<Algebra>, mut coeffs: Vec<AlgebraElement>) -> Self {
        while coeffs.last().is_some_and(AlgebraElement::is_zero) {
            coeffs.pop();
        }
        SPoly { alg: alg.clone(), coeffs }
    }

    pub fn zero(alg: &Arc<Algebra>) -> Self {
        Self::from_coeffs(alg, Vec::new())
    }

    pub fn constant(c: AlgebraElement) -> Self {
        let alg = c.algebra().clone();
        Self::from_coeffs(&alg, vec![c])
    }

    pub fn one(alg: &Arc<Algebra>) -> Self {
        Self::constant(AlgebraElement::one(alg))
    }

    /// `c·σ^k`.
    pub fn monomial(c: AlgebraElement, k: usize) -> Self {
        let alg = c.algebra().clone();
        let mut coeffs = vec![AlgebraElement::zero(&alg); k];
        coeffs.push(c);
        Self::from_coeffs(&alg, coeffs)
    }

    pub fn sigma(alg: &Arc<Algebra>) -> Self {
        Self::monomial(AlgebraElement::one(alg), 1)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn coeffs(&self) -> &[AlgebraElement] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> AlgebraElement {
        self.coeffs.get(k).cloned().unwrap_or_else(|| AlgebraElement::zero(&self.alg))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn low(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|k| self.coeff(k).add(&other.coeff(k))).collect();
        Self::from_coeffs(&self.alg, c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(&self.alg, self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.alg);
        }
        let mut c = vec![AlgebraElement::zero(&self.alg); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(&self.alg, c)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(&self.alg), |acc, _| acc.mul(self))
    }

    /// Drops every term of degree ≥ `n`.
    pub fn truncate(&self, n: u32) -> Self {
        Self::from_coeffs(&self.alg, self.coeffs.iter().take(n as usize).cloned().collect())
    }

    /// `self / σ^k`, assuming the low degree is at least `k`.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::from_coeffs(&self.alg, self.coeffs[k.min(self.coeffs.len())..].to_vec())
    }

    /// Parses an expression in the variables of `A` followed by `sigma`.
    pub fn parse(alg: &Arc<Algebra>, sigma: &str, src: &str) -> Result<Self> {
        let mut vars = alg.vars().to_vec();
        if vars.iter().any(|v| v == sigma) {
            return Err(Error::NameCollision(sigma.to_string()));
        }
        vars.push(sigma.to_string());
        let p = parse_poly(src, &vars)?;
        let m = alg.nvars();
        let mut parts: Vec<Poly> = Vec::new();
        for (mono, c) in p.terms() {
            let k = mono.0[m] as usize;
            if parts.len() <= k {
                parts.resize(k + 1, Poly::zero(m));
            }
            parts[k].add_term(Monomial(mono.0[..m].to_vec()), c.clone());
        }
        let coeffs = parts.iter().map(|q| AlgebraElement::from_poly(alg, q)).collect();
        Ok(Self::from_coeffs(alg, coeffs))
    }

    pub fn to_poly(&self) -> Poly {
        let m = self.alg.nvars();
        let mut out = Poly::zero(m + 1);
        for (k, c) in self.coeffs.iter().enumerate() {
            for (mono, x) in c.to_poly().terms() {
                let mut e = mono.0.clone();
                e.push(k as u32);
                out.add_term(Monomial(e), x.clone());
            }
        }
        out
    }

    pub fn display(&self, sigma: &str) -> String {
        let mut vars = self.alg.vars().to_vec();
        vars.push(sigma.to_string());
        self.to_poly().display(&vars)
    }

    /// Image in `ext = A[σ]/σ^M` (terms of degree ≥ M vanish).
    pub fn to_element(&self, ext: &Arc<Algebra>) -> Result<AlgebraElement> {
        AlgebraElement::from_sigma_coefficients(ext, &self.coeffs)
    }

    /// Hashable identity of the coefficients.
    pub fn key(&self) -> Vec<Vec<Q>> {
        self.coeffs.iter().map(|c| c.coords().to_vec()).collect()
    }
}

/// A formal product `∏ fᵢ^{mᵢ}` of σ-polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LEntry {
    pub atoms: Vec<(SPoly, i64)>,
}

impl LEntry {
    pub fn single(f: SPoly) -> Self {
        LEntry { atoms: vec![(f, 1)] }
    }

    /// Checks that every atom is invertible in the ambient ring: the lowest
    /// coefficient is a unit of `A` in the Laurent context, the constant
    /// coefficient is a unit of `A` in `A[σ]/σ^N`.
    pub fn validate(&self, modulus: Option<u32>, sigma: &str) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::Parse("symbol entry with no atoms".into()));
        }
        for (f, m) in &self.atoms {
            if *m == 0 {
                continue;
            }
            let ok = match modulus {
                None => f.low().is_some_and(|k| f.coeff(k).is_unit()),
                Some(_) => f.coeff(0).is_unit(),
            };
            if !ok {
                return Err(Error::NonUnitEntry(f.display(sigma)));
            }
        }
        Ok(())
    }

    /// Numerator and denominator of the collapsed value.
    pub fn parts(&self, modulus: Option<u32>) -> (SPoly, SPoly) {
        let alg = self.atoms[0].0.algebra();
        let trunc = |p: SPoly| match modulus {
            Some(n) => p.truncate(n),
            None => p,
        };
        let (mut num, mut den) = (SPoly::one(alg), SPoly::one(alg));
        for (f, m) in &self.atoms {
            let f = trunc(f.clone());
            for _ in 0..m.unsigned_abs() {
                if *m > 0 {
                    num = trunc(num.mul(&f));
                } else {
                    den = trunc(den.mul(&f));
                }
            }
        }
        (num, den)
    }

    pub fn truncate(&self, n: u32) -> LEntry {
        LEntry { atoms: self.atoms.iter().map(|(f, m)| (f.truncate(n), *m)).collect() }
    }

    pub fn max_degree(&self) -> usize {
        self.atoms.iter().filter_map(|(f, _)| f.degree()).max().unwrap_or(0)
    }

    pub fn display(&self, sigma: &str) -> String {
        let atoms: Vec<(String, i64)> = self.atoms.iter().map(|(f, m)| (f.display(sigma), *m)).collect();
        format_entry(&atoms)
    }

    pub fn parse(alg: &Arc<Algebra>, sigma: &str, src: &str) -> Result<Self> {
        let atoms = parse_entry(src)?
            .into_iter()
            .map(|(t, m)| Ok((SPoly::parse(alg, sigma, &t)?, m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(LEntry { atoms })
    }
}

fn trunc_opt(p: SPoly, modulus: Option<u32>) -> SPoly {
    match modulus {
        Some(n) => p.truncate(n),
        None => p,
    }
}

/// Collapsed values agree.
pub fn value_eq(a: &LEntry, b: &LEntry, modulus: Option<u32>) -> bool {
    let (an, ad) = a.parts(modulus);
    let (bn, bd) = b.parts(modulus);
    trunc_opt(an.mul(&bd), modulus) == trunc_opt(bn.mul(&ad), modulus)
}

/// Collapsed values `x`, `y` satisfy `x + y = target`, checked by clearing
/// denominators. Returns the two sides of the cleared identity on failure.
pub fn sum_check(a: &LEntry, b: &LEntry, target: &SPoly, modulus: Option<u32>) -> std::result::Result<(), (SPoly, SPoly)> {
    let (an, ad) = a.parts(modulus);
    let (bn, bd) = b.parts(modulus);
    let lhs = trunc_opt(an.mul(&bd).add(&bn.mul(&ad)), modulus);
    let rhs = trunc_opt(target.mul(&ad).mul(&bd), modulus);
    if lhs == rhs {
        Ok(())
    } else {
        Err((lhs, rhs))
    }
}

/// `value^m = 1`.
pub fn is_root_of_unity(a: &LEntry, m: i64, modulus: Option<u32>) -> bool {
    let (n, d) = a.parts(modulus);
    let k = m.unsigned_abs() as u32;
    trunc_opt(n.pow(k), modulus) == trunc_opt(d.pow(k), modulus)
}

pub type LTerm = (Q, Vec<LEntry>);

/// A ℚ-combination of symbols with σ-polynomial entries, living either over
/// the Laurent ring `A((σ))` (`modulus = None`) or over `A[σ]/σ^N`.
#[derive(Clone, Debug)]
pub struct LState {
    pub base: Arc<Algebra>,
    pub sigma: String,
    pub modulus: Option<u32>,
    pub degree: usize,
    pub terms: Vec<LTerm>,
}

impl LState {
    pub fn zero(base: &Arc<Algebra>, sigma: &str, degree: usize) -> Self {
        LState { base: base.clone(), sigma: sigma.to_string(), modulus: None, degree, terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merges structurally equal terms (first occurrence keeps its place)
    /// and drops zero coefficients.
    pub fn normalize(&mut self) {
        let mut out: Vec<LTerm> = Vec::with_capacity(self.terms.len());
        for (c, es) in self.terms.drain(..) {
            match out.iter_mut().find(|(_, f)| *f == es) {
                Some(t) => t.0 += c,
                None => out.push((c, es)),
            }
        }
        out.retain(|(c, _)| !c.is_zero());
        self.terms = out;
    }

    /// Equality up to value-equal entries: terms whose entries are slotwise
    /// value-equal are combined before comparing coefficients.
    pub fn value_equal(&self, other: &LState) -> bool {
        if self.degree != other.degree || self.modulus != other.modulus {
            return false;
        }
        let m = self.modulus;
        let mut classes: Vec<(Vec<LEntry>, Q)> = Vec::new();
        let mut add = |es: &Vec<LEntry>, c: Q| {
            match classes
                .iter_mut()
                .find(|(f, _)| f.iter().zip(es).all(|(a, b)| value_eq(a, b, m)))
            {
                Some(cl) => cl.1 += c,
                None => classes.push((es.clone(), c)),
            }
        };
        for (c, es) in &self.terms {
            add(es, c.clone());
        }
        for (c, es) in &other.terms {
            add(es, -c.clone());
        }
        classes.iter().all(|(_, c)| c.is_zero())
    }

    pub fn display(&self) -> String {
        let terms: Vec<(Q, String)> = self
            .terms
            .iter()
            .map(|(c, es)| {
                let parts: Vec<String> = es.iter().map(|e| e.display(&self.sigma)).collect();
                (c.clone(), format!("{{{}}}", parts.join(", ")))
            })
            .collect();
        format_combination(&terms)
    }

    /// Parses `q1*{...} + ...` over the Laurent ring. `degree` is used for
    /// the zero combination.
    pub fn parse(base: &Arc<Algebra>, sigma: &str, degree: usize, src: &str) -> Result<Self> {
        let mut st = LState::zero(base, sigma, degree);
        for (c, entries) in parse_combination(src)? {
            if entries.len() != degree {
                return Err(Error::Parse(format!("expected {degree} entries per symbol in `{src}`")));
            }
            let es = entries
                .iter()
                .map(|e| {
                    let e = LEntry::parse(base, sigma, e)?;
                    e.validate(None, sigma)?;
                    Ok(e)
                })
                .collect::<Result<Vec<_>>>()?;
            st.terms.push((c, es));
        }
        st.normalize();
        Ok(st)
    }

    pub fn max_degree(&self) -> usize {
        self.terms.iter().flat_map(|(_, es)| es.iter().map(LEntry::max_degree)).max().unwrap_or(0)
    }
}

impl PartialEq for SPoly {
    fn eq(&self, other: &Self) -> bool {
        self.alg.same_as(&other.alg) && self.coeffs == other.coeffs
    }
}

impl Eq for SPoly {}

impl PartialEq for LState {
    fn eq(&self, other: &Self) -> bool {
        self.base.same_as(&other.base)
            && self.sigma == other.sigma
            && self.modulus == other.modulus
            && self.degree == other.degree
            && self.terms == other.terms
    }
}

impl Eq for LState {}
