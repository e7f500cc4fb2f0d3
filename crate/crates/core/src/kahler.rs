//! Kähler differentials `Ω^p_{A/ℚ}` of a presented algebra as explicit
//! finite-dimensional ℚ-vector spaces.
//!
//! `Ω^p` is the free `A`-module on the wedges `dx_I` (`|I| = p`) modulo the
//! `A`-span of `dF ∧ dx_J` for `F` in the reduced Gröbner basis and
//! `|J| = p - 1`. Over ℚ this is the span of `b · dF ∧ dx_J` for standard
//! monomials `b`, so the quotient is computed by exact row reduction.
//!
//! Ambient coordinates are indexed by (monomial, wedge). Columns are laid out
//! with the largest monomial first, so each relation pivots on its highest
//! monomial and the surviving basis consists of low-degree representatives.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{truncated_extension, Algebra, AlgebraElement, AlgebraMap};
use crate::linalg::{to_sparse, Echelon, Matrix, SparseVec};
use crate::{fmt_q, Error, Result, Q};

/// Per-algebra, per-degree presentation data, cached inside the algebra.
#[derive(Debug)]
pub struct OmegaData {
    degree: usize,
    wedges: Vec<Vec<usize>>,
    wedge_index: HashMap<Vec<usize>, usize>,
    relations: Echelon,
    /// Ambient column of each quotient basis vector, in listing order.
    basis_cols: Vec<usize>,
    col_to_basis: HashMap<usize, usize>,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Sign and union of `dx_I ∧ dx_J` for sorted index sets; `None` if they
/// overlap.
fn merge_wedges(a: &[usize], b: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut inversions = 0usize;
    for x in a {
        for y in b {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    Some((inversions % 2 == 1, u))
}

impl OmegaData {
    fn ambient_col(&self, dim: usize, mono: usize, wedge: usize) -> usize {
        (dim - 1 - mono) * self.wedges.len() + wedge
    }

    fn split_col(&self, dim: usize, col: usize) -> (usize, usize) {
        let nw = self.wedges.len();
        (dim - 1 - col / nw, col % nw)
    }

    fn build(alg: &Algebra, p: usize) -> OmegaData {
        let nvars = alg.nvars();
        let dim = alg.dimension();
        let wedges = subsets(nvars, p);
        let wedge_index: HashMap<Vec<usize>, usize> =
            wedges.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut data = OmegaData {
            degree: p,
            wedges,
            wedge_index,
            relations: Echelon::new(dim * subsets(nvars, p).len()),
            basis_cols: Vec::new(),
            col_to_basis: HashMap::new(),
        };
        if p >= 1 && !data.wedges.is_empty() {
            let lower = subsets(nvars, p - 1);
            let grads: Vec<Vec<SparseVec>> = alg
                .groebner_basis()
                .iter()
                .map(|g| (0..nvars).map(|i| to_sparse(&alg.coords_of_poly(&g.derivative(i)))).collect())
                .collect();
            let mut rows = Vec::new();
            for grad in &grads {
                for j in &lower {
                    for b in 0..dim {
                        let mut terms: Vec<(usize, Q)> = Vec::new();
                        for (i, coeff) in grad.iter().enumerate() {
                            if coeff.is_empty() {
                                continue;
                            }
                            let Some((neg, w)) = merge_wedges(&[i], j) else { continue };
                            let wi = data.wedge_index[&w];
                            for (m, c) in coeff {
                                for (k, x) in alg.product_of_basis(b, *m) {
                                    let v = c * x;
                                    let v = if neg { -v } else { v };
                                    terms.push((data.ambient_col(dim, *k, wi), v));
                                }
                            }
                        }
                        rows.push(collect_sparse(terms));
                    }
                }
            }
            for r in rows {
                if !r.is_empty() {
                    data.relations.insert(r);
                }
            }
        }
        let mut free: Vec<(usize, usize, usize)> = data
            .relations
            .free_columns()
            .into_iter()
            .map(|c| {
                let (m, w) = data.split_col(dim, c);
                (w, m, c)
            })
            .collect();
        free.sort_unstable();
        data.basis_cols = free.iter().map(|e| e.2).collect();
        data.col_to_basis = data.basis_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        data
    }
}

fn sort_with_sign(w: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut inversions = 0usize;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if w[i] == w[j] {
                return None;
            }
            if w[i] > w[j] {
                inversions += 1;
            }
        }
    }
    let mut v = w.to_vec();
    v.sort_unstable();
    Some((inversions % 2 == 1, v))
}

fn collect_sparse(terms: Vec<(usize, Q)>) -> SparseVec {
    let mut map: std::collections::BTreeMap<usize, Q> = std::collections::BTreeMap::new();
    for (c, v) in terms {
        *map.entry(c).or_insert_with(Q::zero) += v;
    }
    map.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// `Ω^p_{A/ℚ}` with a chosen ℚ-basis.
#[derive(Clone)]
pub struct OmegaModule {
    alg: Arc<Algebra>,
    data: Arc<OmegaData>,
}

impl fmt::Debug for OmegaModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ω^{} (dim {}) of {:?}", self.data.degree, self.dimension(), self.alg)
    }
}

pub fn omega_module(alg: &Arc<Algebra>, p: usize) -> OmegaModule {
    let data = {
        let mut cache = alg.omega_cache().lock().expect("omega cache poisoned");
        cache
            .entry(p)
            .or_insert_with(|| Arc::new(OmegaData::build(alg, p)))
            .clone()
    };
    OmegaModule { alg: alg.clone(), data }
}

impl OmegaModule {
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn degree(&self) -> usize {
        self.data.degree
    }

    pub fn dimension(&self) -> usize {
        self.data.basis_cols.len()
    }

    pub fn same_as(&self, other: &OmegaModule) -> bool {
        self.data.degree == other.data.degree && self.alg.same_as(&other.alg)
    }

    /// Basis vector `i` as (monomial index, wedge index set).
    pub fn basis_vector(&self, i: usize) -> (usize, &[usize]) {
        let (m, w) = self.data.split_col(self.alg.dimension(), self.data.basis_cols[i]);
        (m, &self.data.wedges[w])
    }

    pub fn basis_labels(&self) -> Vec<String> {
        (0..self.dimension())
            .map(|i| {
                let (m, w) = self.basis_vector(i);
                label(&self.alg, m, w)
            })
            .collect()
    }

    /// Rank of the relation submodule inside the free module.
    pub fn relation_rank(&self) -> usize {
        self.data.relations.rank()
    }

    pub fn zero(&self) -> DifferentialForm {
        DifferentialForm { module: self.clone(), coords: vec![Q::zero(); self.dimension()] }
    }

    pub fn basis_form(&self, i: usize) -> DifferentialForm {
        let mut f = self.zero();
        f.coords[i] = Q::one();
        f
    }

    pub fn from_coords(&self, coords: Vec<Q>) -> DifferentialForm {
        assert_eq!(coords.len(), self.dimension());
        DifferentialForm { module: self.clone(), coords }
    }

    /// Form `Σ e_k dx_{I_k}` from element-valued coefficients on index
    /// lists; unsorted lists are sorted with sign, repeated indices vanish.
    pub fn from_terms(&self, terms: &[(AlgebraElement, Vec<usize>)]) -> DifferentialForm {
        let dim = self.alg.dimension();
        let mut amb = Vec::new();
        for (e, w) in terms {
            let Some((neg, w)) = sort_with_sign(w) else { continue };
            let wi = self.data.wedge_index[&w];
            for (m, c) in e.coords().iter().enumerate() {
                if !c.is_zero() {
                    let v = if neg { -c.clone() } else { c.clone() };
                    amb.push((self.data.ambient_col(dim, m, wi), v));
                }
            }
        }
        self.project(collect_sparse(amb))
    }

    fn project(&self, ambient: SparseVec) -> DifferentialForm {
        let r = self.data.relations.reduce(&ambient);
        let mut f = self.zero();
        for (c, v) in r {
            f.coords[self.data.col_to_basis[&c]] = v;
        }
        f
    }

    fn lift<'a>(&self, f: &'a DifferentialForm) -> Vec<(usize, usize, &'a Q)> {
        f.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let (m, w) = self.data.split_col(self.alg.dimension(), self.data.basis_cols[i]);
                (m, w, c)
            })
            .collect()
    }

    /// Matrix of multiplication by the `k`-th basis monomial of the algebra,
    /// acting on coordinate columns.
    pub fn action_table(&self, k: usize) -> Matrix {
        let n = self.dimension();
        let mono = AlgebraElement::basis_monomial(&self.alg, k);
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let img = self.basis_form(j).scale_by(&mono);
            for (i, c) in img.coords.iter().enumerate() {
                m.set(i, j, c.clone());
            }
        }
        m
    }
}

fn label(alg: &Algebra, m: usize, w: &[usize]) -> String {
    let mono = alg.monomial_basis()[m].display(alg.vars());
    let wedge: Vec<String> = w.iter().map(|&i| format!("d{}", alg.vars()[i])).collect();
    match (mono.as_str(), wedge.is_empty()) {
        (_, true) => mono,
        ("1", false) => wedge.join("/\\"),
        _ => format!("{}*{}", mono, wedge.join("/\\")),
    }
}

/// An element of some `Ω^p_{A/ℚ}`.
#[derive(Clone)]
pub struct DifferentialForm {
    module: OmegaModule,
    coords: Vec<Q>,
}

impl PartialEq for DifferentialForm {
    fn eq(&self, other: &Self) -> bool {
        self.module.same_as(&other.module) && self.coords == other.coords
    }
}

impl Eq for DifferentialForm {}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}]({})", self.module.degree(), self)
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = self.module.basis_labels();
        let mut parts = Vec::new();
        for (c, l) in self.coords.iter().zip(&labels) {
            if c.is_zero() {
                continue;
            }
            parts.push(if c.is_one() { l.clone() } else { format!("{}*{}", fmt_q(c), l) });
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl DifferentialForm {
    pub fn module(&self) -> &OmegaModule {
        &self.module
    }

    pub fn degree(&self) -> usize {
        self.module.degree()
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.module.same_as(&other.module) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(self.module.from_coords(coords))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        Ok(self.module.from_coords(coords))
    }

    pub fn neg(&self) -> Self {
        self.module.from_coords(self.coords.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.module.from_coords(self.coords.iter().map(|a| a * c).collect())
    }

    /// The `A`-module action.
    pub fn scale_by(&self, e: &AlgebraElement) -> Self {
        let alg = &self.module.alg;
        assert!(alg.same_as(e.algebra()), "scalar from a different algebra");
        let dim = alg.dimension();
        let data = &self.module.data;
        let es = e.sparse();
        let mut amb = Vec::new();
        for (m, w, c) in self.module.lift(self) {
            for (k, x) in &es {
                for (r, y) in alg.product_of_basis(m, *k) {
                    amb.push((data.ambient_col(dim, *r, w), c * x * y));
                }
            }
        }
        self.module.project(collect_sparse(amb))
    }

    /// Graded-commutative wedge product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let alg = &self.module.alg;
        if !alg.same_as(&other.module.alg) {
            return Err(Error::AlgebraMismatch);
        }
        let target = omega_module(alg, self.degree() + other.degree());
        let dim = alg.dimension();
        let mut amb = Vec::new();
        for (m1, w1, c1) in self.module.lift(self) {
            for (m2, w2, c2) in other.module.lift(other) {
                let Some((neg, w)) =
                    merge_wedges(&self.module.data.wedges[w1], &other.module.data.wedges[w2])
                else {
                    continue;
                };
                let wi = target.data.wedge_index[&w];
                let c = c1 * c2;
                let c = if neg { -c } else { c };
                for (r, y) in alg.product_of_basis(m1, m2) {
                    amb.push((target.data.ambient_col(dim, *r, wi), &c * y));
                }
            }
        }
        Ok(target.project(collect_sparse(amb)))
    }

    /// Exterior derivative `Ω^p → Ω^{p+1}`.
    pub fn d(&self) -> Self {
        let alg = &self.module.alg;
        let target = omega_module(alg, self.degree() + 1);
        let dim = alg.dimension();
        let mut amb = Vec::new();
        for (m, w, c) in self.module.lift(self) {
            let mono = &alg.monomial_basis()[m];
            for i in 0..alg.nvars() {
                if mono.0[i] == 0 {
                    continue;
                }
                let Some((neg, u)) = merge_wedges(&[i], &self.module.data.wedges[w]) else {
                    continue;
                };
                let wi = target.data.wedge_index[&u];
                let mut dm = mono.clone();
                dm.0[i] -= 1;
                // divisors of standard monomials are standard
                let k = alg.monomial_index(&dm).expect("divisor of a standard monomial");
                let v = c * Q::from_integer(mono.0[i].into());
                amb.push((target.data.ambient_col(dim, k, wi), if neg { -v } else { v }));
            }
        }
        target.project(collect_sparse(amb))
    }

    /// Image under the map of differential forms induced by `map`.
    pub fn pushforward(&self, map: &AlgebraMap) -> Result<Self> {
        if !map.source().same_as(&self.module.alg) {
            return Err(Error::AlgebraMismatch);
        }
        let tgt = map.target();
        let dvars: Vec<DifferentialForm> = map.var_images().iter().map(d).collect();
        let mut out = omega_module(tgt, self.degree()).zero();
        for (m, w, c) in self.module.lift(self) {
            let mut f = as_form(&map.apply(&AlgebraElement::basis_monomial(&self.module.alg, m)));
            for &i in &self.module.data.wedges[w] {
                f = f.wedge(&dvars[i])?;
            }
            out = out.add(&f.scale(c))?;
        }
        Ok(out)
    }

    /// Degree-0 forms are algebra elements.
    pub fn as_element(&self) -> Option<AlgebraElement> {
        (self.degree() == 0).then(|| AlgebraElement::from_coords(&self.module.alg, self.coords.clone()))
    }

    /// Ambient coordinates as (monomial index, wedge set, coefficient).
    pub fn terms(&self) -> Vec<(usize, Vec<usize>, Q)> {
        self.module
            .lift(self)
            .into_iter()
            .map(|(m, w, c)| (m, self.module.data.wedges[w].clone(), c.clone()))
            .collect()
    }
}

/// An algebra element as a 0-form.
pub fn as_form(e: &AlgebraElement) -> DifferentialForm {
    omega_module(e.algebra(), 0).from_coords(e.coords().to_vec())
}

/// Universal derivation on elements.
pub fn d(e: &AlgebraElement) -> DifferentialForm {
    as_form(e).d()
}

pub fn wedge(f: &DifferentialForm, g: &DifferentialForm) -> Result<DifferentialForm> {
    f.wedge(g)
}

/// `du · u⁻¹`.
pub fn dlog(u: &AlgebraElement) -> Result<DifferentialForm> {
    let inv = u.inverse()?;
    Ok(d(u).scale_by(&inv))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Match,
    Literal,
    Corrected,
    Neither,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Match => "match",
            Verdict::Literal => "literal",
            Verdict::Corrected => "corrected",
            Verdict::Neither => "neither",
        })
    }
}

/// Dimension count of `Ω^p` of `A[σ]/σⁿ` against the two-summand splittings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub n: u32,
    pub p: usize,
    pub direct_dim: usize,
    /// `dim Ω¹_A · n + dim A · dim Ω¹_{ℚ[σ]/σⁿ}`, for `p = 1`.
    pub eq5_dim: Option<usize>,
    /// `dim Ω^p_A · n + dim Ω^p_A · dim Ω¹_{ℚ[σ]/σⁿ}`, for `p ≥ 2`.
    pub eq6_literal_dim: Option<usize>,
    /// `dim Ω^p_A · n + dim Ω^{p-1}_A · dim Ω¹_{ℚ[σ]/σⁿ}`, for `p ≥ 2`.
    pub eq6_corrected_dim: Option<usize>,
    pub verdict: Verdict,
}

pub fn decomposition_report(
    a: &Arc<Algebra>,
    sigma: &str,
    n: u32,
    p: usize,
) -> Result<DecompositionReport> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidSpec("decomposition needs n ≥ 1 and p ≥ 1".into()));
    }
    let ext = truncated_extension(a, sigma, n)?;
    let direct = omega_module(&ext, p).dimension();
    let line = truncated_extension(&Algebra::field(), sigma, n)?;
    let line_omega1 = omega_module(&line, 1).dimension();
    let nn = n as usize;
    let om_p = omega_module(a, p).dimension();
    let om_pm1 = omega_module(a, p - 1).dimension();
    let mut report = DecompositionReport {
        n,
        p,
        direct_dim: direct,
        eq5_dim: None,
        eq6_literal_dim: None,
        eq6_corrected_dim: None,
        verdict: Verdict::Neither,
    };
    if p == 1 {
        let eq5 = om_p * nn + a.dimension() * line_omega1;
        report.eq5_dim = Some(eq5);
        report.verdict = if eq5 == direct { Verdict::Match } else { Verdict::Neither };
    } else {
        let lit = om_p * nn + om_p * line_omega1;
        let cor = om_p * nn + om_pm1 * line_omega1;
        report.eq6_literal_dim = Some(lit);
        report.eq6_corrected_dim = Some(cor);
        report.verdict = match (lit == direct, cor == direct) {
            (true, true) => Verdict::Match,
            (true, false) => Verdict::Literal,
            (false, true) => Verdict::Corrected,
            (false, false) => Verdict::Neither,
        };
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_algebra, normal_form, AlgebraSpec};
    use crate::q;

    fn alg(vars: &[&str], rels: &[&str]) -> Arc<Algebra> {
        build_algebra(&AlgebraSpec::new(vars, rels)).unwrap()
    }

    #[test]
    fn truncated_line_basis() {
        let a = alg(&["t"], &["t^3"]);
        let om = omega_module(&a, 1);
        assert_eq!(om.dimension(), 2);
        assert_eq!(om.basis_labels(), ["dt", "t*dt"]);
        assert_eq!(omega_module(&a, 0).dimension(), 3);
        assert_eq!(omega_module(&a, 2).dimension(), 0);
        assert_eq!(omega_module(&Algebra::field(), 1).dimension(), 0);
    }

    #[test]
    fn square_zero_plane() {
        let a = alg(&["x", "y"], &["x^2", "x*y", "y^2"]);
        let om2 = omega_module(&a, 2);
        assert_eq!(om2.basis_labels(), ["dx/\\dy"]);
        let x = normal_form(&a, "x").unwrap();
        let y = normal_form(&a, "y").unwrap();
        let dxdy = d(&x).wedge(&d(&y)).unwrap();
        assert_eq!(dxdy.coords(), &[q(1)]);
        // d(x dy) = dx ∧ dy
        assert_eq!(d(&y).scale_by(&x).d(), dxdy);
        assert_eq!(d(&y).wedge(&d(&x)).unwrap(), dxdy.neg());
    }

    #[test]
    fn derivation_basics() {
        let a = alg(&["t"], &["t^3"]);
        let t2 = normal_form(&a, "t^2").unwrap();
        let t = normal_form(&a, "t").unwrap();
        assert_eq!(d(&t2), d(&t).scale_by(&t).scale(&q(2)));
        assert!(d(&AlgebraElement::one(&a)).is_zero());
        assert!(d(&t).wedge(&d(&t)).unwrap().is_zero());
        assert!(d(&t).d().is_zero());
    }

    #[test]
    fn dlog_values() {
        let a = alg(&["t"], &["t^3"]);
        let u = normal_form(&a, "1 + t").unwrap();
        assert_eq!(dlog(&u).unwrap().coords(), &[q(1), q(-1)]);
        assert!(dlog(&normal_form(&a, "5").unwrap()).unwrap().is_zero());
        let inv = u.inverse().unwrap();
        assert!(dlog(&u).unwrap().add(&dlog(&inv).unwrap()).unwrap().is_zero());
        assert!(matches!(dlog(&t_elem(&a)), Err(Error::NotAUnit(_))));
    }

    fn t_elem(a: &Arc<Algebra>) -> AlgebraElement {
        normal_form(a, "t").unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let a = alg(&["t"], &["t^2"]);
        let r = decomposition_report(&a, "s", 2, 1).unwrap();
        assert_eq!((r.direct_dim, r.eq5_dim, r.verdict), (4, Some(4), Verdict::Match));
        let r = decomposition_report(&a, "s", 2, 2).unwrap();
        assert_eq!(r.direct_dim, 1);
        assert_eq!(r.eq6_literal_dim, Some(0));
        assert_eq!(r.eq6_corrected_dim, Some(1));
        assert_eq!(r.verdict, Verdict::Corrected);
        let r = decomposition_report(&Algebra::field(), "s", 3, 1).unwrap();
        assert_eq!((r.direct_dim, r.eq5_dim, r.verdict), (2, Some(2), Verdict::Match));
        assert!(matches!(decomposition_report(&a, "t", 2, 1), Err(Error::NameCollision(_))));
    }

    #[test]
    fn direct_basis_of_extension() {
        let a = alg(&["t"], &["t^2"]);
        let e = truncated_extension(&a, "s", 2).unwrap();
        assert_eq!(omega_module(&e, 1).basis_labels(), ["dt", "s*dt", "ds", "t*ds"]);
    }
}
