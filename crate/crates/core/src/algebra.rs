//! Presented Artinian local ℚ-algebras `ℚ[x₁,…,x_m]/I`, their elements, and
//! truncated extensions `A[σ]/σⁿ`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::expr::{is_valid_name, parse_poly};
use crate::groebner::{groebner_basis, reduce};
use crate::kahler::OmegaData;
use crate::linalg::{to_sparse, Echelon, SparseVec};
use crate::poly::{Monomial, Poly};
use crate::{q, Error, Result, Q};

/// Upper bound on the number of standard monomials accepted for a quotient.
pub const MAX_DIMENSION: usize = 4096;

/// Presentation of an algebra as read from an algebra spec file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    #[serde(default)]
    pub variables: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
    /// Distinguished variable σ. When it is among `variables` it must be the
    /// last one; otherwise `order` is required and the algebra is the
    /// truncated extension by σ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    /// Cap on the exponent tried when checking nilpotency of standard
    /// monomials. Defaults to the dimension, which always suffices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nilpotency_bound_hint: Option<u32>,
}

impl AlgebraSpec {
    pub fn new(variables: &[&str], relations: &[&str]) -> Self {
        AlgebraSpec {
            variables: variables.iter().map(|s| s.to_string()).collect(),
            relations: relations.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn with_sigma(mut self, name: &str) -> Self {
        self.sigma = Some(name.to_string());
        self
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = Some(order);
        self
    }

    pub fn from_toml(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::Parse(format!("algebra spec: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    fn validate_names(&self) -> Result<()> {
        for (i, v) in self.variables.iter().enumerate() {
            if !is_valid_name(v) {
                return Err(Error::InvalidSpec(format!("bad variable name `{v}`")));
            }
            if self.variables[..i].contains(v) {
                return Err(Error::InvalidSpec(format!("duplicate variable `{v}`")));
            }
        }
        if let Some(s) = &self.sigma {
            if !is_valid_name(s) {
                return Err(Error::InvalidSpec(format!("bad sigma name `{s}`")));
            }
        }
        Ok(())
    }
}

/// Recorded when an algebra was built as `base[σ]/σ^order`.
#[derive(Clone, Debug)]
pub struct Extension {
    pub base: Arc<Algebra>,
    pub order: u32,
}

/// A finite-dimensional local quotient of a polynomial ring over ℚ.
pub struct Algebra {
    spec: AlgebraSpec,
    vars: Vec<String>,
    groebner: Vec<Poly>,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// `table[i][j]` is the normal form of `basis[i] * basis[j]`.
    table: Vec<Vec<SparseVec>>,
    sigma: Option<usize>,
    extension: Option<Extension>,
    omega_cache: Mutex<BTreeMap<usize, Arc<OmegaData>>>,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra")
            .field("vars", &self.vars)
            .field("relations", &self.spec.relations)
            .field("dimension", &self.dimension())
            .finish()
    }
}

/// Builds an algebra from its spec, handling the `sigma`/`order` keys.
pub fn build_algebra(spec: &AlgebraSpec) -> Result<Arc<Algebra>> {
    spec.validate_names()?;
    match (&spec.sigma, spec.order) {
        (None, Some(_)) => Err(Error::InvalidSpec("`order` given without `sigma`".into())),
        (Some(s), order) if !spec.variables.contains(s) => {
            let order = order.ok_or_else(|| {
                Error::InvalidSpec(format!("sigma `{s}` is not a variable and no `order` was given"))
            })?;
            let mut base = spec.clone();
            base.sigma = None;
            base.order = None;
            let base = build_presented(&base, None)?;
            truncated_extension(&base, s, order)
        }
        (Some(s), order) => {
            if spec.variables.last() != Some(s) {
                return Err(Error::InvalidSpec(format!(
                    "distinguished variable `{s}` must be the last variable"
                )));
            }
            let mut full = spec.clone();
            if let Some(n) = order {
                if n == 0 {
                    return Err(Error::InvalidSpec("order must be at least 1".into()));
                }
                full.relations.push(format!("{s}^{n}"));
                full.order = None;
            }
            build_presented(&full, None)
        }
        (None, None) => build_presented(spec, None),
    }
}

fn build_presented(spec: &AlgebraSpec, extension: Option<Extension>) -> Result<Arc<Algebra>> {
    spec.validate_names()?;
    let vars = spec.variables.clone();
    let nvars = vars.len();
    let gens = spec
        .relations
        .iter()
        .map(|r| parse_poly(r, &vars))
        .collect::<Result<Vec<_>>>()?;
    let groebner = groebner_basis(&gens);
    if groebner.iter().any(|g| g.leading().unwrap().0.is_one()) {
        return Err(Error::NotLocal("relations generate the unit ideal".into()));
    }
    let leads: Vec<Monomial> = groebner.iter().map(|g| g.leading().unwrap().0.clone()).collect();
    // Artinian iff every variable has a pure power among the leading monomials
    let mut bounds = Vec::with_capacity(nvars);
    for (i, var) in vars.iter().enumerate() {
        let b = leads
            .iter()
            .filter(|m| m.0.iter().enumerate().all(|(j, &e)| j == i || e == 0))
            .map(|m| m.0[i])
            .min();
        match b {
            Some(b) => bounds.push(b),
            None => {
                return Err(Error::NotArtinian(format!(
                    "no power of `{var}` lies in the initial ideal"
                )))
            }
        }
    }
    let mut basis = Vec::new();
    let mut stack = vec![Monomial::one(nvars)];
    let mut seen = std::collections::HashSet::new();
    while let Some(m) = stack.pop() {
        if !seen.insert(m.clone()) || leads.iter().any(|l| l.divides(&m)) {
            continue;
        }
        basis.push(m.clone());
        if basis.len() > MAX_DIMENSION {
            return Err(Error::NotArtinian(format!(
                "staircase exceeds {MAX_DIMENSION} monomials"
            )));
        }
        for (i, &bound) in bounds.iter().enumerate() {
            if m.0[i] + 1 < bound {
                let mut n = m.clone();
                n.0[i] += 1;
                stack.push(n);
            }
        }
    }
    // ascending degree; within a degree the larger monomial first
    basis.sort_by(|a, b| a.degree().cmp(&b.degree()).then(b.cmp(a)));
    let index: HashMap<Monomial, usize> =
        basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let to_coords = |p: &Poly| -> SparseVec {
        let mut v: SparseVec = p.terms().map(|(m, c)| (index[m], c.clone())).collect();
        v.sort_by_key(|e| e.0);
        v
    };
    let mut table = vec![vec![Vec::new(); basis.len()]; basis.len()];
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let prod = reduce(&Poly::term(basis[i].mul(&basis[j]), Q::one()), &groebner);
            let v = to_coords(&prod);
            table[j][i] = v.clone();
            table[i][j] = v;
        }
    }
    let sigma = match &spec.sigma {
        Some(s) => {
            let i = vars.iter().position(|v| v == s).ok_or_else(|| {
                Error::InvalidSpec(format!("sigma `{s}` is not a variable"))
            })?;
            if i + 1 != nvars {
                return Err(Error::InvalidSpec(format!(
                    "distinguished variable `{s}` must be the last variable"
                )));
            }
            Some(i)
        }
        None => None,
    };
    let alg = Algebra {
        spec: spec.clone(),
        vars,
        groebner,
        basis,
        index,
        table,
        sigma,
        extension,
        omega_cache: Mutex::new(BTreeMap::new()),
    };
    alg.check_local()?;
    Ok(Arc::new(alg))
}

/// `A[name]/name^order`, with `name` designated as the distinguished
/// variable.
pub fn truncated_extension(a: &Arc<Algebra>, name: &str, order: u32) -> Result<Arc<Algebra>> {
    if a.vars.iter().any(|v| v == name) {
        return Err(Error::NameCollision(name.to_string()));
    }
    if !is_valid_name(name) {
        return Err(Error::InvalidSpec(format!("bad variable name `{name}`")));
    }
    if order == 0 {
        return Err(Error::InvalidSpec("truncation order must be at least 1".into()));
    }
    let mut vars = a.vars.clone();
    vars.push(name.to_string());
    // the reduced Gröbner basis of A plus σ^order is again reduced
    let mut relations: Vec<String> = a.groebner.iter().map(|g| g.display(&a.vars)).collect();
    relations.push(format!("{name}^{order}"));
    let spec = AlgebraSpec {
        variables: vars,
        relations,
        sigma: Some(name.to_string()),
        order: None,
        nilpotency_bound_hint: None,
    };
    build_presented(&spec, Some(Extension { base: a.clone(), order }))
}

impl Algebra {
    pub fn field() -> Arc<Algebra> {
        build_algebra(&AlgebraSpec::default()).expect("ℚ builds")
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn groebner_basis(&self) -> &[Poly] {
        &self.groebner
    }

    pub fn monomial_basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn monomial_index(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn sigma_index(&self) -> Option<usize> {
        self.sigma
    }

    pub fn sigma_name(&self) -> Option<&str> {
        self.sigma.map(|i| self.vars[i].as_str())
    }

    pub fn extension(&self) -> Option<&Extension> {
        self.extension.as_ref()
    }

    pub fn same_as(&self, other: &Algebra) -> bool {
        std::ptr::eq(self, other) || (self.vars == other.vars && self.groebner == other.groebner)
    }

    pub(crate) fn product_of_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i][j]
    }

    pub(crate) fn omega_cache(&self) -> &Mutex<BTreeMap<usize, Arc<OmegaData>>> {
        &self.omega_cache
    }

    /// Relations as displayed polynomials (the reduced Gröbner basis).
    pub fn relation_strings(&self) -> Vec<String> {
        self.groebner.iter().map(|g| g.display(&self.vars)).collect()
    }

    fn check_local(&self) -> Result<()> {
        let dim = self.dimension();
        let cap = self
            .spec
            .nilpotency_bound_hint
            .map(|h| h as usize)
            .unwrap_or(dim)
            .max(1);
        for i in 1..dim {
            let mut v: Vec<Q> = vec![Q::zero(); dim];
            v[i] = Q::one();
            let m = v.clone();
            let mut k = 1;
            while !v.iter().all(Zero::is_zero) {
                if k > cap {
                    return Err(Error::NotLocal(format!(
                        "standard monomial {} is not nilpotent",
                        self.basis[i].display(&self.vars)
                    )));
                }
                v = self.mul_dense(&v, &m);
                k += 1;
            }
        }
        Ok(())
    }

    fn mul_dense(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let dim = self.dimension();
        let mut out = vec![Q::zero(); dim];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (k, c) in &self.table[i][j] {
                    out[*k] += &xy * c;
                }
            }
        }
        out
    }

    /// Coordinates of the normal form of a polynomial in this ring.
    pub fn coords_of_poly(&self, p: &Poly) -> Vec<Q> {
        let r = reduce(p, &self.groebner);
        let mut v = vec![Q::zero(); self.dimension()];
        for (m, c) in r.terms() {
            v[self.index[m]] = c.clone();
        }
        v
    }
}

/// Reduces a polynomial expression to its normal form in `a`.
pub fn normal_form(a: &Arc<Algebra>, expr: &str) -> Result<AlgebraElement> {
    AlgebraElement::parse(a, expr)
}

/// An element of an [`Algebra`], held as coordinates on the monomial basis.
#[derive(Clone)]
pub struct AlgebraElement {
    alg: Arc<Algebra>,
    coords: Vec<Q>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.alg.same_as(&other.alg) && self.coords == other.coords
    }
}

impl Eq for AlgebraElement {}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement({self})")
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_poly().display(&self.alg.vars))
    }
}

impl AlgebraElement {
    pub fn from_coords(alg: &Arc<Algebra>, coords: Vec<Q>) -> Self {
        assert_eq!(coords.len(), alg.dimension(), "coordinate length");
        AlgebraElement { alg: alg.clone(), coords }
    }

    pub fn zero(alg: &Arc<Algebra>) -> Self {
        Self::from_coords(alg, vec![Q::zero(); alg.dimension()])
    }

    pub fn constant(alg: &Arc<Algebra>, c: Q) -> Self {
        let mut e = Self::zero(alg);
        e.coords[0] = c;
        e
    }

    pub fn one(alg: &Arc<Algebra>) -> Self {
        Self::constant(alg, Q::one())
    }

    pub fn integer(alg: &Arc<Algebra>, n: i64) -> Self {
        Self::constant(alg, q(n))
    }

    pub fn basis_monomial(alg: &Arc<Algebra>, i: usize) -> Self {
        let mut e = Self::zero(alg);
        e.coords[i] = Q::one();
        e
    }

    pub fn var(alg: &Arc<Algebra>, i: usize) -> Self {
        Self::from_poly(alg, &Poly::var(alg.nvars(), i))
    }

    pub fn from_poly(alg: &Arc<Algebra>, p: &Poly) -> Self {
        Self::from_coords(alg, alg.coords_of_poly(p))
    }

    pub fn parse(alg: &Arc<Algebra>, expr: &str) -> Result<Self> {
        Ok(Self::from_poly(alg, &parse_poly(expr, &alg.vars)?))
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn sparse(&self) -> SparseVec {
        to_sparse(&self.coords)
    }

    pub fn to_poly(&self) -> Poly {
        let mut p = Poly::zero(self.alg.nvars());
        for (i, c) in self.coords.iter().enumerate() {
            p.add_term(self.alg.basis[i].clone(), c.clone());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    /// Coefficient of the basis monomial 1.
    pub fn augmentation(&self) -> &Q {
        &self.coords[0]
    }

    /// True when the element has no non-constant part.
    pub fn is_constant(&self) -> bool {
        self.coords[1..].iter().all(Zero::is_zero)
    }

    pub fn is_unit(&self) -> bool {
        !self.coords[0].is_zero()
    }

    fn check(&self, other: &Self) {
        assert!(self.alg.same_as(&other.alg), "elements of different algebras");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Self::from_coords(&self.alg, coords)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        Self::from_coords(&self.alg, coords)
    }

    pub fn neg(&self) -> Self {
        Self::from_coords(&self.alg, self.coords.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::from_coords(&self.alg, self.coords.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        Self::from_coords(&self.alg, self.alg.mul_dense(&self.coords, &other.coords))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(&self.alg);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Integer power, inverting first for negative exponents.
    pub fn pow_signed(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            Ok(self.inverse()?.pow(k.unsigned_abs() as u32))
        }
    }

    /// Inverse of a unit via the geometric series on the nilpotent part.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit(self.to_string()));
        }
        let a0 = self.coords[0].clone();
        let inv0 = a0.recip();
        // u = a0 (1 + n) with n nilpotent
        let mut n = self.scale(&inv0);
        n.coords[0] -= Q::one();
        let minus_n = n.neg();
        let mut term = Self::one(&self.alg);
        let mut sum = Self::one(&self.alg);
        for _ in 0..self.alg.dimension() {
            term = term.mul(&minus_n);
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term);
        }
        Ok(sum.scale(&inv0))
    }

    /// `log(u)` for a 1-unit, a finite sum by nilpotency.
    pub fn log_one_unit(&self) -> Result<Self> {
        if !self.coords[0].is_one() {
            return Err(Error::NotOneUnit(self.to_string()));
        }
        let mut n = self.clone();
        n.coords[0] = Q::zero();
        let mut power = Self::one(&self.alg);
        let mut sum = Self::zero(&self.alg);
        for k in 1..=self.alg.dimension() as i64 {
            power = power.mul(&n);
            if power.is_zero() {
                break;
            }
            let c = Q::new(if k % 2 == 1 { 1.into() } else { (-1).into() }, k.into());
            sum = sum.add(&power.scale(&c));
        }
        Ok(sum)
    }

    /// Truncated exponential of a nilpotent element.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        if !self.coords[0].is_zero() {
            return Err(Error::NotOneUnit(format!("exp of non-nilpotent {self}")));
        }
        let mut term = Self::one(&self.alg);
        let mut sum = Self::one(&self.alg);
        for k in 1..=self.alg.dimension() as i64 {
            term = term.mul(self).scale(&Q::new(1.into(), k.into()));
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term);
        }
        Ok(sum)
    }
}

pub fn is_unit(e: &AlgebraElement) -> bool {
    e.is_unit()
}

pub fn invert_unit(u: &AlgebraElement) -> Result<AlgebraElement> {
    u.inverse()
}

pub fn log_one_unit(u: &AlgebraElement) -> Result<AlgebraElement> {
    u.log_one_unit()
}

/// A ℚ-algebra map between presented algebras determined by the images of
/// the source variables.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    source: Arc<Algebra>,
    target: Arc<Algebra>,
    var_images: Vec<AlgebraElement>,
    basis_images: Vec<AlgebraElement>,
}

impl AlgebraMap {
    pub fn by_variables(
        source: &Arc<Algebra>,
        target: &Arc<Algebra>,
        var_images: Vec<AlgebraElement>,
    ) -> Self {
        assert_eq!(var_images.len(), source.nvars());
        let basis_images = source
            .basis
            .iter()
            .map(|m| {
                let mut e = AlgebraElement::one(target);
                for (i, &k) in m.0.iter().enumerate() {
                    e = e.mul(&var_images[i].pow(k));
                }
                e
            })
            .collect();
        AlgebraMap { source: source.clone(), target: target.clone(), var_images, basis_images }
    }

    /// Sends each source variable to the target variable of the same name,
    /// or to zero when the target has no such variable.
    pub fn by_names(source: &Arc<Algebra>, target: &Arc<Algebra>) -> Self {
        let imgs = source
            .vars
            .iter()
            .map(|v| match target.vars.iter().position(|w| w == v) {
                Some(j) => AlgebraElement::var(target, j),
                None => AlgebraElement::zero(target),
            })
            .collect();
        Self::by_variables(source, target, imgs)
    }

    pub fn source(&self) -> &Arc<Algebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Algebra> {
        &self.target
    }

    pub fn var_images(&self) -> &[AlgebraElement] {
        &self.var_images
    }

    pub fn apply(&self, e: &AlgebraElement) -> AlgebraElement {
        assert!(e.alg.same_as(&self.source), "element outside the map's source");
        let mut out = AlgebraElement::zero(&self.target);
        for (i, c) in e.coords.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.basis_images[i].scale(c));
            }
        }
        out
    }

    /// Evaluates a source-ring polynomial at the variable images.
    pub fn eval_poly(&self, p: &Poly) -> AlgebraElement {
        let mut out = AlgebraElement::zero(&self.target);
        for (m, c) in p.terms() {
            let mut e = AlgebraElement::constant(&self.target, c.clone());
            for (i, &k) in m.0.iter().enumerate() {
                e = e.mul(&self.var_images[i].pow(k));
            }
            out = out.add(&e);
        }
        out
    }

    /// Every defining relation of the source maps to zero.
    pub fn is_well_defined(&self) -> bool {
        self.source.groebner.iter().all(|g| self.eval_poly(g).is_zero())
    }

    pub fn image_rank(&self) -> usize {
        Echelon::from_rows(
            self.target.dimension(),
            self.basis_images.iter().map(|e| e.sparse()),
        )
        .rank()
    }

    pub fn is_surjective(&self) -> bool {
        self.image_rank() == self.target.dimension()
    }
}

/// Inclusion `A ↪ A[σ]/σⁿ` for an algebra built by [`truncated_extension`].
pub fn inclusion(ext: &Arc<Algebra>) -> Result<AlgebraMap> {
    let e = ext.extension().ok_or(Error::SigmaNotDesignated)?;
    Ok(AlgebraMap::by_names(&e.base, ext))
}

/// Projection `A[σ]/σⁿ⁺¹ → A[σ]/σⁿ` between extensions of the same base.
pub fn projection(from: &Arc<Algebra>, to: &Arc<Algebra>) -> Result<AlgebraMap> {
    let (a, b) = (
        from.extension().ok_or(Error::SigmaNotDesignated)?,
        to.extension().ok_or(Error::SigmaNotDesignated)?,
    );
    if !a.base.same_as(&b.base) || from.vars != to.vars || b.order > a.order {
        return Err(Error::AlgebraMismatch);
    }
    Ok(AlgebraMap::by_names(from, to))
}

/// σ-adic view of elements of a truncated extension.
impl AlgebraElement {
    /// Coefficients `c_k ∈ A` with `self = Σ c_k σ^k`, for `k < order`.
    pub fn sigma_coefficients(&self) -> Result<Vec<AlgebraElement>> {
        let ext = self.alg.extension().ok_or(Error::SigmaNotDesignated)?;
        let base = &ext.base;
        let s = self.alg.nvars() - 1;
        let mut out = vec![AlgebraElement::zero(base); ext.order as usize];
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = &self.alg.basis[i];
            let k = m.0[s] as usize;
            let bm = Monomial(m.0[..s].to_vec());
            let j = base.index[&bm];
            out[k].coords[j] += c;
        }
        Ok(out)
    }

    /// Builds `Σ c_k σ^k` in the extension `ext` from base coefficients.
    pub fn from_sigma_coefficients(ext: &Arc<Algebra>, coeffs: &[AlgebraElement]) -> Result<Self> {
        let e = ext.extension().ok_or(Error::SigmaNotDesignated)?;
        let mut out = AlgebraElement::zero(ext);
        for (k, c) in coeffs.iter().enumerate() {
            if k as u32 >= e.order {
                break;
            }
            for (j, x) in c.coords.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let mut m = e.base.basis[j].0.clone();
                m.push(k as u32);
                let i = ext.index[&Monomial(m)];
                out.coords[i] += x;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(vars: &[&str], rels: &[&str]) -> Arc<Algebra> {
        build_algebra(&AlgebraSpec::new(vars, rels)).unwrap()
    }

    fn show_basis(a: &Algebra) -> Vec<String> {
        a.monomial_basis().iter().map(|m| m.display(a.vars())).collect()
    }

    #[test]
    fn staircases() {
        assert_eq!(show_basis(&alg(&["t"], &["t^3"])), ["1", "t", "t^2"]);
        assert_eq!(show_basis(&alg(&[], &[])), ["1"]);
        assert_eq!(show_basis(&alg(&["x", "y"], &["x^2", "x*y", "y^2"])), ["1", "x", "y"]);
    }

    #[test]
    fn build_errors() {
        let e = build_algebra(&AlgebraSpec::new(&["t"], &["t^2 + "])).unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
        let e = build_algebra(&AlgebraSpec::new(&["x", "y"], &["x^2"])).unwrap_err();
        assert!(matches!(e, Error::NotArtinian(_)));
        // t^2 = t has the idempotent t
        let e = build_algebra(&AlgebraSpec::new(&["t"], &["t^2 - t"])).unwrap_err();
        assert!(matches!(e, Error::NotLocal(_)));
        let e = build_algebra(&AlgebraSpec::new(&["t", "t"], &["t"])).unwrap_err();
        assert!(matches!(e, Error::InvalidSpec(_)));
        let e = build_algebra(&AlgebraSpec::new(&["t"], &["1"])).unwrap_err();
        assert!(matches!(e, Error::NotLocal(_)));
    }

    #[test]
    fn normal_forms() {
        let a = alg(&["t"], &["t^3"]);
        assert_eq!(normal_form(&a, "t^3 + t + 1").unwrap(), normal_form(&a, "1 + t").unwrap());
        assert_eq!(normal_form(&a, "(1+t)*(1-t)").unwrap().to_string(), "1 - t^2");
        let b = alg(&["x", "y"], &["x^2", "x*y", "y^2"]);
        assert_eq!(normal_form(&b, "x*y + x").unwrap().to_string(), "x");
        assert!(normal_form(&a, "t + z").is_err());
    }

    #[test]
    fn units_and_inverses() {
        let a = alg(&["t"], &["t^3"]);
        let u = normal_form(&a, "1 + t").unwrap();
        assert!(is_unit(&u));
        assert!(!is_unit(&normal_form(&a, "t").unwrap()));
        assert_eq!(invert_unit(&u).unwrap(), normal_form(&a, "1 - t + t^2").unwrap());
        assert!(matches!(invert_unit(&normal_form(&a, "t").unwrap()), Err(Error::NotAUnit(_))));
        let b = alg(&["x", "y"], &["x^2", "x*y", "y^2"]);
        assert!(is_unit(&normal_form(&b, "2 + x + y").unwrap()));
        let s = alg(&["s"], &["s^2"]);
        let v = normal_form(&s, "1 - s").unwrap();
        assert_eq!(invert_unit(&v).unwrap(), normal_form(&s, "1 + s").unwrap());
        assert!(invert_unit(&AlgebraElement::one(&s)).unwrap().is_one());
    }

    #[test]
    fn logarithms() {
        let s2 = alg(&["s", "c"], &["s^2", "c^2"]);
        let u = normal_form(&s2, "1 + c*s").unwrap();
        assert_eq!(log_one_unit(&u).unwrap(), normal_form(&s2, "c*s").unwrap());
        let s3 = alg(&["s"], &["s^3"]);
        let u = normal_form(&s3, "1 + s").unwrap();
        assert_eq!(log_one_unit(&u).unwrap(), normal_form(&s3, "s - 1/2*s^2").unwrap());
        assert!(log_one_unit(&AlgebraElement::one(&s3)).unwrap().is_zero());
        assert!(matches!(log_one_unit(&normal_form(&s3, "2").unwrap()), Err(Error::NotOneUnit(_))));
        assert_eq!(log_one_unit(&u).unwrap().exp_nilpotent().unwrap(), u);
    }

    #[test]
    fn extensions() {
        let q = Algebra::field();
        let e = truncated_extension(&q, "s", 3).unwrap();
        assert_eq!(e.dimension(), 3);
        let a = alg(&["t"], &["t^2"]);
        let e = truncated_extension(&a, "s", 2).unwrap();
        assert_eq!(show_basis(&e), ["1", "t", "s", "t*s"]);
        assert_eq!(truncated_extension(&a, "s", 1).unwrap().dimension(), 2);
        assert!(matches!(truncated_extension(&a, "t", 2), Err(Error::NameCollision(_))));

        let e3 = truncated_extension(&a, "s", 3).unwrap();
        let p = projection(&e3, &e).unwrap();
        let x = normal_form(&e3, "1 + t*s + s^2").unwrap();
        assert_eq!(p.apply(&x), normal_form(&e, "1 + t*s").unwrap());
        assert!(p.is_surjective() && p.is_well_defined());
        let i = inclusion(&e).unwrap();
        assert_eq!(i.apply(&normal_form(&a, "2 + t").unwrap()).to_string(), "2 + t");

        let cs = x.sigma_coefficients().unwrap();
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[1].to_string(), "t");
        assert_eq!(AlgebraElement::from_sigma_coefficients(&e3, &cs).unwrap(), x);
    }

    #[test]
    fn spec_file_keys() {
        let spec = AlgebraSpec::from_toml(
            "variables = [\"t\"]\nrelations = [\"t^2\"]\nsigma = \"s\"\norder = 3\n",
        )
        .unwrap();
        let a = build_algebra(&spec).unwrap();
        assert_eq!(a.dimension(), 6);
        assert_eq!(a.sigma_name(), Some("s"));
        let spec = AlgebraSpec::new(&["t", "s"], &["t^2", "t*s"]).with_sigma("s").with_order(3);
        let b = build_algebra(&spec).unwrap();
        assert_eq!(b.dimension(), 4);
        let bad = AlgebraSpec::new(&["s", "t"], &["t^2", "s^2"]).with_sigma("s");
        assert!(build_algebra(&bad).is_err());
    }
}
