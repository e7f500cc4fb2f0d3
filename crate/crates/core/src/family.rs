//! The fixed family of test algebras and the deterministic sample grids used
//! by the verification suites.
//!
//! The family is versioned: entries may be appended, never changed.

use std::sync::Arc;

use crate::algebra::{build_algebra, Algebra, AlgebraElement, AlgebraSpec};
use crate::{q, Q};

pub const FAMILY_VERSION: u32 = 1;

/// Default name of the distinguished variable σ.
pub const SIGMA: &str = "s";

pub struct FamilyMember {
    pub name: &'static str,
    pub algebra: Arc<Algebra>,
}

fn member(name: &'static str, vars: &[&str], rels: &[&str]) -> FamilyMember {
    let algebra = build_algebra(&AlgebraSpec::new(vars, rels)).expect("built-in algebra");
    FamilyMember { name, algebra }
}

pub fn builtin_family() -> Vec<FamilyMember> {
    vec![
        member("Q", &[], &[]),
        member("Q[t]/(t^2)", &["t"], &["t^2"]),
        member("Q[t]/(t^3)", &["t"], &["t^3"]),
        member("Q[t]/(t^5)", &["t"], &["t^5"]),
        member("Q[x,y]/(x,y)^2", &["x", "y"], &["x^2", "x*y", "y^2"]),
        member("Q[x,y]/(x^2,xy,y^2,y^3)", &["x", "y"], &["x^2", "x*y", "y^2", "y^3"]),
    ]
}

/// Coefficient samples: the monomial basis (which starts with 1).
pub fn coefficient_grid(a: &Arc<Algebra>) -> Vec<AlgebraElement> {
    (0..a.dimension()).map(|i| AlgebraElement::basis_monomial(a, i)).collect()
}

/// Unit samples: `1 + b` for each non-constant basis monomial `b`, then the
/// constants 2 and 3.
pub fn unit_grid(a: &Arc<Algebra>) -> Vec<AlgebraElement> {
    let one = AlgebraElement::one(a);
    let mut out: Vec<AlgebraElement> = (1..a.dimension())
        .map(|i| one.add(&AlgebraElement::basis_monomial(a, i)))
        .collect();
    out.push(AlgebraElement::integer(a, 2));
    out.push(AlgebraElement::integer(a, 3));
    out
}

/// Samples `a` with both `a` and `1 - a` units: `λ + μ·b` for
/// `λ ∈ {2, 3, -1, 1/2, -2/3}`, `μ ∈ {1, -2}` and `b` a non-constant basis
/// monomial, plus the bare constants `λ`.
pub fn steinberg_samples(a: &Arc<Algebra>) -> Vec<AlgebraElement> {
    let lambdas = [q(2), q(3), q(-1), Q::new(1.into(), 2.into()), Q::new((-2).into(), 3.into())];
    let mut out = Vec::new();
    for l in &lambdas {
        let c = AlgebraElement::constant(a, l.clone());
        out.push(c.clone());
        for i in 1..a.dimension() {
            let b = AlgebraElement::basis_monomial(a, i);
            for mu in [1, -2] {
                out.push(c.add(&b.scale(&q(mu))));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_dimensions() {
        let dims: Vec<usize> = builtin_family().iter().map(|m| m.algebra.dimension()).collect();
        assert_eq!(dims, [1, 2, 3, 5, 3, 3]);
    }

    #[test]
    fn grids_are_units_and_deterministic() {
        for m in builtin_family() {
            let us = unit_grid(&m.algebra);
            assert_eq!(us.len(), m.algebra.dimension() + 1);
            assert!(us.iter().all(|u| u.is_unit()));
            assert!(coefficient_grid(&m.algebra)[0].is_one());
        }
    }

    #[test]
    fn steinberg_samples_are_admissible() {
        let total: usize = builtin_family()
            .iter()
            .map(|m| {
                let one = AlgebraElement::one(&m.algebra);
                let xs = steinberg_samples(&m.algebra);
                assert!(xs.iter().all(|x| x.is_unit() && one.sub(x).is_unit()));
                xs.len()
            })
            .sum();
        assert!(total >= 100);
    }
}
