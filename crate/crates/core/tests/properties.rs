use std::sync::Arc;

use milnor_kahler::algebra::{normal_form, Algebra, AlgebraElement};
use milnor_kahler::certify::{
    check_certificate, check_step, crosscheck_dlog, CertContext, Certificate, LEntry, LState, LTerm, Relation, SPoly,
    Step, StepContext,
};
use milnor_kahler::family::builtin_family;
use milnor_kahler::kahler::{as_form, d, omega_module, DifferentialForm};
use milnor_kahler::milnor::{dlog_realize, symbol_of};
use milnor_kahler::towers::{limit_dim, ml_window_check, surjectivity_check, Tower};
use milnor_kahler::linalg::Matrix;
use milnor_kahler::{q, Q};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..ProptestConfig::default() }
}

fn algebra(i: usize) -> Arc<Algebra> {
    builtin_family().swap_remove(i % 6).algebra
}

fn element(a: &Arc<Algebra>, coords: &[i64]) -> AlgebraElement {
    let v = (0..a.dimension()).map(|i| q(coords.get(i).copied().unwrap_or(0))).collect();
    AlgebraElement::from_coords(a, v)
}

/// `λ + nilpotent part`, a unit for `λ ≠ 0`.
fn unit(a: &Arc<Algebra>, lambda: i64, coords: &[i64]) -> AlgebraElement {
    let mut c = coords.to_vec();
    c[0] = lambda;
    element(a, &c)
}

fn coords() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 5)
}

fn lambda() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![-3i64, -2, -1, 2, 3])
}

fn form(a: &Arc<Algebra>, p: usize, c: &[i64]) -> DifferentialForm {
    let m = omega_module(a, p);
    let v = (0..m.dimension()).map(|i| q(c.get(i % c.len()).copied().unwrap_or(0) * (i as i64 % 3 - 1))).collect();
    m.from_coords(v)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn ring_axioms(i in 0usize..6, x in coords(), y in coords(), z in coords()) {
        let a = algebra(i);
        let (x, y, z) = (element(&a, &x), element(&a, &y), element(&a, &z));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert_eq!(x.add(&x.neg()), AlgebraElement::zero(&a));
        prop_assert_eq!(x.mul(&AlgebraElement::one(&a)), x);
    }

    #[test]
    fn double_inverse(i in 0usize..6, l in lambda(), c in coords()) {
        let a = algebra(i);
        let u = unit(&a, l, &c);
        let inv = u.inverse().unwrap();
        prop_assert!(u.mul(&inv).is_one());
        prop_assert_eq!(inv.inverse().unwrap(), u);
    }

    #[test]
    fn log_is_additive(i in 0usize..6, x in coords(), y in coords()) {
        let a = algebra(i);
        let (u, v) = (unit(&a, 1, &x), unit(&a, 1, &y));
        let lhs = u.mul(&v).log_one_unit().unwrap();
        let rhs = u.log_one_unit().unwrap().add(&v.log_one_unit().unwrap());
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(lhs.exp_nilpotent().unwrap(), u.mul(&v));
    }

    #[test]
    fn normal_form_is_a_ring_map(i in 1usize..6, e in 0u32..7, k in -4i64..=4, m in -4i64..=4) {
        let a = algebra(i);
        let v = a.vars()[0].clone();
        let f = format!("{k}*{v}^{e} + {m}");
        let g = format!("{v} - {k}");
        let nf = |s: &str| normal_form(&a, s).unwrap();
        prop_assert_eq!(nf(&format!("({f}) + ({g})")), nf(&f).add(&nf(&g)));
        prop_assert_eq!(nf(&format!("({f}) * ({g})")), nf(&f).mul(&nf(&g)));
    }

    #[test]
    fn d_squared_vanishes(i in 0usize..6, p in 0usize..3, c in coords()) {
        let a = algebra(i);
        prop_assert!(form(&a, p, &c).d().d().is_zero());
    }

    #[test]
    fn leibniz(i in 0usize..6, p in 0usize..2, x in coords(), y in coords(), c in coords()) {
        let a = algebra(i);
        let (x, y) = (element(&a, &x), element(&a, &y));
        prop_assert_eq!(d(&x.mul(&y)), d(&y).scale_by(&x).add(&d(&x).scale_by(&y)).unwrap());
        // d(x·ω) = dx∧ω + x·dω
        let w = form(&a, p, &c);
        let lhs = w.scale_by(&x).d();
        let rhs = d(&x).wedge(&w).unwrap().add(&w.d().scale_by(&x)).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(as_form(&x).d(), d(&x));
    }

    #[test]
    fn steinberg_and_antisymmetry(i in 0usize..6, l in prop::sample::select(vec![-2i64, -1, 2, 3]), x in coords(), y in coords()) {
        let a = algebra(i);
        let u = unit(&a, l, &x);
        let one_minus = AlgebraElement::one(&a).sub(&u);
        let zero = |es: &[AlgebraElement]| dlog_realize(&symbol_of(es, q(1)).unwrap()).is_zero();
        prop_assert!(zero(&[u.clone(), one_minus]));
        prop_assert!(zero(&[u.clone(), u.neg()]));
        let v = unit(&a, 3, &y);
        let uv = dlog_realize(&symbol_of(&[u.clone(), v.clone()], q(1)).unwrap());
        let vu = dlog_realize(&symbol_of(&[v, u], q(1)).unwrap());
        prop_assert!(uv.add(&vu).unwrap().is_zero());
    }

    #[test]
    fn slots_are_multiplicative(i in 0usize..6, x in coords(), y in coords(), z in coords(), l in lambda()) {
        let a = algebra(i);
        let (u, v, w) = (unit(&a, l, &x), unit(&a, 1, &y), unit(&a, 2, &z));
        let r = |es: &[AlgebraElement]| dlog_realize(&symbol_of(es, q(1)).unwrap());
        prop_assert_eq!(r(&[u.mul(&v), w.clone()]), r(&[u.clone(), w.clone()]).add(&r(&[v.clone(), w.clone()])).unwrap());
        prop_assert_eq!(r(&[w.clone(), u.mul(&v)]), r(&[w.clone(), u]).add(&r(&[w, v])).unwrap());
    }
}

// Rewrite rules: each rule, checked on its own instances, must leave the dlog
// realization unchanged.

const PRECISION: u32 = 12;

fn base() -> Arc<Algebra> {
    algebra(2)
}

fn sp(a: &Arc<Algebra>, coeffs: &[&[i64]]) -> SPoly {
    SPoly::from_coeffs(a, coeffs.iter().map(|c| element(a, c)).collect())
}

/// A σ-polynomial with unit constant term `l` and degree ≤ 2.
fn entry_poly() -> impl Strategy<Value = (i64, Vec<i64>, Vec<i64>)> {
    (lambda(), prop::collection::vec(-2i64..=2, 3), prop::collection::vec(-2i64..=2, 3))
}

fn make(a: &Arc<Algebra>, (l, c1, c2): &(i64, Vec<i64>, Vec<i64>)) -> SPoly {
    sp(a, &[&[*l, c1[0], c2[0]], &c1[1..], &c2[1..]])
}

fn state(a: &Arc<Algebra>, modulus: Option<u32>, terms: Vec<LTerm>) -> LState {
    let mut st = LState::zero(a, "s", terms.first().map_or(2, |t| t.1.len()));
    st.modulus = modulus;
    st.terms = terms;
    st
}

fn single(p: &SPoly) -> LEntry {
    LEntry::single(p.clone())
}

/// Applies the steps through the checker, builds the certificate ending at
/// the result, and crosschecks it.
fn sound(start: LState, steps: Vec<Step>) -> Result<(), TestCaseError> {
    let a = start.base.clone();
    let ctx = StepContext { start_is_zero: start.is_zero() };
    let mut st = start.clone();
    for s in &steps {
        st = check_step(&st, s, ctx).map_err(|e| TestCaseError::fail(format!("{} rejected: {e}", s.label())))?;
    }
    let cert = Certificate {
        context: CertContext { base: a.clone(), sigma: "s".into(), n: 1, c: AlgebraElement::one(&a) },
        start,
        goal: st,
        steps,
    };
    prop_assert!(check_certificate(&cert).valid);
    let rep = crosscheck_dlog(&cert, Some(PRECISION)).unwrap();
    prop_assert!(rep.all_agree && rep.goal_agrees, "{rep:?}");
    Ok(())
}

fn coeff() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![-3i64, -1, 1, 2, 5])
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn split_and_merge_are_sound(f in entry_poly(), g in entry_poly(), h in entry_poly(), k in 1i64..3, c in coeff()) {
        let a = base();
        let (f, g, h) = (make(&a, &f), make(&a, &g), make(&a, &h));
        let split = state(&a, None, vec![(q(c), vec![LEntry { atoms: vec![(f.clone(), 1), (g.clone(), k)] }, single(&h)])]);
        sound(split, vec![Step::Split { term: 0, slot: 0 }])?;
        let merge = state(&a, None, vec![(q(c), vec![single(&f), single(&h)]), (q(c), vec![single(&g), single(&h)])]);
        sound(merge, vec![Step::Merge { term: 0, other: 1, slot: 0 }])?;
    }

    #[test]
    fn absorb_is_sound(f in entry_poly(), h in entry_poly(), k in 1i64..4, e in 1i64..3, c in coeff()) {
        let a = base();
        let (f, h) = (make(&a, &f), make(&a, &h));
        let st = state(&a, None, vec![(q(c), vec![single(&h), LEntry { atoms: vec![(f, k)] }])]);
        sound(st, vec![Step::Absorb { term: 0, slot: 1, exponent: e }])?;
    }

    #[test]
    fn steinberg_is_sound(x in entry_poly(), f in entry_poly(), h in entry_poly(), c in coeff()) {
        let a = base();
        let x = make(&a, &x);
        let y = SPoly::one(&a).sub(&x);
        prop_assume!(y.coeff(0).is_unit());
        let (f, h) = (make(&a, &f), make(&a, &h));
        let st = state(&a, None, vec![(q(1), vec![single(&f), single(&h)])]);
        let entries = vec![single(&x), single(&y)];
        sound(st.clone(), vec![Step::Introduce { relation: Relation::Steinberg, term: 1, slot: 0, coeff: q(c), entries }])?;
        let with = state(&a, None, vec![(q(c), vec![single(&x), single(&y)]), (q(1), vec![single(&f), single(&h)])]);
        sound(with, vec![Step::Eliminate { relation: Relation::Steinberg, term: 0, slot: 0 }])?;
    }

    #[test]
    fn minus_arg_is_sound(x in entry_poly(), f in entry_poly(), h in entry_poly(), c in coeff()) {
        let a = base();
        let x = make(&a, &x);
        let (f, h) = (make(&a, &f), make(&a, &h));
        let st = state(&a, None, vec![(q(1), vec![single(&f), single(&h)])]);
        let entries = vec![single(&x), single(&x.neg())];
        sound(st, vec![Step::Introduce { relation: Relation::MinusArg, term: 0, slot: 0, coeff: q(c), entries }])?;
        let with = state(&a, None, vec![(q(1), vec![single(&f), single(&h)]), (q(c), vec![single(&x), single(&x.neg())])]);
        sound(with, vec![Step::Eliminate { relation: Relation::MinusArg, term: 1, slot: 0 }])?;
    }

    #[test]
    fn inverse_negation_is_sound(f in entry_poly(), h in entry_poly(), k in 1i64..3, slot in 0usize..2, c in coeff()) {
        let a = base();
        let (f, h) = (make(&a, &f), make(&a, &h));
        let st = state(&a, None, vec![(q(c), vec![LEntry { atoms: vec![(f, k)] }, single(&h)])]);
        sound(st, vec![Step::InverseNegation { term: 0, slot }])?;
    }

    #[test]
    fn torsion_steps_are_sound(f in entry_poly(), h in entry_poly(), c in coeff(), s in coeff()) {
        let a = base();
        let (f, h) = (make(&a, &f), make(&a, &h));
        let minus_one = SPoly::constant(AlgebraElement::integer(&a, -1));
        let st = state(&a, None, vec![(q(1), vec![single(&f), single(&h)]), (q(c), vec![single(&h), single(&minus_one)])]);
        sound(st, vec![Step::KillTorsion { term: 1, slot: 1, m: 2 }])?;
        let x = f.clone();
        let y = SPoly::one(&a).sub(&x);
        prop_assume!(y.coeff(0).is_unit());
        let zero = state(&a, None, Vec::new());
        let intro = Step::Introduce { relation: Relation::Steinberg, term: 0, slot: 0, coeff: q(c), entries: vec![single(&x), single(&y)] };
        sound(zero, vec![intro, Step::Scale { factor: Q::from_integer(s.into()) }])?;
    }

    #[test]
    fn entry_factor_is_sound(f in entry_poly(), g in entry_poly(), h in entry_poly(), c in coeff()) {
        let a = base();
        let (f, g, h) = (make(&a, &f), make(&a, &g), make(&a, &h));
        let st = state(&a, None, vec![(q(c), vec![single(&f.mul(&g)), single(&h)])]);
        let entry = LEntry { atoms: vec![(f, 1), (g, 1)] };
        sound(st, vec![Step::EntryFactor { term: 0, slot: 0, entry }])?;
    }

    #[test]
    fn entry_identity_and_projection_are_sound(f in entry_poly(), h in entry_poly(), n in 2u32..5, c in coeff()) {
        let a = base();
        let (f, h) = (make(&a, &f), make(&a, &h));
        let st = state(&a, None, vec![(q(c), vec![LEntry { atoms: vec![(f.clone(), 2)] }, single(&h)])]);
        let poly = f.mul(&f).truncate(n);
        sound(st, vec![Step::Projection { modulus: n }, Step::EntryIdentity { term: 0, slot: 0, poly }])?;
    }
}

// Towers.

fn tower_strategy() -> impl Strategy<Value = Tower> {
    (1usize..4, 1usize..4).prop_flat_map(|(d, len)| {
        prop::collection::vec(prop::collection::vec(-2i64..=2, d * d), len).prop_map(move |maps| {
            let maps = maps.iter().map(|m| Matrix::from_i64(d, d, m)).collect::<Vec<_>>();
            Tower::new(vec![d; maps.len() + 1], maps).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn tower_properties(t in tower_strategy()) {
        let surj = surjectivity_check(&t);
        let ml = ml_window_check(&t);
        let lim = limit_dim(&t);
        // The limit embeds in the bottom level.
        prop_assert!(lim.limit_dim <= t.dims()[0]);
        for l in &ml {
            prop_assert!(l.image_ranks.windows(2).all(|w| w[0] >= w[1]));
        }
        if surj.iter().all(|&b| b) {
            prop_assert_eq!(lim.limit_dim, t.dims()[0]);
            prop_assert!(lim.stabilized);
            prop_assert!(ml.iter().all(|l| l.offset.is_none_or(|o| o == 0)));
        }
    }
}
