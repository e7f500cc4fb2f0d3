//! Buchberger's algorithm over ℚ in degrevlex order.

use crate::poly::{Monomial, Poly};

/// Fully reduces `f` modulo `basis`: no term of the result is divisible by a
/// leading monomial of `basis`.
pub fn reduce(f: &Poly, basis: &[Poly]) -> Poly {
    let nvars = f.nvars();
    let mut rest = f.clone();
    let mut out = Poly::zero(nvars);
    while let Some((m, c)) = rest.leading().map(|(m, c)| (m.clone(), c.clone())) {
        let divisor = basis.iter().find(|g| {
            g.leading()
                .map(|(lm, _)| lm.divides(&m))
                .unwrap_or(false)
        });
        match divisor {
            Some(g) => {
                let (lm, lc) = g.leading().unwrap();
                let factor = lm.quotient_of(&m);
                rest = rest.sub(&g.mul_term(&factor, &(c / lc)));
            }
            None => {
                rest.add_term(m.clone(), -c.clone());
                out.add_term(m, c);
            }
        }
    }
    out
}

fn s_poly(f: &Poly, g: &Poly) -> Poly {
    let (lf, cf) = f.leading().unwrap();
    let (lg, cg) = g.leading().unwrap();
    let l = lf.lcm(lg);
    let a = f.mul_term(&lf.quotient_of(&l), &cf.recip());
    let b = g.mul_term(&lg.quotient_of(&l), &cg.recip());
    a.sub(&b)
}

/// Computes the reduced Gröbner basis of the ideal generated by `gens`.
///
/// Pairs are processed in increasing order of (lcm degree, lcm, insertion
/// index), so the output is reproducible. The result is sorted by leading
/// monomial, each element monic.
pub fn groebner_basis(gens: &[Poly]) -> Vec<Poly> {
    let mut basis: Vec<Poly> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.monic())
        .collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let key = |b: &Vec<Poly>, (i, j): (usize, usize)| -> (Monomial, usize, usize) {
        let l = b[i].leading().unwrap().0.lcm(b[j].leading().unwrap().0);
        (l, i, j)
    };
    while !pairs.is_empty() {
        let (idx, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| key(&basis, **a).cmp(&key(&basis, **b)))
            .unwrap();
        let (i, j) = pairs.remove(idx);
        let (li, lj) = (
            basis[i].leading().unwrap().0.clone(),
            basis[j].leading().unwrap().0.clone(),
        );
        if li.is_coprime(&lj) {
            continue;
        }
        let r = reduce(&s_poly(&basis[i], &basis[j]), &basis);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(r.monic());
            for i in 0..k {
                pairs.push((i, k));
            }
        }
    }
    interreduce(basis)
}

fn interreduce(mut basis: Vec<Poly>) -> Vec<Poly> {
    // drop elements whose leading monomial is divisible by another's
    let mut keep: Vec<Poly> = Vec::new();
    basis.sort_by(|a, b| a.leading().unwrap().0.cmp(b.leading().unwrap().0));
    for g in basis {
        let lm = g.leading().unwrap().0.clone();
        if keep.iter().any(|h| h.leading().unwrap().0.divides(&lm)) {
            continue;
        }
        keep.push(g);
    }
    let mut out = Vec::with_capacity(keep.len());
    for k in 0..keep.len() {
        let others: Vec<Poly> = keep
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, g)| g.clone())
            .collect();
        let (lm, lc) = keep[k].leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut tail = keep[k].clone();
        tail.add_term(lm.clone(), -lc.clone());
        let mut r = reduce(&tail, &others);
        r.add_term(lm, lc);
        out.push(r.monic());
    }
    out.sort_by(|a, b| a.leading().unwrap().0.cmp(b.leading().unwrap().0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_poly;

    fn vars(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn redundant_generators_collapse() {
        let v = vars(&["x", "y"]);
        let gens: Vec<Poly> = ["x^2", "x*y", "y^2", "y^3"]
            .iter()
            .map(|s| parse_poly(s, &v).unwrap())
            .collect();
        let gb = groebner_basis(&gens);
        assert_eq!(gb.len(), 3);
    }

    #[test]
    fn every_generator_reduces_to_zero() {
        let v = vars(&["x", "y"]);
        let gens: Vec<Poly> = ["x^2 - y", "x*y - 1"]
            .iter()
            .map(|s| parse_poly(s, &v).unwrap())
            .collect();
        let gb = groebner_basis(&gens);
        for g in &gens {
            assert!(reduce(g, &gb).is_zero());
        }
        // x^3 = xy = 1 in this ideal
        let x3 = parse_poly("x^3 - 1", &v).unwrap();
        assert!(reduce(&x3, &gb).is_zero());
    }
}
