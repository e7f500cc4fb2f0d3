//! Exact linear algebra over ℚ: sparse reduced echelon forms and small dense
//! matrices.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::{fmt_q, Q};

/// Sparse vector as `(column, value)` pairs sorted by column, no zeros.
pub type SparseVec = Vec<(usize, Q)>;

/// `a + s·b` for sparse vectors.
pub fn axpy(a: &[(usize, Q)], s: &Q, b: &[(usize, Q)]) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let v = s * &b[j].1;
            if !v.is_zero() {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = &a[i].1 + s * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn to_sparse(dense: &[Q]) -> SparseVec {
    dense
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn to_dense(v: &[(usize, Q)], len: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// A subspace of ℚ^ncols held in fully reduced row echelon form.
///
/// The pivot of each row is its smallest column; pivot columns appear in no
/// other row. Rows are inserted one at a time, so the pivot choice is
/// deterministic: first nonzero column of the reduced incoming row.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseVec>,
    pivots: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new(), pivots: BTreeMap::new() }
    }

    pub fn from_rows<I: IntoIterator<Item = SparseVec>>(ncols: usize, rows: I) -> Self {
        let mut e = Echelon::new(ncols);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains_key(&col)
    }

    /// Columns without a pivot, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.pivots.contains_key(c)).collect()
    }

    /// Canonical representative of `v` modulo the row space.
    pub fn reduce(&self, v: &[(usize, Q)]) -> SparseVec {
        let mut out: SparseVec = v.to_vec();
        for (col, x) in v {
            if let Some(&r) = self.pivots.get(col) {
                out = axpy(&out, &-x.clone(), &self.rows[r]);
            }
        }
        out
    }

    pub fn contains(&self, v: &[(usize, Q)]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span; returns false when it was already contained.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(&v);
        if r.is_empty() {
            return false;
        }
        let (p, lead) = (r[0].0, r[0].1.clone());
        let r: SparseVec = r.into_iter().map(|(c, x)| (c, x / &lead)).collect();
        for row in self.rows.iter_mut() {
            if let Ok(k) = row.binary_search_by_key(&p, |e| e.0) {
                let x = row[k].1.clone();
                *row = axpy(row, &-x, &r);
            }
        }
        self.pivots.insert(p, self.rows.len());
        self.rows.push(r);
        true
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Q>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Matrix { rows, cols, data })
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        Self::from_rows(rows, cols, data.iter().map(|&x| crate::q(x)).collect())
            .expect("shape mismatch")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: Q) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[Q] {
        &self.data
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn row_space(&self) -> Echelon {
        Echelon::from_rows(self.cols, (0..self.rows).map(|r| to_sparse(self.row(r))))
    }

    pub fn rank(&self) -> usize {
        self.row_space().rank()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Column space as an echelon form in ℚ^rows.
    pub fn column_space(&self) -> Echelon {
        self.transpose().row_space()
    }

    pub fn display_rows(&self) -> Vec<String> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(fmt_q).collect::<Vec<_>>().join(" "))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn echelon_reduces_to_canonical_representatives() {
        let mut e = Echelon::new(3);
        assert!(e.insert(vec![(0, q(2)), (2, q(4))]));
        assert!(e.insert(vec![(0, q(1)), (1, q(1))]));
        assert!(!e.insert(vec![(1, q(1)), (2, q(-2))]));
        assert_eq!(e.rank(), 2);
        assert_eq!(e.free_columns(), vec![2]);
        // (0,0,1) stays, (1,0,0) ~ (0,0,-2)
        assert_eq!(e.reduce(&[(0, q(1))]), vec![(2, q(-2))]);
    }

    #[test]
    fn matrix_rank_and_product() {
        let a = Matrix::from_i64(2, 3, &[1, 2, 3, 2, 4, 6]);
        assert_eq!(a.rank(), 1);
        let b = Matrix::from_i64(3, 1, &[1, 1, 1]);
        assert_eq!(a.mul(&b), Matrix::from_i64(2, 1, &[6, 12]));
        assert_eq!(Matrix::identity(3).rank(), 3);
    }
}
