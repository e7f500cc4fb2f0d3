//! Finite windows of inverse systems of ℚ-vector spaces
//! `V_0 ← V_1 ← … ← V_{L-1}`.

use serde::{Deserialize, Serialize};

use crate::expr::parse_rational;
use crate::linalg::{to_sparse, Echelon, Matrix};
use crate::{q, Error, Result, Q};

/// `maps[k]` is the transition `V_{k+1} → V_k`, a `dims[k] × dims[k+1]`
/// matrix acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    dims: Vec<usize>,
    maps: Vec<Matrix>,
}

impl Tower {
    pub fn new(dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidTower("a tower needs at least one level".into()));
        }
        if maps.len() + 1 != dims.len() {
            return Err(Error::InvalidTower(format!(
                "{} levels need {} maps, got {}",
                dims.len(),
                dims.len() - 1,
                maps.len()
            )));
        }
        for (k, m) in maps.iter().enumerate() {
            if m.nrows() != dims[k] || m.ncols() != dims[k + 1] {
                return Err(Error::InvalidTower(format!(
                    "map {k} is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    dims[k],
                    dims[k + 1]
                )));
            }
        }
        Ok(Tower { dims, maps })
    }

    /// All maps the identity.
    pub fn constant(dim: usize, length: usize) -> Self {
        Tower { dims: vec![dim; length], maps: vec![Matrix::identity(dim); length.saturating_sub(1)] }
    }

    pub fn length(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    /// Appends a level on top with transition `map: V_new → V_top`.
    pub fn push_level(&self, dim: usize, map: Matrix) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.push(dim);
        let mut maps = self.maps.clone();
        maps.push(map);
        Tower::new(dims, maps)
    }
}

/// Per map: is `V_{k+1} → V_k` onto.
pub fn surjectivity_check(t: &Tower) -> Vec<bool> {
    t.maps.iter().enumerate().map(|(k, m)| m.rank() == t.dims[k]).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MlLevel {
    pub level: usize,
    /// Ranks of the images of `V_j → V_level` for `j = level+1, …, L-1`.
    pub image_ranks: Vec<usize>,
    pub stabilized: bool,
    /// First index into `image_ranks` from which the chain is constant.
    pub offset: Option<usize>,
}

/// Images of higher levels form a decreasing chain, so equal ranks mean
/// equal subspaces. A level counts as stabilized when the last two images in
/// the window agree; the top level has nothing above it and trivially does.
pub fn ml_window_check(t: &Tower) -> Vec<MlLevel> {
    (0..t.length())
        .map(|k| {
            let mut ranks = Vec::new();
            let mut comp: Option<Matrix> = None;
            for j in k + 1..t.length() {
                let m = &t.maps[j - 1];
                let c = match comp {
                    None => m.clone(),
                    Some(c) => c.mul(m),
                };
                ranks.push(c.rank());
                comp = Some(c);
            }
            let stabilized = ranks.len() <= 1 || ranks[ranks.len() - 1] == ranks[ranks.len() - 2];
            let offset = if stabilized {
                Some(ranks.last().map_or(0, |last| ranks.iter().position(|r| r == last).unwrap()))
            } else {
                None
            };
            MlLevel { level: k, image_ranks: ranks, stabilized, offset }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitReport {
    pub limit_dim: usize,
    pub stabilized: bool,
}

/// Dimension of the space of compatible families `(x_k)` with
/// `x_k = maps[k]·x_{k+1}`. The flag is set when every level passes the ML
/// window check and the last map is an isomorphism, so that extending the
/// window by isomorphisms leaves the value unchanged.
pub fn limit_dim(t: &Tower) -> LimitReport {
    let offsets: Vec<usize> =
        t.dims.iter().scan(0, |acc, d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let total: usize = t.dims.iter().sum();
    let mut ech = Echelon::new(total);
    for (k, m) in t.maps.iter().enumerate() {
        for r in 0..t.dims[k] {
            // x_k[r] - Σ_c m[r][c] x_{k+1}[c] = 0
            let mut row = vec![(offsets[k] + r, q(1))];
            row.extend(
                to_sparse(m.row(r)).into_iter().map(|(c, x)| (offsets[k + 1] + c, -x)),
            );
            ech.insert(row);
        }
    }
    let last_iso = t.maps.last().is_none_or(|m| m.nrows() == m.ncols() && m.rank() == m.nrows());
    let stabilized = last_iso && ml_window_check(t).iter().all(|l| l.stabilized);
    LimitReport { limit_dim: total - ech.rank(), stabilized }
}

/// Tower as read from a scenario file: entries of each map are row-major
/// rationals, written as integers or strings like `"-2/3"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerSpec {
    pub dims: Vec<usize>,
    pub maps: Vec<Vec<Entry>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    fn value(&self) -> Result<Q> {
        match self {
            Entry::Int(i) => Ok(q(*i)),
            Entry::Text(s) => parse_rational(s),
        }
    }
}

impl TowerSpec {
    pub fn build(&self) -> Result<Tower> {
        if self.maps.len() + 1 != self.dims.len() {
            return Err(Error::InvalidTower(format!(
                "{} levels need {} maps, got {}",
                self.dims.len(),
                self.dims.len().saturating_sub(1),
                self.maps.len()
            )));
        }
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(k, entries)| {
                let (r, c) = (self.dims[k], self.dims[k + 1]);
                let data = entries.iter().map(Entry::value).collect::<Result<Vec<_>>>()?;
                Matrix::from_rows(r, c, data).ok_or_else(|| {
                    Error::InvalidTower(format!("map {k} needs {} entries, got {}", r * c, entries.len()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Tower::new(self.dims.clone(), maps)
    }
}

/// Unit upper-triangular `d × d` matrix with deterministic entries.
fn unipotent(d: usize, seed: i64) -> Matrix {
    let mut m = Matrix::identity(d);
    for i in 0..d {
        for j in i + 1..d {
            m.set(i, j, q((seed + (i * d + j) as i64) % 5 - 2));
        }
    }
    m
}

/// Rank-`r` `rows × cols` matrix with deterministic entries.
fn of_rank(rows: usize, cols: usize, r: usize, seed: i64) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..r.min(rows).min(cols) {
        m.set(i, i, q(1 + (seed + i as i64) % 3));
    }
    unipotent(rows, seed).mul(&m).mul(&unipotent(cols, seed + 1))
}

/// Ten towers that become isomorphisms from some level on, each paired with
/// its stable dimension. Below the stable range the maps drop rank.
pub fn eventually_isomorphic_towers() -> Vec<(Tower, usize)> {
    (0..10)
        .map(|i: usize| {
            let stable = 1 + i % 3;
            let unstable = 1 + i % 2;
            let tail = 1 + i % 3;
            let seed = i as i64;
            let mut dims: Vec<usize> = (0..unstable).map(|k| stable + 1 + (unstable - k) % 2).collect();
            dims.extend(std::iter::repeat_n(stable, tail + 1));
            let maps = (0..dims.len() - 1)
                .map(|k| {
                    if k < unstable {
                        let r = (dims[k].min(dims[k + 1])).saturating_sub(1).max(stable.min(dims[k]));
                        of_rank(dims[k], dims[k + 1], r, seed + k as i64)
                    } else {
                        unipotent(stable, seed + k as i64)
                    }
                })
                .collect();
            (Tower::new(dims, maps).expect("shapes match"), stable)
        })
        .collect()
}

/// Eight towers whose maps are all surjective; dimensions grow going up.
pub fn surjective_towers() -> Vec<Tower> {
    (0..8)
        .map(|i: usize| {
            let seed = i as i64;
            let dims: Vec<usize> = (0..3 + i % 3).map(|k| 1 + i % 2 + k * (1 + i % 2) / 2).collect();
            let maps = (0..dims.len() - 1)
                .map(|k| of_rank(dims[k], dims[k + 1], dims[k], seed + k as i64))
                .collect();
            Tower::new(dims, maps).expect("shapes match")
        })
        .collect()
}

/// Eight towers of invertible maps.
pub fn isomorphism_towers() -> Vec<Tower> {
    (0..8)
        .map(|i: usize| {
            let d = 1 + i % 4;
            let maps = (0..2 + i % 3).map(|k| unipotent(d, (i + k) as i64)).collect::<Vec<_>>();
            Tower::new(vec![d; maps.len() + 1], maps).expect("shapes match")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_families_have_their_shape() {
        for t in surjective_towers() {
            assert!(surjectivity_check(&t).iter().all(|&b| b));
        }
        for t in isomorphism_towers() {
            assert!(t.maps().iter().all(|m| m.nrows() == m.ncols() && m.rank() == m.nrows()));
        }
    }

    #[test]
    fn identity_tower() {
        let t = Tower::constant(3, 3);
        assert!(surjectivity_check(&t).iter().all(|&b| b));
        assert_eq!(limit_dim(&t), LimitReport { limit_dim: 3, stabilized: true });
        assert!(ml_window_check(&t).iter().all(|l| l.offset == Some(0)));
    }

    #[test]
    fn surjectivity_cases() {
        let t = Tower::new(vec![1, 1], vec![Matrix::zeros(1, 1)]).unwrap();
        assert_eq!(surjectivity_check(&t), [false]);
        let t = Tower::new(vec![1, 2, 2], vec![Matrix::from_i64(1, 2, &[1, 1]), Matrix::identity(2)])
            .unwrap();
        assert_eq!(surjectivity_check(&t), [true, true]);
    }

    #[test]
    fn ml_offset_one() {
        let p = Matrix::from_i64(2, 2, &[1, 0, 0, 0]);
        let t = Tower::new(vec![2; 4], vec![Matrix::identity(2), p.clone(), p]).unwrap();
        let ml = ml_window_check(&t);
        assert_eq!(ml[0].image_ranks, [2, 1, 1]);
        assert_eq!(ml[0].offset, Some(1));
    }

    #[test]
    fn strictly_decreasing_window() {
        let shift = Matrix::from_i64(3, 3, &[0, 1, 0, 0, 0, 1, 0, 0, 0]);
        let t = Tower::new(vec![3; 4], vec![shift.clone(), shift.clone(), shift]).unwrap();
        let ml = ml_window_check(&t);
        assert!(!ml[0].stabilized && ml[0].offset.is_none());
        assert!(!limit_dim(&t).stabilized);
    }

    #[test]
    fn zero_maps() {
        let t = Tower::new(vec![2; 3], vec![Matrix::zeros(2, 2); 2]).unwrap();
        assert_eq!(limit_dim(&t), LimitReport { limit_dim: 2, stabilized: false });
    }

    #[test]
    fn constructed_towers_follow_the_pattern() {
        for (t, stable) in eventually_isomorphic_towers() {
            assert_eq!(limit_dim(&t), LimitReport { limit_dim: stable, stabilized: true }, "{t:?}");
        }
    }

    #[test]
    fn spec_shapes_are_checked() {
        let spec = TowerSpec { dims: vec![1, 2], maps: vec![vec![Entry::Int(1)]] };
        assert!(matches!(spec.build(), Err(Error::InvalidTower(_))));
        let spec = TowerSpec { dims: vec![1, 2], maps: vec![vec![Entry::Int(1), Entry::Text("1/2".into())]] };
        assert!(spec.build().is_ok());
    }
}
