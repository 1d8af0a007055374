use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ring::Integers;
use super::sparse::{DenseMat, SparseMat};
use super::LinalgError;

/// Invariant factors of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithDecomposition {
    /// Nonzero invariant factors d₁ | d₂ | …, all positive.
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    /// `left · A · right` is diagonal with `diagonal` in its leading entries.
    pub left: Option<DenseMat<BigInt>>,
    pub right: Option<DenseMat<BigInt>>,
}

impl SmithDecomposition {
    /// Invariant factors greater than one.
    pub fn torsion(&self) -> impl Iterator<Item = &BigInt> {
        self.diagonal.iter().filter(|d| !d.is_one())
    }
}

struct Work {
    rows: Vec<BTreeMap<usize, BigInt>>,
    col_rows: Vec<BTreeSet<usize>>,
    active: BTreeSet<usize>,
    left: Option<DenseMat<BigInt>>,
    right: Option<DenseMat<BigInt>>,
}

impl Work {
    fn set(&mut self, i: usize, k: usize, v: BigInt) {
        if v.is_zero() {
            self.rows[i].remove(&k);
            self.col_rows[k].remove(&i);
        } else {
            self.rows[i].insert(k, v);
            self.col_rows[k].insert(i);
        }
    }

    /// row_i += q · row_r
    fn row_axpy(&mut self, i: usize, r: usize, q: &BigInt) {
        let src: Vec<(usize, BigInt)> = self.rows[r].iter().map(|(&k, v)| (k, v.clone())).collect();
        for (k, v) in src {
            let cur = self.rows[i].get(&k).cloned().unwrap_or_default();
            self.set(i, k, cur + q * v);
        }
        if let Some(l) = &mut self.left {
            for c in 0..l.cols() {
                let add = q * &l[(r, c)];
                l[(i, c)] += add;
            }
        }
    }

    /// col_k += q · col_c
    fn col_axpy(&mut self, k: usize, c: usize, q: &BigInt) {
        let src: Vec<usize> = self.col_rows[c].iter().copied().collect();
        for i in src {
            let v = self.rows[i][&c].clone();
            let cur = self.rows[i].get(&k).cloned().unwrap_or_default();
            self.set(i, k, cur + q * v);
        }
        if let Some(rt) = &mut self.right {
            for r in 0..rt.rows() {
                let add = q * &rt[(r, c)];
                rt[(r, k)] += add;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for v in self.rows[r].values_mut() {
            *v = -&*v;
        }
        if let Some(l) = &mut self.left {
            for c in 0..l.cols() {
                l[(r, c)] = -&l[(r, c)];
            }
        }
    }

    /// Smallest |entry| over active rows; ties by row then column.
    fn find_min(&mut self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        let mut empty = Vec::new();
        for &r in &self.active {
            if self.rows[r].is_empty() {
                empty.push(r);
                continue;
            }
            for (&c, v) in &self.rows[r] {
                let a = v.abs();
                if best.as_ref().is_none_or(|b| a < b.2) {
                    let unit = a.is_one();
                    best = Some((r, c, a));
                    if unit {
                        break;
                    }
                }
            }
            if best.as_ref().is_some_and(|b| b.2.is_one()) {
                break;
            }
        }
        for r in empty {
            self.active.remove(&r);
        }
        best.map(|(r, c, _)| (r, c))
    }

    fn min_in_cross(&self, r: usize, c: usize) -> (usize, usize) {
        let mut best = (r, c, self.rows[r][&c].abs());
        for (&k, v) in &self.rows[r] {
            let a = v.abs();
            if a < best.2 {
                best = (r, k, a);
            }
        }
        for &i in &self.col_rows[c] {
            let a = self.rows[i][&c].abs();
            if a < best.2 {
                best = (i, c, a);
            }
        }
        (best.0, best.1)
    }

    fn non_divisible_row(&self, r: usize, v: &BigInt) -> Option<usize> {
        self.active
            .iter()
            .copied()
            .filter(|&i| i != r)
            .find(|&i| self.rows[i].values().any(|e| !(e % v).is_zero()))
    }
}

fn run(m: &SparseMat, transforms: bool) -> SmithDecomposition {
    let (nr, nc) = (m.rows(), m.cols());
    let mut col_rows = vec![BTreeSet::new(); nc];
    for (r, c, _) in m.iter() {
        col_rows[c].insert(r);
    }
    let mut w = Work {
        rows: m.row_maps(),
        col_rows,
        active: (0..nr).collect(),
        left: transforms.then(|| DenseMat::identity(nr, &Integers)),
        right: transforms.then(|| DenseMat::identity(nc, &Integers)),
    };
    let mut pivots: Vec<(usize, usize, BigInt)> = Vec::new();
    while let Some((mut r, mut c)) = w.find_min() {
        loop {
            let v = w.rows[r][&c].clone();
            let mut dirty = false;
            let others: Vec<usize> = w.col_rows[c].iter().copied().filter(|&i| i != r).collect();
            for i in others {
                let q = &w.rows[i][&c] / &v;
                if !q.is_zero() {
                    w.row_axpy(i, r, &-q);
                }
                dirty |= w.rows[i].contains_key(&c);
            }
            let cols: Vec<usize> = w.rows[r].keys().copied().filter(|&k| k != c).collect();
            for k in cols {
                let q = &w.rows[r][&k] / &v;
                if !q.is_zero() {
                    w.col_axpy(k, c, &-q);
                }
                dirty |= w.rows[r].contains_key(&k);
            }
            if dirty {
                (r, c) = w.min_in_cross(r, c);
                continue;
            }
            if !v.abs().is_one() {
                if let Some(i) = w.non_divisible_row(r, &v) {
                    w.row_axpy(r, i, &BigInt::one());
                    continue;
                }
            }
            break;
        }
        if w.rows[r][&c].is_negative() {
            w.negate_row(r);
        }
        let v = w.rows[r].remove(&c).expect("pivot present");
        w.col_rows[c].remove(&r);
        w.active.remove(&r);
        pivots.push((r, c, v));
    }

    let (left, right) = match (w.left, w.right) {
        (Some(l), Some(rt)) => {
            let mut row_order: Vec<usize> = pivots.iter().map(|p| p.0).collect();
            let used: BTreeSet<usize> = row_order.iter().copied().collect();
            row_order.extend((0..nr).filter(|r| !used.contains(r)));
            let mut col_order: Vec<usize> = pivots.iter().map(|p| p.1).collect();
            let used: BTreeSet<usize> = col_order.iter().copied().collect();
            col_order.extend((0..nc).filter(|c| !used.contains(c)));
            let mut pl = DenseMat::filled(nr, nr, BigInt::zero());
            for (new, &old) in row_order.iter().enumerate() {
                for c in 0..nr {
                    pl[(new, c)] = l[(old, c)].clone();
                }
            }
            let mut pr = DenseMat::filled(nc, nc, BigInt::zero());
            for (new, &old) in col_order.iter().enumerate() {
                for r in 0..nc {
                    pr[(r, new)] = rt[(r, old)].clone();
                }
            }
            (Some(pl), Some(pr))
        }
        _ => (None, None),
    };
    let diagonal: Vec<BigInt> = pivots.into_iter().map(|p| p.2).collect();
    SmithDecomposition {
        rank: diagonal.len(),
        diagonal,
        left,
        right,
    }
}

/// Smith normal form by sparse elimination with minimal-magnitude pivots.
pub fn smith_normal_form(m: &SparseMat) -> SmithDecomposition {
    run(m, false)
}

/// As [`smith_normal_form`], also returning dense unimodular transforms.
pub fn smith_normal_form_with_transforms(m: &SparseMat) -> SmithDecomposition {
    run(m, true)
}

/// Splits `d > 1` into prime powers, ascending.
pub fn prime_power_factors(d: &BigInt) -> Result<Vec<u64>, LinalgError> {
    let mut n = d
        .abs()
        .to_u64()
        .ok_or_else(|| LinalgError::TorsionTooLarge(d.to_string()))?;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            out.push(q);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out.sort_unstable();
    Ok(out)
}
