use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::ring::Ring;
use super::LinalgError;

/// Sparse integer matrix keyed by `(row, col)`; stored entries are nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMat {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl SparseMat {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    /// Builds from triplets, summing duplicates and dropping zeros.
    pub fn from_triplets<I, V>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, V)>,
        V: Into<BigInt>,
    {
        let mut m = Self::new(rows, cols);
        for (r, c, v) in triplets {
            m.add_to(r, c, &v.into());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::new(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.entries.insert((r, c), BigInt::from(v));
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.entries.get(&(r, c)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &BigInt) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        if v.is_zero() {
            return;
        }
        let e = self.entries.entry((r, c)).or_default();
        *e += v;
        if e.is_zero() {
            self.entries.remove(&(r, c));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    /// Column lists, each sorted by row.
    pub fn columns(&self) -> Vec<Vec<(usize, BigInt)>> {
        let mut out = vec![Vec::new(); self.cols];
        for (&(r, c), v) in &self.entries {
            out[c].push((r, v.clone()));
        }
        for col in &mut out {
            col.sort_by_key(|e| e.0);
        }
        out
    }

    pub fn row_maps(&self) -> Vec<BTreeMap<usize, BigInt>> {
        let mut out = vec![BTreeMap::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            out[r].insert(c, v.clone());
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), v)| ((c, r), v.clone()))
                .collect(),
        }
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        let mut y = vec![BigInt::zero(); self.rows];
        for (&(r, c), v) in &self.entries {
            if !x[c].is_zero() {
                y[r] += v * &x[c];
            }
        }
        Ok(y)
    }

    pub fn mul(&self, other: &SparseMat) -> Result<SparseMat, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let right = other.row_maps();
        let mut out = SparseMat::new(self.rows, other.cols);
        for (&(r, k), a) in &self.entries {
            for (&c, b) in &right[k] {
                out.add_to(r, c, &(a * b));
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMat<BigInt> {
        let mut d = DenseMat::filled(self.rows, self.cols, BigInt::zero());
        for (&(r, c), v) in &self.entries {
            d[(r, c)] = v.clone();
        }
        d
    }

    /// Entries reduced into another ring, in column lists sorted by row.
    pub fn columns_over<R: Ring>(&self, ring: &R) -> Vec<Vec<(usize, R::Elem)>> {
        let mut out = vec![Vec::new(); self.cols];
        for (&(r, c), v) in &self.entries {
            let e = ring.from_bigint(v);
            if !ring.is_zero(&e) {
                out[c].push((r, e));
            }
        }
        for col in &mut out {
            col.sort_by_key(|e| e.0);
        }
        out
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> DenseMat<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn identity<R: Ring<Elem = T>>(n: usize, ring: &R) -> Self {
        let mut m = Self::filled(n, n, ring.zero());
        for i in 0..n {
            m[(i, i)] = ring.one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn mul_over<R: Ring<Elem = T>>(&self, other: &Self, ring: &R) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::filled(self.rows, other.cols, ring.zero());
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if ring.is_zero(a) {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !ring.is_zero(b) {
                        let v = ring.add(&out[(r, c)], &ring.mul(a, b));
                        out[(r, c)] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add_over<R: Ring<Elem = T>>(&self, other: &Self, ring: &R) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| ring.add(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn is_zero_over<R: Ring<Elem = T>>(&self, ring: &R) -> bool {
        self.data.iter().all(|a| ring.is_zero(a))
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> DenseMat<U> {
        DenseMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMat<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMat<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl DenseMat<BigInt> {
    pub fn to_sparse(&self) -> SparseMat {
        let mut m = SparseMat::new(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self[(r, c)].clone());
            }
        }
        m
    }
}
