use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ring::{Field, PrimeField, Rationals, Ring};
use super::sparse::SparseMat;
use super::{LinalgError, RingTag};

/// Sparse vector: `(index, coefficient)` sorted by index, no zero coefficients.
pub type SparseVec<E> = Vec<(usize, E)>;

/// `a + f·b` for sparse vectors.
pub fn axpy<R: Ring>(ring: &R, a: &[(usize, R::Elem)], f: &R::Elem, b: &[(usize, R::Elem)]) -> SparseVec<R::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let v = ring.mul(f, &b[j].1);
            if !ring.is_zero(&v) {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = ring.add(&a[i].1, &ring.mul(f, &b[j].1));
            if !ring.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale<R: Ring>(ring: &R, a: &[(usize, R::Elem)], f: &R::Elem) -> SparseVec<R::Elem> {
    a.iter()
        .map(|(i, v)| (*i, ring.mul(f, v)))
        .filter(|(_, v)| !ring.is_zero(v))
        .collect()
}

/// Row echelon form with minimal-index pivots and tagged rows.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    pivot_row: BTreeMap<usize, usize>,
    rows: Vec<SparseVec<F::Elem>>,
    tags: Vec<SparseVec<F::Elem>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F) -> Self {
        Self {
            field,
            pivot_row: BTreeMap::new(),
            rows: Vec::new(),
            tags: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// Fully reduces `v`: returns the residue (no entries at pivot positions) and
    /// the tag combination `Σ cₘ·tagₘ` of the stored rows subtracted from it.
    pub fn reduce(&self, v: &[(usize, F::Elem)]) -> (SparseVec<F::Elem>, SparseVec<F::Elem>) {
        let f = &self.field;
        let mut v = v.to_vec();
        let mut acc: SparseVec<F::Elem> = Vec::new();
        let mut cursor = 0;
        loop {
            let start = v.partition_point(|e| e.0 < cursor);
            let hit = v[start..]
                .iter()
                .find_map(|(idx, c)| self.pivot_row.get(idx).map(|&r| (*idx, c.clone(), r)));
            let Some((idx, c, r)) = hit else { break };
            let neg = f.neg(&c);
            v = axpy(f, &v, &neg, &self.rows[r]);
            acc = axpy(f, &acc, &c, &self.tags[r]);
            cursor = idx + 1;
        }
        (v, acc)
    }

    /// Reduces `v` and stores the residue when nonzero. The stored tag is
    /// `tag − acc`, so a row that equals `A·tag` stays equal to `A·(stored tag)`.
    /// Returns the combination that annihilates `v` when the residue vanishes.
    pub fn insert_tracking(&mut self, v: &[(usize, F::Elem)], tag: SparseVec<F::Elem>) -> Result<usize, SparseVec<F::Elem>> {
        let (res, acc) = self.reduce(v);
        let minus_one = self.field.neg(&self.field.one());
        let combo = axpy(&self.field, &tag, &minus_one, &acc);
        if res.is_empty() {
            return Err(combo);
        }
        Ok(self.store(res, combo))
    }

    /// Reduces `v` and stores the residue with `tag` unchanged (scaled with the row).
    /// Returns the unnormalized residue when it is nonzero.
    pub fn insert_with_tag(&mut self, v: &[(usize, F::Elem)], tag: SparseVec<F::Elem>) -> Option<SparseVec<F::Elem>> {
        let (res, _) = self.reduce(v);
        if res.is_empty() {
            return None;
        }
        self.store(res.clone(), tag);
        Some(res)
    }

    fn store(&mut self, res: SparseVec<F::Elem>, tag: SparseVec<F::Elem>) -> usize {
        let f = &self.field;
        let lead = res[0].0;
        let inv = f.inv(&res[0].1);
        let row = scale(f, &res, &inv);
        let tag = scale(f, &tag, &inv);
        let r = self.rows.len();
        self.rows.push(row);
        self.tags.push(tag);
        self.pivot_row.insert(lead, r);
        lead
    }
}

/// Rank and kernel basis of `m` over a field, kernel vectors sparse.
pub fn rank_kernel_over<F: Field>(m: &SparseMat, field: &F) -> (usize, Vec<SparseVec<F::Elem>>) {
    let mut ech = Echelon::new(field.clone());
    let mut kernel = Vec::new();
    for (j, col) in m.columns_over(field).into_iter().enumerate() {
        if let Err(k) = ech.insert_tracking(&col, vec![(j, field.one())]) {
            kernel.push(k);
        }
    }
    (ech.len(), kernel)
}

/// Dense kernel vectors over a tagged field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelBasis {
    ModP { p: u64, vectors: Vec<Vec<u64>> },
    Rational(Vec<Vec<BigRational>>),
}

impl KernelBasis {
    pub fn len(&self) -> usize {
        match self {
            KernelBasis::ModP { vectors, .. } => vectors.len(),
            KernelBasis::Rational(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn densify<E: Clone>(v: &[(usize, E)], n: usize, zero: E) -> Vec<E> {
    let mut out = vec![zero; n];
    for (i, e) in v {
        out[*i] = e.clone();
    }
    out
}

/// Rank and kernel of an integer matrix read over ℚ or ℤ/p.
pub fn rank_kernel(m: &SparseMat, field: RingTag) -> Result<(usize, KernelBasis), LinalgError> {
    match field {
        RingTag::Integers => Err(LinalgError::IntegersNotAField),
        RingTag::Rationals => {
            let (rank, ker) = rank_kernel_over(m, &Rationals);
            let vectors = ker
                .iter()
                .map(|v| densify(v, m.cols(), BigRational::zero()))
                .collect();
            Ok((rank, KernelBasis::Rational(vectors)))
        }
        RingTag::ModP(p) => {
            let f = PrimeField::new(u64::from(p));
            let (rank, ker) = rank_kernel_over(m, &f);
            let vectors = ker.iter().map(|v| densify(v, m.cols(), 0)).collect();
            Ok((rank, KernelBasis::ModP { p: u64::from(p), vectors }))
        }
    }
}

/// Rank of an integer matrix over the given ring (ℤ and ℚ agree).
pub fn rank_over(m: &SparseMat, ring: RingTag) -> usize {
    match ring {
        RingTag::Integers | RingTag::Rationals => rank_fraction_free(m),
        RingTag::ModP(p) => rank_kernel_over(m, &PrimeField::new(u64::from(p))).0,
    }
}

fn primitive(v: &mut BTreeMap<usize, BigInt>) {
    let g = v.values().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.values_mut() {
            *x = &*x / &g;
        }
    }
    if v.values().next().is_some_and(|x| x.is_negative()) {
        for x in v.values_mut() {
            *x = -&*x;
        }
    }
}

/// Rank over ℚ by fraction-free elimination, keeping rows primitive.
pub fn rank_fraction_free(m: &SparseMat) -> usize {
    let mut echelon: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    for mut row in m.row_maps() {
        loop {
            let Some((&lead, a)) = row.iter().next() else { break };
            let a = a.clone();
            let Some(w) = echelon.get(&lead) else {
                primitive(&mut row);
                echelon.insert(lead, row);
                break;
            };
            let b = &w[&lead];
            let g = a.gcd(b);
            let (fa, fb) = (b / &g, &a / &g);
            let mut next = BTreeMap::new();
            for (k, x) in &row {
                next.insert(*k, x * &fa);
            }
            for (k, y) in w {
                let e = next.entry(*k).or_insert_with(BigInt::zero);
                *e -= y * &fb;
            }
            next.retain(|_, x| !x.is_zero());
            primitive(&mut next);
            row = next;
        }
    }
    echelon.len()
}
