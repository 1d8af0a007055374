//! Bigraded result tables and the Jones polynomial.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::RingTag;

pub type Bigrading = (i32, i32);

/// Free rank and primary torsion coefficients at one bigrading.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupEntry {
    pub rank: usize,
    /// Prime powers, ascending.
    pub torsion: Vec<u64>,
}

impl GroupEntry {
    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

/// Integral homology: (i,j) ↦ ℤ^rank ⊕ torsion.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GroupsJson", try_from = "GroupsJson")]
pub struct BigradedGroup {
    groups: BTreeMap<Bigrading, GroupEntry>,
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    i: i32,
    j: i32,
    rank: usize,
    torsion: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct GroupsJson {
    groups: Vec<GroupJson>,
}

impl From<BigradedGroup> for GroupsJson {
    fn from(g: BigradedGroup) -> Self {
        GroupsJson {
            groups: g
                .groups
                .into_iter()
                .map(|((i, j), e)| GroupJson {
                    i,
                    j,
                    rank: e.rank,
                    torsion: e.torsion,
                })
                .collect(),
        }
    }
}

impl TryFrom<GroupsJson> for BigradedGroup {
    type Error = String;
    fn try_from(g: GroupsJson) -> Result<Self, String> {
        let mut out = BigradedGroup::new();
        for e in g.groups {
            if e.torsion.iter().any(|&t| t < 2) {
                return Err(format!("bad torsion coefficient at ({}, {})", e.i, e.j));
            }
            out.insert(e.i, e.j, e.rank, e.torsion);
        }
        Ok(out)
    }
}

impl BigradedGroup {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a summand; zero summands are not stored.
    pub fn insert(&mut self, i: i32, j: i32, rank: usize, torsion: Vec<u64>) {
        if rank == 0 && torsion.is_empty() {
            return;
        }
        let e = self.groups.entry((i, j)).or_default();
        e.rank += rank;
        e.torsion.extend(torsion);
        e.torsion.sort_unstable();
    }

    pub fn get(&self, i: i32, j: i32) -> GroupEntry {
        self.groups.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn rank(&self, i: i32, j: i32) -> usize {
        self.groups.get(&(i, j)).map_or(0, |e| e.rank)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Bigrading, &GroupEntry)> {
        self.groups.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn support(&self) -> BTreeSet<Bigrading> {
        self.groups.keys().copied().collect()
    }

    pub fn total_rank(&self) -> usize {
        self.groups.values().map(|e| e.rank).sum()
    }

    /// Every torsion coefficient, with multiplicity.
    pub fn torsion_values(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.groups.values().flat_map(|e| e.torsion.iter().copied()).collect();
        v.sort_unstable();
        v
    }

    /// Primes dividing some torsion coefficient.
    pub fn torsion_primes(&self) -> BTreeSet<u64> {
        self.torsion_values().into_iter().map(smallest_prime_factor).collect()
    }

    /// Number of summands ℤ/p^k at (i,j).
    pub fn p_torsion_count(&self, p: u64, i: i32, j: i32) -> usize {
        self.groups
            .get(&(i, j))
            .map_or(0, |e| e.torsion.iter().filter(|&&t| smallest_prime_factor(t) == p).count())
    }

    /// Support moved by (di, dj): `(M[di]{dj})^{i,j} = M^{i-di, j-dj}`.
    pub fn shifted(&self, di: i32, dj: i32) -> Self {
        Self {
            groups: self.groups.iter().map(|(&(i, j), e)| ((i + di, j + dj), e.clone())).collect(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), e) in &other.groups {
            out.insert(i, j, e.rank, e.torsion.clone());
        }
        out
    }

    /// Reflection (i,j) ↦ (−i,−j).
    pub fn reflected(&self) -> Self {
        Self {
            groups: self.groups.iter().map(|(&(i, j), e)| ((-i, -j), e.clone())).collect(),
        }
    }

    /// Dimensions over a field predicted by universal coefficients:
    /// dim H(ℤ_p)^{i,j} = rk^{i,j} + t_p(i,j) + t_p(i+1,j).
    pub fn field_table(&self, field: RingTag) -> FieldTable {
        let mut t = FieldTable::new(field);
        for (&(i, j), e) in &self.groups {
            t.add(i, j, e.rank);
            if let RingTag::ModP(p) = field {
                let tp = self.p_torsion_count(u64::from(p), i, j);
                t.add(i, j, tp);
                t.add(i - 1, j, tp);
            }
        }
        t
    }

    pub fn jones(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (&(i, j), e) in &self.groups {
            let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
            p.add_term(j, sign * e.rank as i64);
        }
        p
    }

    pub fn homological_range(&self) -> Option<(i32, i32)> {
        let lo = self.groups.keys().map(|k| k.0).min()?;
        let hi = self.groups.keys().map(|k| k.0).max()?;
        Some((lo, hi))
    }
}

pub(crate) fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

/// Homology over a field: (i,j) ↦ dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "FieldJson", try_from = "FieldJson")]
pub struct FieldTable {
    pub field: RingTag,
    dims: BTreeMap<Bigrading, usize>,
}

#[derive(Serialize, Deserialize)]
struct DimJson {
    i: i32,
    j: i32,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    field: RingTag,
    dims: Vec<DimJson>,
}

impl From<FieldTable> for FieldJson {
    fn from(t: FieldTable) -> Self {
        FieldJson {
            field: t.field,
            dims: t.dims.into_iter().map(|((i, j), dim)| DimJson { i, j, dim }).collect(),
        }
    }
}

impl TryFrom<FieldJson> for FieldTable {
    type Error = String;
    fn try_from(f: FieldJson) -> Result<Self, String> {
        let mut t = FieldTable::new(f.field);
        for d in f.dims {
            t.add(d.i, d.j, d.dim);
        }
        Ok(t)
    }
}

impl FieldTable {
    pub fn new(field: RingTag) -> Self {
        Self {
            field,
            dims: BTreeMap::new(),
        }
    }

    pub fn from_dims(field: RingTag, dims: impl IntoIterator<Item = (Bigrading, usize)>) -> Self {
        let mut t = Self::new(field);
        for ((i, j), d) in dims {
            t.add(i, j, d);
        }
        t
    }

    /// Same dimensions, relabelled field.
    pub fn with_field(&self, field: RingTag) -> Self {
        Self {
            field,
            dims: self.dims.clone(),
        }
    }

    pub fn add(&mut self, i: i32, j: i32, dim: usize) {
        if dim == 0 {
            return;
        }
        *self.dims.entry((i, j)).or_insert(0) += dim;
    }

    pub fn get(&self, i: i32, j: i32) -> usize {
        self.dims.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Bigrading, usize)> + '_ {
        self.dims.iter().map(|(k, v)| (*k, *v))
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn support(&self) -> BTreeSet<Bigrading> {
        self.dims.keys().copied().collect()
    }

    /// Σ_j dim at each homological grading.
    pub fn totals_by_i(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for (&(i, _), &d) in &self.dims {
            *out.entry(i).or_insert(0) += d;
        }
        out
    }

    pub fn shifted(&self, di: i32, dj: i32) -> Self {
        Self {
            field: self.field,
            dims: self.dims.iter().map(|(&(i, j), &d)| ((i + di, j + dj), d)).collect(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), &d) in &other.dims {
            out.add(i, j, d);
        }
        out
    }

    pub fn reflected(&self) -> Self {
        Self {
            field: self.field,
            dims: self.dims.iter().map(|(&(i, j), &d)| ((-i, -j), d)).collect(),
        }
    }

    /// Σ (−1)^i q^j dim.
    pub fn euler(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (&(i, j), &d) in &self.dims {
            let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
            p.add_term(j, sign * d as i64);
        }
        p
    }
}

/// Integer Laurent polynomial in q.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(exp: i32, coeff: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, i64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: i32, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let c = self.terms.entry(exp).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.terms.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: i32) -> i64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (&e1, &c1) in &self.terms {
            for (&e2, &c2) in &other.terms {
                p.add_term(e1 + e2, c1 * c2);
            }
        }
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (&e, &c) in &other.terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut p = Self::monomial(0, 1);
        for _ in 0..k {
            p = p.mul(self);
        }
        p
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&e, &c) in self.terms.iter().rev() {
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (e, a) {
                (0, a) => write!(f, "{a}")?,
                (e, 1) => write!(f, "q^{e}")?,
                (e, a) => write!(f, "{a}q^{e}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let mut g = BigradedGroup::new();
        g.insert(0, 1, 1, vec![]);
        g.insert(-2, -7, 0, vec![2]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(
            s,
            r#"{"groups":[{"i":-2,"j":-7,"rank":0,"torsion":[2]},{"i":0,"j":1,"rank":1,"torsion":[]}]}"#
        );
        let back: BigradedGroup = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let t = g.field_table(RingTag::ModP(2));
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.starts_with(r#"{"field":"Z2","dims":[{"i":-3,"j":-7,"dim":1}"#));
    }

    #[test]
    fn uct_echo() {
        let mut g = BigradedGroup::new();
        g.insert(-2, -7, 0, vec![2]);
        g.insert(0, 1, 1, vec![9]);
        let t2 = g.field_table(RingTag::ModP(2));
        assert_eq!(t2.get(-2, -7), 1);
        assert_eq!(t2.get(-3, -7), 1);
        let t3 = g.field_table(RingTag::ModP(3));
        assert_eq!(t3.get(0, 1), 2);
        assert_eq!(t3.get(-1, 1), 1);
        assert_eq!(t3.get(-2, -7), 0);
        assert_eq!(g.torsion_primes().into_iter().collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn shifts_move_support() {
        let mut u = BigradedGroup::new();
        u.insert(0, 1, 1, vec![]);
        u.insert(0, -1, 1, vec![]);
        let s = u.shifted(-2, -5);
        assert_eq!(s.support().into_iter().collect::<Vec<_>>(), vec![(-2, -6), (-2, -4)]);
    }

    #[test]
    fn laurent_arithmetic() {
        let unknot = LaurentPoly::from_terms([(1, 1), (-1, 1)]);
        let sq = unknot.pow(2);
        assert_eq!(sq, LaurentPoly::from_terms([(2, 1), (0, 2), (-2, 1)]));
        assert_eq!(sq.to_string(), "q^2 + 2 + q^-2");
        assert_eq!(LaurentPoly::from_terms([(0, -1), (-3, 2)]).to_string(), "-1 + 2q^-3");
    }
}
