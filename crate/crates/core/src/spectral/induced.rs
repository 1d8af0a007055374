//! Maps induced on Khovanov homology over a field, on fixed cycle representatives.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::complex::{CancelStep, CubeComplex, Part};
use crate::homology::{BigradedGroup, Bigrading, FieldTable};
use crate::linalg::ring::Field;
use crate::linalg::{lift_and_divide, DenseMat, Echelon, PrimeField, RingTag};

use super::SpectralError;

type SparseVec<E> = Vec<(usize, E)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    NuStar,
    DTStar,
    DLStar,
    DB1,
}

impl MapKind {
    pub fn bidegree(&self) -> Bigrading {
        match self {
            MapKind::NuStar => (0, 2),
            MapKind::DTStar => (1, 2),
            MapKind::DLStar => (1, 4),
            MapKind::DB1 => (1, 0),
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::NuStar => "nu_star",
            MapKind::DTStar => "dT_star",
            MapKind::DLStar => "dL_star",
            MapKind::DB1 => "dB1",
        })
    }
}

/// Gaussian elimination of one polynomial grading, with its cancellation log.
#[derive(Clone, Debug)]
struct Strand<E> {
    len: usize,
    /// Local index of the first generator of each homological grading.
    start: BTreeMap<i32, usize>,
    log: Vec<CancelStep<E>>,
}

#[derive(Clone, Debug)]
struct BlockBasis<E> {
    reps: Vec<SparseVec<E>>,
    /// Local indices of the surviving generators, one per representative.
    survivors: Vec<usize>,
}

/// Cycle representatives of H^{i,j} for every bigrading, from full cancellation
/// of the Khovanov complex, with the projection expressing any cycle in them.
#[derive(Clone, Debug)]
pub struct HomologyBasis<F: Field> {
    field: F,
    tag: RingTag,
    strands: BTreeMap<i32, Strand<F::Elem>>,
    blocks: BTreeMap<Bigrading, BlockBasis<F::Elem>>,
}

impl HomologyBasis<PrimeField> {
    pub fn mod_p(c: &CubeComplex, p: u32) -> Result<Self, SpectralError> {
        let tag = RingTag::mod_p(u64::from(p))?;
        Ok(Self::build(c, PrimeField::new(u64::from(p)), tag))
    }
}

impl HomologyBasis<crate::linalg::Rationals> {
    pub fn rational(c: &CubeComplex) -> Self {
        Self::build(c, crate::linalg::Rationals, RingTag::Rationals)
    }
}

impl<F: Field> HomologyBasis<F> {
    pub fn build(c: &CubeComplex, field: F, tag: RingTag) -> Self {
        let per_j: Vec<_> = c
            .j_values()
            .into_par_iter()
            .map(|j| {
                let mut rc = c.reducible_in_j(field.clone(), j);
                rc.record_cancellations();
                rc.reduce_units();
                let survivors = rc.alive_by_grading();
                let mut start = BTreeMap::new();
                let mut offset = 0;
                for ((i, jj), list) in c.bigradings().map(|k| (k, c.block(k.0, k.1))) {
                    if jj == j {
                        start.insert(i, offset);
                        offset += list.len();
                    }
                }
                let strand = Strand {
                    len: rc.len(),
                    start,
                    log: rc.take_log(),
                };
                let blocks: Vec<(Bigrading, BlockBasis<F::Elem>)> = survivors
                    .into_iter()
                    .map(|((i, jj), locals)| {
                        let base = strand.start[&i];
                        let reps = locals
                            .iter()
                            .map(|&w| {
                                include(&field, &strand, w)
                                    .into_iter()
                                    .map(|(k, v)| (k - base, v))
                                    .collect()
                            })
                            .collect();
                        ((i, jj), BlockBasis { reps, survivors: locals })
                    })
                    .collect();
                (j, strand, blocks)
            })
            .collect();
        let mut strands = BTreeMap::new();
        let mut blocks = BTreeMap::new();
        for (j, strand, list) in per_j {
            strands.insert(j, strand);
            blocks.extend(list);
        }
        Self {
            field,
            tag,
            strands,
            blocks,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn ring_tag(&self) -> RingTag {
        self.tag
    }

    pub fn dim(&self, i: i32, j: i32) -> usize {
        self.blocks.get(&(i, j)).map_or(0, |b| b.reps.len())
    }

    pub fn table(&self) -> FieldTable {
        FieldTable::from_dims(self.tag, self.blocks.iter().map(|(&k, b)| (k, b.reps.len())))
    }

    pub fn bigradings(&self) -> impl Iterator<Item = Bigrading> + '_ {
        self.blocks.keys().copied()
    }

    /// Representative cycles at (i,j), indexed by block position.
    pub fn representatives(&self, i: i32, j: i32) -> &[SparseVec<F::Elem>] {
        self.blocks.get(&(i, j)).map_or(&[], |b| &b.reps)
    }

    /// Coordinates of the class of the cycle `z` (block positions at (i,j)).
    pub fn coordinates(&self, i: i32, j: i32, z: &[(usize, F::Elem)]) -> Result<Vec<F::Elem>, SpectralError> {
        let Some(b) = self.blocks.get(&(i, j)) else {
            return Ok(Vec::new());
        };
        let strand = &self.strands[&j];
        let base = strand.start[&i];
        let f = &self.field;
        let mut v = vec![f.zero(); strand.len];
        for (k, e) in z {
            v[base + k] = e.clone();
        }
        for st in &strand.log {
            v[st.a as usize] = f.zero();
            let vb = std::mem::replace(&mut v[st.b as usize], f.zero());
            if f.is_zero(&vb) {
                continue;
            }
            let c = f.neg(&f.quotient(&vb, &st.u));
            for (y, d) in &st.targets {
                let y = *y as usize;
                v[y] = f.add(&v[y], &f.mul(&c, d));
            }
        }
        Ok(b.survivors.iter().map(|&w| v[w].clone()).collect())
    }
}

/// Image of a surviving generator under the inclusion of the reduced complex.
fn include<F: Field>(f: &F, strand: &Strand<F::Elem>, w: usize) -> SparseVec<F::Elem> {
    let mut v: BTreeMap<usize, F::Elem> = BTreeMap::from([(w, f.one())]);
    for st in strand.log.iter().rev() {
        let mut c = f.zero();
        for (x, d) in &st.sources {
            if let Some(vx) = v.get(&(*x as usize)) {
                c = f.add(&c, &f.mul(vx, d));
            }
        }
        if !f.is_zero(&c) {
            v.insert(st.a as usize, f.neg(&f.quotient(&c, &st.u)));
        }
    }
    v.into_iter().filter(|(_, e)| !f.is_zero(e)).collect()
}

/// A map of homology with one matrix per source bigrading
/// (rows: target classes, columns: source classes).
#[derive(Clone, Debug)]
pub struct InducedMap<F: Field> {
    pub kind: MapKind,
    pub field: F,
    pub blocks: BTreeMap<Bigrading, DenseMat<F::Elem>>,
}

fn matrix_rank<F: Field>(m: &DenseMat<F::Elem>, field: &F) -> usize {
    let mut ech = Echelon::new(field.clone());
    let mut rank = 0;
    for c in 0..m.cols() {
        let col: SparseVec<F::Elem> = m
            .column(c)
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !field.is_zero(v))
            .collect();
        if ech.insert_with_tag(&col, Vec::new()).is_some() {
            rank += 1;
        }
    }
    rank
}

impl<F: Field> InducedMap<F> {
    pub fn bidegree(&self) -> Bigrading {
        self.kind.bidegree()
    }

    pub fn rank_at(&self, i: i32, j: i32) -> usize {
        self.blocks.get(&(i, j)).map_or(0, |m| matrix_rank(m, &self.field))
    }

    pub fn ranks(&self) -> BTreeMap<Bigrading, usize> {
        self.blocks
            .iter()
            .map(|(&k, m)| (k, matrix_rank(m, &self.field)))
            .filter(|(_, r)| *r > 0)
            .collect()
    }

    pub fn total_rank(&self) -> usize {
        self.ranks().values().sum()
    }

    /// The matrix at (i,j), zero-filled to the basis dimensions when absent.
    pub fn block_or_zero(&self, basis: &HomologyBasis<F>, i: i32, j: i32) -> DenseMat<F::Elem> {
        let (di, dj) = self.bidegree();
        self.blocks
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| DenseMat::filled(basis.dim(i + di, j + dj), basis.dim(i, j), self.field.zero()))
    }

    /// Bigradings where the composite of this map with itself is nonzero.
    pub fn square_violations(&self, basis: &HomologyBasis<F>) -> Vec<Bigrading> {
        let (di, dj) = self.bidegree();
        basis
            .bigradings()
            .filter(|&(i, j)| {
                let a = self.block_or_zero(basis, i, j);
                let b = self.block_or_zero(basis, i + di, j + dj);
                !b.mul_over(&a, &self.field).map(|m| m.is_zero_over(&self.field)).unwrap_or(false)
            })
            .collect()
    }
}

/// Builds the induced map of a chain map given on generators.
fn induced_by<F: Field>(
    c: &CubeComplex,
    basis: &HomologyBasis<F>,
    kind: MapKind,
    apply: impl Fn(usize, &mut dyn FnMut(usize, i64)),
) -> Result<InducedMap<F>, SpectralError> {
    let f = basis.field.clone();
    let (di, dj) = kind.bidegree();
    let mut blocks = BTreeMap::new();
    for ((i, j), b) in &basis.blocks {
        let (ti, tj) = (i + di, j + dj);
        let src = c.block(*i, *j);
        let mut m = DenseMat::filled(basis.dim(ti, tj), b.reps.len(), f.zero());
        for (col, z) in b.reps.iter().enumerate() {
            let mut image: BTreeMap<usize, F::Elem> = BTreeMap::new();
            for (k, coeff) in z {
                apply(src[*k] as usize, &mut |t, s| {
                    let pos = c.position(t);
                    let e = image.entry(pos).or_insert_with(|| f.zero());
                    *e = f.add(e, &f.mul(coeff, &f.from_i64(s)));
                });
            }
            let image: SparseVec<F::Elem> = image.into_iter().filter(|(_, v)| !f.is_zero(v)).collect();
            for (row, v) in basis.coordinates(ti, tj, &image)?.into_iter().enumerate() {
                m[(row, col)] = v;
            }
        }
        blocks.insert((*i, *j), m);
    }
    Ok(InducedMap {
        kind,
        field: f,
        blocks,
    })
}

fn require(kind: MapKind, ok: bool, needs: &'static str, ring: RingTag) -> Result<(), SpectralError> {
    if ok {
        Ok(())
    } else {
        Err(SpectralError::MapRing { map: kind, needs, ring })
    }
}

/// ν* on H(L; ℤ₂), bidegree (0,2).
pub fn nu_star(c: &CubeComplex, basis: &HomologyBasis<PrimeField>) -> Result<InducedMap<PrimeField>, SpectralError> {
    require(MapKind::NuStar, basis.tag == RingTag::ModP(2), "Z2", basis.tag)?;
    induced_by(c, basis, MapKind::NuStar, |g, f| {
        for t in c.nu_terms(g) {
            f(t, 1);
        }
    })
}

/// d_T* on H(L; ℤ₂), bidegree (1,2).
pub fn d_t_star(c: &CubeComplex, basis: &HomologyBasis<PrimeField>) -> Result<InducedMap<PrimeField>, SpectralError> {
    require(MapKind::DTStar, basis.tag == RingTag::ModP(2), "Z2", basis.tag)?;
    induced_by(c, basis, MapKind::DTStar, |g, f| c.for_each_term(g, Part::Turner, |t, s| f(t, s)))
}

/// d_L* on H(L; F) for F = ℚ or ℤ_p with p odd, bidegree (1,4).
pub fn d_l_star<F: Field>(c: &CubeComplex, basis: &HomologyBasis<F>) -> Result<InducedMap<F>, SpectralError> {
    let ok = matches!(basis.tag, RingTag::Rationals) || matches!(basis.tag, RingTag::ModP(p) if p != 2);
    require(MapKind::DLStar, ok, "Q or an odd prime", basis.tag)?;
    induced_by(c, basis, MapKind::DLStar, |g, f| c.for_each_term(g, Part::Lee, |t, s| f(t, s)))
}

/// First Bockstein d_B¹ on H(L; ℤ_p): lift a mod-p cycle, apply d, divide by p.
pub fn d_b1(c: &CubeComplex, basis: &HomologyBasis<PrimeField>) -> Result<InducedMap<PrimeField>, SpectralError> {
    let p = basis.field.characteristic();
    let f = basis.field.clone();
    let mut blocks = BTreeMap::new();
    for ((i, j), b) in &basis.blocks {
        let d = c.component_block(Part::Khovanov, *i, *j);
        let mut m = DenseMat::filled(basis.dim(i + 1, *j), b.reps.len(), 0u64);
        for (col, z) in b.reps.iter().enumerate() {
            let mut x = vec![0u64; d.cols()];
            for (k, v) in z {
                x[*k] = *v;
            }
            let y = lift_and_divide(&x, &d, p, 1)?;
            let y: SparseVec<u64> = y.into_iter().enumerate().filter(|(_, v)| *v != 0).collect();
            for (row, v) in basis.coordinates(i + 1, *j, &y)?.into_iter().enumerate() {
                m[(row, col)] = v;
            }
        }
        blocks.insert((*i, *j), m);
    }
    Ok(InducedMap {
        kind: MapKind::DB1,
        field: f,
        blocks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TbvReport {
    pub violations: Vec<Bigrading>,
    pub bigradings_checked: usize,
    pub rank_dt: usize,
    pub rank_rhs: usize,
}

impl TbvReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// d_T* = d_B¹∘ν* + ν*∘d_B¹ on H(L; ℤ₂), compared as matrices at every bigrading.
pub fn tbv_check(c: &CubeComplex, basis: &HomologyBasis<PrimeField>) -> Result<TbvReport, SpectralError> {
    let f = basis.field.clone();
    let nu = nu_star(c, basis)?;
    let dt = d_t_star(c, basis)?;
    let db = d_b1(c, basis)?;
    let mut violations = Vec::new();
    let (mut rank_dt, mut rank_rhs, mut checked) = (0, 0, 0);
    for (i, j) in basis.bigradings().collect::<Vec<_>>() {
        checked += 1;
        let lhs = dt.block_or_zero(basis, i, j);
        let a = db.block_or_zero(basis, i, j + 2).mul_over(&nu.block_or_zero(basis, i, j), &f)?;
        let b = nu.block_or_zero(basis, i + 1, j).mul_over(&db.block_or_zero(basis, i, j), &f)?;
        let rhs = a.add_over(&b, &f)?;
        rank_dt += matrix_rank(&lhs, &f);
        rank_rhs += matrix_rank(&rhs, &f);
        if lhs != rhs {
            violations.push((i, j));
        }
    }
    Ok(TbvReport {
        violations,
        bigradings_checked: checked,
        rank_dt,
        rank_rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuAcyclicityReport {
    /// Bigradings where (H(L;ℤ₂), ν*) has homology, with its dimension.
    pub nonzero: Vec<(Bigrading, usize)>,
    pub square_violations: Vec<Bigrading>,
}

impl NuAcyclicityReport {
    pub fn passed(&self) -> bool {
        self.nonzero.is_empty() && self.square_violations.is_empty()
    }
}

pub fn nu_acyclicity(c: &CubeComplex, basis: &HomologyBasis<PrimeField>) -> Result<NuAcyclicityReport, SpectralError> {
    let nu = nu_star(c, basis)?;
    let mut nonzero = Vec::new();
    for (i, j) in basis.bigradings().collect::<Vec<_>>() {
        let h = basis.dim(i, j) as i64 - nu.rank_at(i, j) as i64 - nu.rank_at(i, j - 2) as i64;
        if h != 0 {
            nonzero.push(((i, j), h.unsigned_abs() as usize));
        }
    }
    Ok(NuAcyclicityReport {
        nonzero,
        square_violations: nu.square_violations(basis),
    })
}

/// A bigrading where rank d_B¹ disagrees with the integral torsion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionCountMismatch {
    pub i: i32,
    pub j: i32,
    pub rank_into: usize,
    pub order_p: usize,
    pub p_power: usize,
}

/// rank d_B¹ into (i,j) equals the number of ℤ_p summands of H^{i,j}, which is
/// at most the number of ℤ_{p^r} summands with equality exactly when no r ≥ 2 occurs.
pub fn bockstein_torsion_check(z: &BigradedGroup, db1: &InducedMap<PrimeField>) -> Vec<TorsionCountMismatch> {
    let p = db1.field.characteristic();
    let ranks = db1.ranks();
    let mut keys: Vec<Bigrading> = z.support().into_iter().collect();
    keys.extend(ranks.keys().map(|&(i, j)| (i + 1, j)));
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .filter_map(|(i, j)| {
            let e = z.get(i, j);
            let order_p = e.torsion.iter().filter(|&&t| t == p).count();
            let p_power = z.p_torsion_count(p, i, j);
            let rank_into = ranks.get(&(i - 1, j)).copied().unwrap_or(0);
            let ok = rank_into == order_p && rank_into <= p_power && ((rank_into == p_power) == (order_p == p_power));
            (!ok).then_some(TorsionCountMismatch {
                i,
                j,
                rank_into,
                order_p,
                p_power,
            })
        })
        .collect()
}
