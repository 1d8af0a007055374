//! Khovanov homology over ℤ, ℚ and ℤ_p, one polynomial grading at a time.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{CubeComplex, FrobeniusTheory, ReducibleComplex};
use crate::linalg::{
    prime_power_factors, rank_fraction_free, smith_normal_form, CheckedIntegers, Integers, PrimeField, Ring, RingTag,
    SparseMat,
};

use super::{BigradedGroup, FieldTable, HomologyError};

/// Bookkeeping from one homology run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyStats {
    pub generators: usize,
    pub cancelled_pairs: usize,
    pub residual_generators: usize,
    /// Polynomial gradings that overflowed `i64` and were redone with big integers.
    pub bigint_fallbacks: usize,
}

impl HomologyStats {
    fn absorb(&mut self, other: &HomologyStats) {
        self.generators += other.generators;
        self.cancelled_pairs += other.cancelled_pairs;
        self.residual_generators += other.residual_generators;
        self.bigint_fallbacks += other.bigint_fallbacks;
    }
}

/// What survives unit cancellation in one polynomial grading: the number of
/// generators per homological grading and the residual maps `i → i+1`.
struct Residual {
    counts: BTreeMap<i32, usize>,
    maps: BTreeMap<i32, SparseMat>,
    stats: HomologyStats,
}

fn residual_of<R: Ring>(rc: &ReducibleComplex<R>, lift: impl Fn(&R::Elem) -> BigInt + Copy) -> (BTreeMap<i32, usize>, BTreeMap<i32, SparseMat>) {
    let by: BTreeMap<i32, Vec<usize>> = rc
        .alive_by_grading()
        .into_iter()
        .map(|((i, _), v)| (i, v))
        .fold(BTreeMap::new(), |mut acc, (i, v)| {
            acc.entry(i).or_insert_with(Vec::new).extend(v);
            acc
        });
    let counts = by.iter().map(|(&i, v)| (i, v.len())).collect();
    let mut maps = BTreeMap::new();
    for (&i, src) in &by {
        if let Some(tgt) = by.get(&(i + 1)) {
            let m = rc.residual_matrix(src, tgt, lift);
            if !m.is_zero() {
                maps.insert(i, m);
            }
        }
    }
    (counts, maps)
}

fn integral_residual(c: &CubeComplex, j: i32) -> Residual {
    let ring = CheckedIntegers::new();
    let mut rc = c.reducible_in_j(ring.clone(), j);
    let generators = rc.len();
    let cancelled = rc.reduce_units();
    if !ring.overflowed() {
        let (counts, maps) = residual_of(&rc, |&v| BigInt::from(v));
        return Residual {
            counts,
            maps,
            stats: HomologyStats {
                generators,
                cancelled_pairs: cancelled,
                residual_generators: rc.alive_count(),
                bigint_fallbacks: 0,
            },
        };
    }
    drop(rc);
    let mut rc = c.reducible_in_j(Integers, j);
    let cancelled = rc.reduce_units();
    let (counts, maps) = residual_of(&rc, |v: &BigInt| v.clone());
    Residual {
        counts,
        maps,
        stats: HomologyStats {
            generators,
            cancelled_pairs: cancelled,
            residual_generators: rc.alive_count(),
            bigint_fallbacks: 1,
        },
    }
}

fn require_khovanov(c: &CubeComplex) -> Result<(), HomologyError> {
    if c.theory() == FrobeniusTheory::Khovanov {
        Ok(())
    } else {
        Err(HomologyError::FilteredTheory(c.theory()))
    }
}

/// Integral Khovanov homology with primary torsion decomposition.
pub fn integral_homology(c: &CubeComplex) -> Result<BigradedGroup, HomologyError> {
    integral_homology_with_stats(c).map(|(h, _)| h)
}

pub fn integral_homology_with_stats(c: &CubeComplex) -> Result<(BigradedGroup, HomologyStats), HomologyError> {
    require_khovanov(c)?;
    let per_j: Vec<Result<(i32, Vec<(i32, usize, Vec<u64>)>, HomologyStats), HomologyError>> = c
        .j_values()
        .into_par_iter()
        .map(|j| {
            let res = integral_residual(c, j);
            let mut ranks: BTreeMap<i32, usize> = BTreeMap::new();
            let mut torsion: BTreeMap<i32, Vec<u64>> = BTreeMap::new();
            for (&i, m) in &res.maps {
                let snf = smith_normal_form(m);
                ranks.insert(i, snf.rank);
                let mut t = Vec::new();
                for d in snf.torsion() {
                    t.extend(prime_power_factors(d)?);
                }
                torsion.insert(i + 1, t);
            }
            let mut cells = Vec::new();
            for (&i, &n) in &res.counts {
                let out = ranks.get(&i).copied().unwrap_or(0);
                let inc = ranks.get(&(i - 1)).copied().unwrap_or(0);
                cells.push((i, n - out - inc, torsion.remove(&i).unwrap_or_default()));
            }
            Ok((j, cells, res.stats))
        })
        .collect();
    let mut h = BigradedGroup::new();
    let mut stats = HomologyStats::default();
    for r in per_j {
        let (j, cells, s) = r?;
        stats.absorb(&s);
        for (i, rank, t) in cells {
            h.insert(i, j, rank, t);
        }
    }
    Ok((h, stats))
}

/// Khovanov homology over ℚ or ℤ_p.
pub fn field_homology(c: &CubeComplex, field: RingTag) -> Result<FieldTable, HomologyError> {
    require_khovanov(c)?;
    let cells: Vec<(i32, i32, usize)> = match field {
        RingTag::Integers => return Err(HomologyError::NotAField),
        RingTag::ModP(p) => {
            let f = PrimeField::new(u64::from(p));
            c.j_values()
                .into_par_iter()
                .flat_map_iter(|j| {
                    let mut rc = c.reducible_in_j(f.clone(), j);
                    rc.reduce_units();
                    rc.alive_table().into_iter().map(|((i, j), d)| (i, j, d)).collect::<Vec<_>>()
                })
                .collect()
        }
        RingTag::Rationals => c
            .j_values()
            .into_par_iter()
            .flat_map_iter(|j| {
                let res = integral_residual(c, j);
                let ranks: BTreeMap<i32, usize> = res.maps.iter().map(|(&i, m)| (i, rank_fraction_free(m))).collect();
                res.counts
                    .iter()
                    .map(|(&i, &n)| {
                        let out = ranks.get(&i).copied().unwrap_or(0);
                        let inc = ranks.get(&(i - 1)).copied().unwrap_or(0);
                        (i, j, n - out - inc)
                    })
                    .collect::<Vec<_>>()
            })
            .collect(),
    };
    Ok(FieldTable::from_dims(field, cells.into_iter().map(|(i, j, d)| ((i, j), d))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::parse_braid_word;
    use crate::diagram::{braid_closure, SignConvention};

    fn kh(text: &str, s: usize) -> CubeComplex {
        let d = braid_closure(&parse_braid_word(text, s).unwrap(), SignConvention::Standard);
        CubeComplex::build(&d, FrobeniusTheory::Khovanov, RingTag::Integers).unwrap()
    }

    #[test]
    fn unknot_is_two_copies_of_z() {
        let h = integral_homology(&kh("", 1)).unwrap();
        assert_eq!(h.support().into_iter().collect::<Vec<_>>(), vec![(0, -1), (0, 1)]);
        assert_eq!(h.total_rank(), 2);
        assert!(h.torsion_values().is_empty());
    }

    #[test]
    fn reidemeister_one() {
        let u = integral_homology(&kh("", 1)).unwrap();
        assert_eq!(integral_homology(&kh("1", 2)).unwrap(), u);
        assert_eq!(integral_homology(&kh("-1", 2)).unwrap(), u);
    }

    #[test]
    fn left_trefoil() {
        let h = integral_homology(&kh("1 2 1 2", 3)).unwrap();
        for (i, j) in [(0, -1), (0, -3), (-2, -5), (-3, -9)] {
            assert_eq!(h.get(i, j).rank, 1, "({i},{j})");
            assert!(h.get(i, j).torsion.is_empty());
        }
        assert_eq!(h.get(-2, -7).torsion, vec![2]);
        assert_eq!(h.get(-2, -7).rank, 0);
        assert_eq!(h.total_rank(), 4);
        let f2 = field_homology(&kh("1 2 1 2", 3), RingTag::ModP(2)).unwrap();
        assert_eq!(f2, h.field_table(RingTag::ModP(2)));
        let q = field_homology(&kh("1 2 1 2", 3), RingTag::Rationals).unwrap();
        assert_eq!(q, h.field_table(RingTag::Rationals));
    }

    #[test]
    fn hopf_type_delta() {
        let q = field_homology(&kh("D", 3), RingTag::Rationals).unwrap();
        let expect = FieldTable::from_dims(RingTag::Rationals, [((0, 0), 1), ((0, -2), 1), ((-2, -4), 1), ((-2, -6), 1)]);
        assert_eq!(q, expect);
    }

    #[test]
    fn filtered_theory_is_refused() {
        let d = braid_closure(&parse_braid_word("1", 2).unwrap(), SignConvention::Standard);
        let c = CubeComplex::build(&d, FrobeniusTheory::Lee, RingTag::Rationals).unwrap();
        assert!(integral_homology(&c).is_err());
        assert!(field_homology(&kh("1", 2), RingTag::Integers).is_err());
    }
}
