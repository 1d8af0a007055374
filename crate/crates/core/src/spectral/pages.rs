//! Pages of the Lee, Turner and Bockstein spectral sequences by staged cancellation.
//!
//! Entries of the total differential are cancelled in order of depth (filtration
//! gap for Lee/Turner, p-adic valuation for Bockstein). Once every entry of depth
//! below r is gone, the surviving generators count E_r and the depth-r pivots are
//! an elimination of d_r.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::complex::{CubeComplex, FrobeniusTheory, ReducibleComplex};
use crate::diagram::PlanarDiagram;
use crate::homology::{Bigrading, FieldTable};
use crate::linalg::{CheckedRationals, PrimeField, Rationals, Ring, RingTag, TruncatedPadic};

use super::{Sequence, SpectralError, SpectralPage};

/// Runs stages 1, 2, … on a complex whose depth-0 entries are already gone;
/// `pages` receives E_1 (the current state) onward.
fn staged<R: Ring>(
    rc: &mut ReducibleComplex<R>,
    depth: impl Fn(&R, Bigrading, Bigrading, &R::Elem) -> usize,
    max_depth: usize,
) -> Vec<(BTreeMap<Bigrading, usize>, BTreeMap<Bigrading, usize>)> {
    let mut out = Vec::new();
    let mut r = 1;
    loop {
        let dims = rc.alive_table();
        if rc.entry_count() == 0 || r > max_depth {
            out.push((dims, BTreeMap::new()));
            return out;
        }
        let mut ranks: BTreeMap<Bigrading, usize> = BTreeMap::new();
        rc.reduce_where(
            |ring, s, t, c| depth(ring, s, t, c) == r,
            |g| *ranks.entry(g).or_insert(0) += 1,
        );
        out.push((dims, ranks));
        r += 1;
    }
}

fn into_pages(
    sequence: Sequence,
    field: RingTag,
    raw: Vec<(BTreeMap<Bigrading, usize>, BTreeMap<Bigrading, usize>)>,
) -> Vec<SpectralPage> {
    // Drop trailing pages that repeat E_∞ with zero differential, keeping one.
    let mut pages: Vec<SpectralPage> = raw
        .into_iter()
        .enumerate()
        .map(|(k, (dims, ranks))| SpectralPage::new(sequence, k + 1, FieldTable::from_dims(field, dims), ranks))
        .collect();
    while pages.len() >= 2 && pages[pages.len() - 2].ranks.is_empty() {
        pages.pop();
    }
    pages
}

fn filtered_run<R: Ring>(c: &CubeComplex, ring: R, field: RingTag, sequence: Sequence) -> Vec<SpectralPage> {
    let gens: Vec<u32> = (0..c.generator_count() as u32).collect();
    let mut rc = c.reducible(ring, &gens, c.theory().parts());
    let jump = c.theory().jump();
    let gap = move |_: &R, s: Bigrading, t: Bigrading, _: &R::Elem| ((t.1 - s.1) / jump) as usize;
    rc.reduce_where(|r, s, t, e| gap(r, s, t, e) == 0, |_| {});
    let js = c.j_values();
    let span = match (js.first(), js.last()) {
        (Some(lo), Some(hi)) => ((hi - lo) / jump) as usize,
        _ => 0,
    };
    into_pages(sequence, field, staged(&mut rc, gap, span))
}

/// Pages of the Lee (ℚ or odd ℤ_p) or Turner (ℤ₂) spectral sequence, E_1 through E_∞.
pub fn filtered_pages(c: &CubeComplex) -> Result<Vec<SpectralPage>, SpectralError> {
    let ring = c.ring();
    match (c.theory(), ring) {
        (FrobeniusTheory::Lee, RingTag::Rationals) => {
            let fast = CheckedRationals::new();
            let pages = filtered_run(c, fast.clone(), ring, Sequence::Lee(ring));
            if fast.overflowed() {
                Ok(filtered_run(c, Rationals, ring, Sequence::Lee(ring)))
            } else {
                Ok(pages)
            }
        }
        (FrobeniusTheory::Lee, RingTag::ModP(p)) => {
            Ok(filtered_run(c, PrimeField::new(u64::from(p)), ring, Sequence::Lee(ring)))
        }
        (FrobeniusTheory::Turner, RingTag::ModP(2)) => Ok(filtered_run(c, PrimeField::new(2), ring, Sequence::Turner)),
        (t, r) => Err(SpectralError::NotASequence { theory: t, ring: r }),
    }
}

/// Convenience: build the filtered complex for `theory` over `ring` and run it.
pub fn sequence_pages(d: &PlanarDiagram, theory: FrobeniusTheory, ring: RingTag) -> Result<Vec<SpectralPage>, SpectralError> {
    let c = CubeComplex::build(d, theory, ring)?;
    filtered_pages(&c)
}

/// Total homology of a filtered theory, summed over polynomial gradings:
/// `i ↦ dim`. For BARNATAN_F2 this is filtered Bar-Natan homology.
pub fn total_homology_by_i(c: &CubeComplex) -> Result<BTreeMap<i32, usize>, SpectralError> {
    let gens: Vec<u32> = (0..c.generator_count() as u32).collect();
    let mut out = BTreeMap::new();
    let mut count = |table: BTreeMap<Bigrading, usize>| {
        for ((i, _), d) in table {
            *out.entry(i).or_insert(0) += d;
        }
    };
    match c.ring() {
        RingTag::ModP(p) => {
            let mut rc = c.reducible(PrimeField::new(u64::from(p)), &gens, c.theory().parts());
            rc.reduce_units();
            count(rc.alive_table());
        }
        RingTag::Rationals => {
            let mut rc = c.reducible(Rationals, &gens, c.theory().parts());
            rc.reduce_units();
            count(rc.alive_table());
        }
        RingTag::Integers => return Err(SpectralError::NeedsField),
    }
    Ok(out)
}

/// Bockstein spectral sequence for the prime p on the integral Khovanov complex:
/// E¹ is homology mod p and d^r has bidegree (1,0).
pub fn bockstein_pages(c: &CubeComplex, p: u64) -> Result<Vec<SpectralPage>, SpectralError> {
    if c.theory() != FrobeniusTheory::Khovanov {
        return Err(SpectralError::NotASequence {
            theory: c.theory(),
            ring: c.ring(),
        });
    }
    let field = RingTag::mod_p(p)?;
    let ring = TruncatedPadic::new(p);
    let digits = ring.digits() as usize;
    let per_j: Vec<_> = c
        .j_values()
        .into_par_iter()
        .map(|j| {
            let mut rc = c.reducible_in_j(ring.clone(), j);
            let val = |r: &TruncatedPadic, _: Bigrading, _: Bigrading, e: &u128| r.valuation(e).unwrap_or(u32::MAX) as usize;
            rc.reduce_where(|r, s, t, e| val(r, s, t, e) == 0, |_| {});
            staged(&mut rc, val, digits)
        })
        .collect();
    let longest = per_j.iter().map(Vec::len).max().unwrap_or(1);
    let mut raw: Vec<(BTreeMap<Bigrading, usize>, BTreeMap<Bigrading, usize>)> = vec![Default::default(); longest];
    for stages in per_j {
        let last = stages.last().cloned().unwrap_or_default();
        for k in 0..longest {
            let (dims, ranks) = stages.get(k).cloned().unwrap_or_else(|| (last.0.clone(), BTreeMap::new()));
            raw[k].0.extend(dims);
            raw[k].1.extend(ranks);
        }
    }
    Ok(into_pages(Sequence::Bockstein(p), field, raw))
}
