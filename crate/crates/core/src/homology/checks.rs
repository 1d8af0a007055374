//! Consistency checks between homology tables.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::complex::{CubeComplex, FrobeniusTheory};
use crate::diagram::{braid_closure, PlanarDiagram, SignConvention};
use crate::linalg::RingTag;

use super::{field_homology, BigradedGroup, FieldTable, HomologyError};

/// A bigrading where two dimension counts disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub i: i32,
    pub j: i32,
    pub expected: usize,
    pub found: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UctReport {
    pub field: RingTag,
    pub violations: Vec<Mismatch>,
}

impl UctReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn compare(expected: &FieldTable, found: &FieldTable) -> Vec<Mismatch> {
    let keys: BTreeSet<(i32, i32)> = expected.support().union(&found.support()).copied().collect();
    keys.into_iter()
        .filter_map(|(i, j)| {
            let (e, f) = (expected.get(i, j), found.get(i, j));
            (e != f).then_some(Mismatch {
                i,
                j,
                expected: e,
                found: f,
            })
        })
        .collect()
}

/// dim H(ℤ_p)^{i,j} = rk H^{i,j} + t_p(i,j) + t_p(i+1,j), and dim H(ℚ) = rk.
pub fn uct_check(z: &BigradedGroup, f: &FieldTable) -> UctReport {
    UctReport {
        field: f.field,
        violations: compare(&z.field_table(f.field), f),
    }
}

/// Khovanov homology over a field of the closure of `w`.
pub fn khovanov_field_table(w: &BraidWord, convention: SignConvention, field: RingTag) -> Result<FieldTable, HomologyError> {
    diagram_field_table(&braid_closure(w, convention), field)
}

pub fn diagram_field_table(d: &PlanarDiagram, field: RingTag) -> Result<FieldTable, HomologyError> {
    let c = CubeComplex::build(d, FrobeniusTheory::Khovanov, field)?;
    field_homology(&c, field)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MirrorReport {
    pub field: RingTag,
    pub violations: Vec<Mismatch>,
}

impl MirrorReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// dim H^{i,j}(mirror) = dim H^{−i,−j}(original) over a field.
pub fn mirror_duality_check(w: &BraidWord, field: RingTag, convention: SignConvention) -> Result<MirrorReport, HomologyError> {
    let h = khovanov_field_table(w, convention, field)?;
    let m = khovanov_field_table(&w.mirror(), convention, field)?;
    Ok(MirrorReport {
        field,
        violations: compare(&h.reflected(), &m),
    })
}

/// One polynomial grading's strand of the long exact sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LesStrand {
    pub j: i32,
    pub alternating_sum: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LesReport {
    pub field: RingTag,
    pub crossing: usize,
    /// Sign of the smoothed crossing in D.
    pub sign: i8,
    /// n₋(D₀) − n₋(D) for a negative crossing, n₋(D₁) − n₋(D) for a positive one.
    pub c: i32,
    pub failures: Vec<LesStrand>,
    pub strands_checked: usize,
}

impl LesReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For each j, the terms `A_i → B_i → C_i → A_{i+1}` of the smoothing sequence
/// at one crossing, as (a, b, c) dimension triples per i. B_i = H^{i,j}(D).
fn les_terms(sign: i8, c: i32, h: &FieldTable, h0: &FieldTable, h1: &FieldTable, i: i32, j: i32) -> (usize, usize, usize) {
    let b = h.get(i, j);
    if sign < 0 {
        (h1.get(i, j + 1), b, h0.get(i - c, j - 3 * c - 1))
    } else {
        (h1.get(i - c - 1, j - 3 * c - 2), b, h0.get(i, j - 1))
    }
}

/// Checks Σ_i (−1)^i (a_i − b_i + c_i) = 0 along every strand of the long exact
/// sequence obtained by smoothing active crossing `crossing` of the closure of `w`.
pub fn les_consistency(
    w: &BraidWord,
    crossing: usize,
    field: RingTag,
    convention: SignConvention,
) -> Result<LesReport, HomologyError> {
    let d = braid_closure(w, convention);
    let d0 = d.smoothed(crossing, false)?;
    let d1 = d.smoothed(crossing, true)?;
    let sign = d.active_crossing(crossing).sign;
    let c = if sign < 0 {
        d0.n_minus as i32 - d.n_minus as i32
    } else {
        d1.n_minus as i32 - d.n_minus as i32
    };
    let h = diagram_field_table(&d, field)?;
    let h0 = diagram_field_table(&d0, field)?;
    let h1 = diagram_field_table(&d1, field)?;

    // Every (i, j) of D that some nonzero term can reach.
    let mut strands: BTreeSet<i32> = BTreeSet::new();
    let mut is: BTreeSet<i32> = BTreeSet::new();
    for ((i, j), _) in h.iter() {
        strands.insert(j);
        is.insert(i);
    }
    for ((i, j), _) in h0.iter() {
        if sign < 0 {
            strands.insert(j + 3 * c + 1);
            is.insert(i + c);
        } else {
            strands.insert(j + 1);
            is.insert(i);
        }
    }
    for ((i, j), _) in h1.iter() {
        if sign < 0 {
            strands.insert(j - 1);
            is.insert(i);
        } else {
            strands.insert(j + 3 * c + 2);
            is.insert(i + c + 1);
        }
    }
    let (lo, hi) = match (is.first(), is.last()) {
        (Some(&lo), Some(&hi)) => (lo - 1, hi + 1),
        _ => (0, 0),
    };
    let mut failures = Vec::new();
    for &j in &strands {
        let mut sum = 0i64;
        for i in lo..=hi {
            let (a, b, cc) = les_terms(sign, c, &h, &h0, &h1, i, j);
            let t = a as i64 - b as i64 + cc as i64;
            sum += if i.rem_euclid(2) == 0 { t } else { -t };
        }
        if sum != 0 {
            failures.push(LesStrand { j, alternating_sum: sum });
        }
    }
    Ok(LesReport {
        field,
        crossing,
        sign,
        c,
        failures,
        strands_checked: strands.len(),
    })
}
