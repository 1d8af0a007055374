//! The Ω₀–Ω₃ verification program: every family member within a crossing budget
//! is computed and checked against the torsion theorem and its supporting facts.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::{BraidError, BraidWord, MurasugiClass, MurasugiKind};
use crate::complex::{ComplexError, CubeComplex, FrobeniusTheory};
use crate::diagram::{braid_closure, PlanarDiagram, SignConvention};
use crate::homology::{field_homology, integral_homology, BigradedGroup, HomologyError};
use crate::linalg::{LinalgError, RingTag};
use crate::spectral::{
    bockstein_pages, infinity_predictions, nu_acyclicity, tbv_check, HomologyBasis, SpectralError,
};
use crate::thin::{analyze_with, filtered_evidence};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A family member: Murasugi class with its representative word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub label: String,
    pub class: MurasugiClass,
    pub word: BraidWord,
}

impl Member {
    pub fn new(kind: MurasugiKind, n: i64) -> Result<Self, BraidError> {
        let class = MurasugiClass::simple(kind, n)?;
        let word = class.word()?;
        let label = match kind {
            MurasugiKind::Omega0 => format!("T(3,{})", 3 * n),
            MurasugiKind::Omega1 => format!("T(3,{})", 3 * n + 1),
            MurasugiKind::Omega2 => format!("T(3,{})", 3 * n + 2),
            _ => format!("D^{}", 2 * n + 1),
        };
        Ok(Self { label, class, word })
    }

    pub fn crossings(&self) -> usize {
        self.word.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub label: String,
    pub crossings: usize,
}

/// Ω₀–Ω₃ members with 0 ≤ n ≤ `max_n`, split by the crossing budget.
pub fn family_members(max_n: i64, budget: usize) -> Result<(Vec<Member>, Vec<Skipped>), BraidError> {
    let mut keep = Vec::new();
    let mut skipped = Vec::new();
    for kind in [MurasugiKind::Omega0, MurasugiKind::Omega1, MurasugiKind::Omega2, MurasugiKind::Omega3] {
        for n in 0..=max_n {
            let m = Member::new(kind, n)?;
            if m.crossings() <= budget {
                keep.push(m);
            } else {
                skipped.push(Skipped {
                    label: m.label.clone(),
                    crossings: m.crossings(),
                });
            }
        }
    }
    keep.sort_by_key(Member::crossings);
    Ok((keep, skipped))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MemberReport {
    pub label: String,
    pub kind: MurasugiKind,
    pub n: i64,
    pub crossings: usize,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl MemberReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub max_n: i64,
    pub budget: usize,
    pub members: Vec<MemberReport>,
    pub skipped: Vec<Skipped>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.members.iter().all(MemberReport::passed)
    }
}

fn unknot() -> BigradedGroup {
    let mut u = BigradedGroup::new();
    u.insert(0, 1, 1, Vec::new());
    u.insert(0, -1, 1, Vec::new());
    u
}

/// H(Δ^{2n+1}) against H(T(3,3n+1)){−1} ⊕ H(U)[−4n−2]{−12n−5}, integrally and
/// over ℚ, ℤ₂ and ℤ₃.
pub fn delta_decomposition(n: i64, convention: SignConvention) -> Result<Vec<Check>, SuiteError> {
    let odd = braid_closure(&Member::new(MurasugiKind::Omega3, n)?.word, convention);
    let torus = braid_closure(&Member::new(MurasugiKind::Omega1, n)?.word, convention);
    let (di, dj) = (-4 * n as i32 - 2, -12 * n as i32 - 5);
    let zo = integral_homology(&CubeComplex::build(&odd, FrobeniusTheory::Khovanov, RingTag::Integers)?)?;
    let zt = integral_homology(&CubeComplex::build(&torus, FrobeniusTheory::Khovanov, RingTag::Integers)?)?;
    let expected = zt.shifted(0, -1).direct_sum(&unknot().shifted(di, dj));
    let mut out = vec![Check::new(
        "decomposition(Z)",
        zo == expected,
        format!("H(D^{}) vs H(T(3,{})){{-1}} + H(U)[{di}]{{{dj}}}", 2 * n + 1, 3 * n + 1),
    )];
    for field in [RingTag::Rationals, RingTag::ModP(2), RingTag::ModP(3)] {
        let ho = field_homology(&CubeComplex::build(&odd, FrobeniusTheory::Khovanov, field)?, field)?;
        let ht = field_homology(&CubeComplex::build(&torus, FrobeniusTheory::Khovanov, field)?, field)?;
        let rhs = ht.shifted(0, -1).direct_sum(&unknot().field_table(field).shifted(di, dj));
        out.push(Check::new(
            format!("decomposition({})", field.label()),
            ho == rhs,
            format!("{} classes", ho.total()),
        ));
    }
    Ok(out)
}

/// All checks that apply to one link.
pub fn link_checks(d: &PlanarDiagram) -> Result<Vec<Check>, SuiteError> {
    let mut out = Vec::new();
    let c = CubeComplex::build(d, FrobeniusTheory::Khovanov, RingTag::Integers)?;
    let z = integral_homology(&c)?;
    let torsion = z.torsion_values();
    out.push(Check::new(
        "z2_torsion_only",
        torsion.iter().all(|&t| t == 2),
        format!("torsion {torsion:?}"),
    ));

    let evidence = filtered_evidence(d, &z)?;
    let expected = 1usize << d.components;
    for (pages, label) in evidence.lee.iter().zip(["Q", "Z3"]) {
        let total = pages.last().map_or(0, |p| p.table.total());
        out.push(Check::new(
            format!("lee_total({label})"),
            total == expected,
            format!("E_inf {total}, 2^components {expected}"),
        ));
    }
    let totals = evidence.turner.last().map(|p| p.table.totals_by_i()).unwrap_or_default();
    let predicted = infinity_predictions(d);
    out.push(Check::new(
        "turner_prediction",
        totals == predicted,
        format!("E_inf {totals:?}, predicted {predicted:?}"),
    ));

    let analysis = analyze_with(d, &z, true, Some(evidence))?;
    let positive = analysis.regions.iter().filter(|r| r.report.verdict).count();
    out.push(Check::new(
        "thin_verdicts_sound",
        analysis.sound(),
        format!("{} regions, {positive} with a positive verdict", analysis.regions.len()),
    ));

    let two = CubeComplex::build(d, FrobeniusTheory::Khovanov, RingTag::ModP(2))?;
    let basis = HomologyBasis::mod_p(&two, 2)?;
    let tbv = tbv_check(&two, &basis)?;
    out.push(Check::new(
        "tbv_identity",
        tbv.passed(),
        format!("{} bigradings, rank {}", tbv.bigradings_checked, tbv.rank_dt),
    ));
    let nu = nu_acyclicity(&two, &basis)?;
    out.push(Check::new("nu_acyclic", nu.passed(), format!("{} nonzero", nu.nonzero.len())));

    for p in [2u64, 3] {
        let pages = bockstein_pages(&c, p)?;
        let terminal = pages.last().map(|pg| pg.table.clone());
        let free = z.field_table(RingTag::Rationals).with_field(RingTag::mod_p(p)?);
        out.push(Check::new(
            format!("bockstein_terminal({p})"),
            terminal.as_ref() == Some(&free),
            format!("{} pages", pages.len()),
        ));
    }
    Ok(out)
}

pub fn check_member(m: &Member, convention: SignConvention) -> Result<MemberReport, SuiteError> {
    let start = Instant::now();
    let d = braid_closure(&m.word, convention);
    let mut checks = link_checks(&d)?;
    if m.class.kind == MurasugiKind::Omega3 {
        checks.extend(delta_decomposition(m.class.n, convention)?);
    }
    Ok(MemberReport {
        label: m.label.clone(),
        kind: m.class.kind,
        n: m.class.n,
        crossings: m.crossings(),
        checks,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs every member within budget.
pub fn verify_families(max_n: i64, budget: usize, convention: SignConvention) -> Result<SuiteReport, SuiteError> {
    let (members, skipped) = family_members(max_n, budget)?;
    let members = members
        .iter()
        .map(|m| check_member(m, convention))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SuiteReport {
        max_n,
        budget,
        members,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_by_budget() {
        let (keep, skipped) = family_members(2, 12).unwrap();
        let labels: Vec<&str> = keep.iter().map(|m| m.label.as_str()).collect();
        for l in ["T(3,2)", "T(3,3)", "T(3,4)", "D^1", "D^3"] {
            assert!(labels.contains(&l), "{l} missing from {labels:?}");
        }
        assert!(skipped.iter().any(|s| s.label == "D^5" && s.crossings == 15));
        let (keep, _) = family_members(2, 16).unwrap();
        assert!(keep.iter().any(|m| m.label == "T(3,5)"));
        assert!(keep.iter().any(|m| m.label == "D^5"));
    }

    #[test]
    fn decomposition_at_zero_and_one() {
        for n in [0, 1] {
            for c in delta_decomposition(n, SignConvention::Standard).unwrap() {
                assert!(c.passed, "n={n}: {c:?}");
            }
        }
    }

    #[test]
    fn small_members_pass() {
        let report = verify_families(1, 9, SignConvention::Standard).unwrap();
        for m in &report.members {
            assert!(m.passed(), "{}: {:?}", m.label, m.checks);
        }
    }
}
