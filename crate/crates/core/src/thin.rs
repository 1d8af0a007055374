//! Thin regions and the torsion theorems that apply inside them.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use serde::{Deserialize, Serialize};

use crate::complex::{CubeComplex, FrobeniusTheory};
use crate::diagram::PlanarDiagram;
use crate::homology::{BigradedGroup, Bigrading, FieldTable};
use crate::linalg::RingTag;
use crate::spectral::{d_l_star, d_t_star, sequence_pages, HomologyBasis, SpectralError, SpectralPage};

/// For each homological grading, the values 2i − j where some H(L; ℤ_p) or
/// H(L; ℚ) is nonzero, derived from integral homology.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalProfile {
    pub diagonals: BTreeMap<i32, BTreeSet<i32>>,
}

impl DiagonalProfile {
    pub fn at(&self, i: i32) -> BTreeSet<i32> {
        self.diagonals.get(&i).cloned().unwrap_or_default()
    }

    pub fn count_at(&self, i: i32) -> usize {
        self.diagonals.get(&i).map_or(0, BTreeSet::len)
    }

    /// Gradings supported on more than two diagonals, or on two that are not adjacent.
    pub fn thick_gradings(&self) -> Vec<i32> {
        self.diagonals
            .iter()
            .filter(|(_, d)| compatible_s(d).is_some_and(|s| s.is_empty()))
            .map(|(&i, _)| i)
            .collect()
    }

    /// Profile of one field table.
    pub fn of_table(t: &FieldTable) -> Self {
        let mut diagonals: BTreeMap<i32, BTreeSet<i32>> = BTreeMap::new();
        for ((i, j), _) in t.iter() {
            diagonals.entry(i).or_default().insert(2 * i - j);
        }
        Self { diagonals }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, d) in &other.diagonals {
            out.diagonals.entry(*i).or_default().extend(d.iter().copied());
        }
        out
    }
}

/// Support over every coefficient field at once. Only primes dividing a torsion
/// coefficient can add support beyond the free part, so the union over the
/// finitely many such primes (and ℚ) decides "for all primes".
pub fn support_diagonals(z: &BigradedGroup) -> DiagonalProfile {
    let mut p = DiagonalProfile::of_table(&z.field_table(RingTag::Rationals));
    for q in z.torsion_primes() {
        if let Ok(tag) = RingTag::mod_p(q) {
            p = p.union(&DiagonalProfile::of_table(&z.field_table(tag)));
        }
    }
    p
}

/// `None` means no support (any s fits); otherwise the s with d ⊆ {s−1, s+1}.
fn compatible_s(d: &BTreeSet<i32>) -> Option<BTreeSet<i32>> {
    let mut it = d.iter();
    match (it.next(), it.next(), it.next()) {
        (None, _, _) => None,
        (Some(&a), None, _) => Some([a - 1, a + 1].into()),
        (Some(&a), Some(&b), None) if b - a == 2 => Some([a + 1].into()),
        _ => Some(BTreeSet::new()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinRegion {
    pub i1: i32,
    pub i2: i32,
    /// Every s with support in [i1, i2] on 2i − j = s ± 1.
    pub s_values: Vec<i32>,
    /// Some grading in the region has support on both diagonals.
    pub two_diagonals: bool,
    /// Torsion at i2 + 1, which echoes into the mod-p support at i2.
    pub torsion_above: Vec<(i32, i32, u64)>,
}

impl ThinRegion {
    pub fn contains(&self, i: i32) -> bool {
        self.i1 <= i && i <= self.i2
    }

    pub fn with_start(&self, i1: i32) -> Self {
        Self { i1, ..self.clone() }
    }
}

/// Maximal intervals of homological gradings that are thin for a common s.
pub fn find_thin_regions(p: &DiagonalProfile) -> Vec<ThinRegion> {
    find_thin_regions_for(p, &BigradedGroup::new())
}

/// As [`find_thin_regions`], also recording torsion just above each region.
pub fn find_thin_regions_for(p: &DiagonalProfile, z: &BigradedGroup) -> Vec<ThinRegion> {
    let supported: Vec<i32> = p.diagonals.iter().filter(|(_, d)| !d.is_empty()).map(|(&i, _)| i).collect();
    let (Some(&lo), Some(&hi)) = (supported.first(), supported.last()) else {
        return Vec::new();
    };
    let mut candidates: BTreeSet<i32> = BTreeSet::new();
    for d in p.diagonals.values() {
        if let Some(s) = compatible_s(d) {
            candidates.extend(s);
        }
    }
    let fits = |i: i32, s: i32| compatible_s(&p.at(i)).is_none_or(|set| set.contains(&s));
    let mut runs: BTreeMap<(i32, i32), BTreeSet<i32>> = BTreeMap::new();
    for &s in &candidates {
        let mut i = lo;
        while i <= hi {
            if !fits(i, s) {
                i += 1;
                continue;
            }
            let start = i;
            while i <= hi && fits(i, s) {
                i += 1;
            }
            // Trim unsupported ends.
            let (mut a, mut b) = (start, i - 1);
            while a <= b && p.count_at(a) == 0 {
                a += 1;
            }
            while b >= a && p.count_at(b) == 0 {
                b -= 1;
            }
            if a <= b {
                runs.entry((a, b)).or_default().insert(s);
            }
        }
    }
    let intervals: Vec<(i32, i32)> = runs.keys().copied().collect();
    runs.into_iter()
        .filter(|((a, b), _)| !intervals.iter().any(|&(c, d)| c <= *a && *b <= d && (c, d) != (*a, *b)))
        .map(|((a, b), s)| ThinRegion {
            i1: a,
            i2: b,
            s_values: s.into_iter().collect(),
            two_diagonals: (a..=b).any(|i| p.count_at(i) == 2),
            torsion_above: z
                .iter()
                .filter(|((i, _), _)| *i == b + 1)
                .flat_map(|((i, j), e)| e.torsion.iter().map(move |&t| (i, j, t)))
                .collect(),
        })
        .collect()
}

/// One hypothesis of the main theorem with the bigradings that break it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub holds: bool,
    pub witnesses: Vec<Bigrading>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Condition {
    fn from_witnesses(witnesses: Vec<Bigrading>) -> Self {
        Self {
            holds: witnesses.is_empty(),
            witnesses,
            note: None,
        }
    }
}

/// Lee and Turner pages used for the stronger hypothesis (4′): every Lee and
/// Turner differential out of homological grading i₁ − 1 vanishes.
#[derive(Clone, Debug, Default)]
pub struct FilteredEvidence {
    pub lee: Vec<Vec<SpectralPage>>,
    pub turner: Vec<SpectralPage>,
}

impl FilteredEvidence {
    /// Bigradings in homological grading i with a nonzero differential on some page.
    pub fn nonzero_at(&self, i: i32) -> Vec<Bigrading> {
        let mut out: BTreeSet<Bigrading> = BTreeSet::new();
        for page in self.lee.iter().flatten().chain(self.turner.iter()) {
            out.extend(page.ranks.keys().filter(|k| k.0 == i).copied());
        }
        out.into_iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub i1: i32,
    pub i2: i32,
    pub s: i32,
    pub thin: Condition,
    pub odd_primes_agree: Condition,
    pub torsion_free_start: Condition,
    pub vanishing_below: Condition,
    /// `Some` when (4) failed and the Lee/Turner pages were consulted.
    pub stronger: Option<Condition>,
    pub k_plus: BTreeMap<i32, usize>,
    pub k_minus: BTreeMap<i32, usize>,
    pub ell: BTreeMap<i32, usize>,
    pub verdict: bool,
}

/// Checks the hypotheses of the main torsion theorem on `region` with diagonal
/// parameter `s`. When the vanishing condition (4) fails and `evidence` is given,
/// the stronger hypothesis on Lee/Turner differentials is tried instead.
pub fn check_main_theorem(
    z: &BigradedGroup,
    region: &ThinRegion,
    s: i32,
    evidence: Option<&FilteredEvidence>,
) -> HypothesisReport {
    let (i1, i2) = (region.i1, region.i2);
    let profile = support_diagonals(z);
    let mut off = Vec::new();
    for i in i1..=i2 {
        for d in profile.at(i) {
            if d != s - 1 && d != s + 1 {
                off.push((i, 2 * i - d));
            }
        }
    }
    let thin = Condition::from_witnesses(off);

    let q = z.field_table(RingTag::Rationals);
    let dim_at = |t: &FieldTable| t.iter().filter(|((i, _), _)| *i == i1).map(|(_, d)| d).sum::<usize>();
    let mut odd_bad = Vec::new();
    let mut odd_note = Vec::new();
    for p in z.torsion_primes().into_iter().filter(|&p| p != 2) {
        let Ok(tag) = RingTag::mod_p(p) else { continue };
        let tp = z.field_table(tag);
        if dim_at(&tp) != dim_at(&q) {
            odd_note.push(p.to_string());
            odd_bad.extend(tp.iter().filter(|((i, j), d)| *i == i1 && *d != q.get(*i, *j)).map(|(k, _)| k));
        }
    }
    let mut odd_primes_agree = Condition::from_witnesses(odd_bad);
    odd_primes_agree.holds = odd_note.is_empty();
    if !odd_note.is_empty() {
        odd_primes_agree.note = Some(format!("dimension differs for p = {}", odd_note.join(", ")));
    }

    let torsion_free_start = Condition::from_witnesses(
        z.iter()
            .filter(|((i, _), e)| *i == i1 && !e.torsion.is_empty())
            .map(|(k, _)| k)
            .collect(),
    );
    let vanishing_below = Condition::from_witnesses(
        z.iter()
            .filter(|((i, j), e)| *i == i1 - 1 && *j <= 2 * i1 - s - 3 && !e.is_zero())
            .map(|(k, _)| k)
            .collect(),
    );
    let stronger = (!vanishing_below.holds).then(|| match evidence {
        Some(ev) => Condition::from_witnesses(ev.nonzero_at(i1 - 1)),
        None => Condition {
            holds: false,
            witnesses: Vec::new(),
            note: Some("no spectral data supplied".into()),
        },
    });

    let mut k_plus = BTreeMap::new();
    let mut k_minus = BTreeMap::new();
    let mut ell = BTreeMap::new();
    for i in i1..=i2 {
        k_plus.insert(i, z.rank(i, 2 * i - s + 1));
        k_minus.insert(i, z.rank(i, 2 * i - s - 1));
        ell.insert(i, z.p_torsion_count(2, i, 2 * i - s - 1));
    }
    let fourth = vanishing_below.holds || stronger.as_ref().is_some_and(|c| c.holds);
    let verdict = thin.holds && odd_primes_agree.holds && torsion_free_start.holds && fourth;
    HypothesisReport {
        i1,
        i2,
        s,
        thin,
        odd_primes_agree,
        torsion_free_start,
        vanishing_below,
        stronger,
        k_plus,
        k_minus,
        ell,
        verdict,
    }
}

/// Tries every s of the region and every start i₁ ∈ [region.i1, region.i2],
/// returning the report for the widest sub-region with a positive verdict, or
/// the report for the full region when none has one.
pub fn best_sub_region(z: &BigradedGroup, region: &ThinRegion, evidence: Option<&FilteredEvidence>) -> HypothesisReport {
    let mut first = None;
    for i1 in region.i1..=region.i2 {
        for &s in &region.s_values {
            let r = check_main_theorem(z, &region.with_start(i1), s, evidence);
            if r.verdict {
                return r;
            }
            first.get_or_insert(r);
        }
    }
    first.expect("a region has at least one s")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCheck {
    pub passed: bool,
    /// Torsion coefficients other than 2 inside the region.
    pub offending: Vec<(i32, i32, u64)>,
}

/// Every torsion coefficient of H^{i,*} for i in the region equals 2.
pub fn verify_verdict(z: &BigradedGroup, region: &ThinRegion) -> VerdictCheck {
    let offending: Vec<(i32, i32, u64)> = z
        .iter()
        .filter(|((i, _), _)| region.contains(*i))
        .flat_map(|((i, j), e)| e.torsion.iter().filter(|&&t| t != 2).map(move |&t| (i, j, t)))
        .collect();
    VerdictCheck {
        passed: offending.is_empty(),
        offending,
    }
}

/// Ranks of induced maps needed by the lemma checks, keyed by source bigrading.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedRanks {
    pub d_t_star: BTreeMap<Bigrading, usize>,
    pub d_l_star: BTreeMap<Bigrading, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    /// Torsion off the lower diagonal at some i in (i₁, i₂].
    pub lower_diagonal: Condition,
    /// rk d_T* differs between the two diagonals at some i in [i₁, i₂).
    pub turner_rank: Condition,
    /// rk d_T* = rk d_L* = ℓ_{i+1} fails; `None` when the hypotheses of that lemma fail.
    pub turner_lee_torsion: Option<Condition>,
    pub ell_start_zero: bool,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.lower_diagonal.holds
            && self.turner_rank.holds
            && self.turner_lee_torsion.as_ref().is_none_or(|c| c.holds)
            && self.ell_start_zero
    }
}

/// Verifies the lemmas about thin regions from computed ranks.
pub fn lemma_rank_checks(z: &BigradedGroup, report: &HypothesisReport, ranks: &InducedRanks) -> LemmaReport {
    let (i1, i2, s) = (report.i1, report.i2, report.s);
    let lower_diagonal = Condition::from_witnesses(
        z.iter()
            .filter(|((i, j), e)| *i > i1 && *i <= i2 && !e.torsion.is_empty() && *j != 2 * i - s - 1)
            .map(|(k, _)| k)
            .collect(),
    );
    let rk = |m: &BTreeMap<Bigrading, usize>, i: i32, j: i32| m.get(&(i, j)).copied().unwrap_or(0);
    let turner_rank = Condition::from_witnesses(
        (i1..i2)
            .filter(|&i| rk(&ranks.d_t_star, i, 2 * i - s - 1) != rk(&ranks.d_t_star, i, 2 * i - s + 1))
            .map(|i| (i, 2 * i - s - 1))
            .collect(),
    );
    let lemma_applies = report.thin.holds
        && report.torsion_free_start.holds
        && (report.vanishing_below.holds || report.stronger.as_ref().is_some_and(|c| c.holds));
    let turner_lee_torsion = lemma_applies.then(|| {
        Condition::from_witnesses(
            (i1..i2)
                .filter(|&i| {
                    let j = 2 * i - s - 1;
                    let ell = z.p_torsion_count(2, i + 1, 2 * (i + 1) - s - 1);
                    rk(&ranks.d_t_star, i, j) != ell || rk(&ranks.d_l_star, i, j) != ell
                })
                .map(|i| (i, 2 * i - s - 1))
                .collect(),
        )
    });
    LemmaReport {
        lower_diagonal,
        turner_rank,
        turner_lee_torsion,
        ell_start_zero: z.p_torsion_count(2, i1, 2 * i1 - s - 1) == 0 || !report.torsion_free_start.holds,
    }
}

/// Everything known about one region of a link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionOutcome {
    pub region: ThinRegion,
    pub report: HypothesisReport,
    /// Present when the verdict is positive.
    pub verified: Option<VerdictCheck>,
    pub lemmas: Option<LemmaReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinAnalysis {
    pub profile: DiagonalProfile,
    pub thick_gradings: Vec<i32>,
    pub regions: Vec<RegionOutcome>,
}

impl ThinAnalysis {
    /// A positive verdict was never contradicted by the integral table, and every lemma check passed.
    pub fn sound(&self) -> bool {
        self.regions.iter().all(|r| {
            r.verified.as_ref().is_none_or(|v| v.passed) && r.lemmas.as_ref().is_none_or(LemmaReport::passed)
        })
    }

    pub fn any_positive(&self) -> bool {
        self.regions.iter().any(|r| r.report.verdict)
    }
}

/// Lee pages over ℚ, ℤ₃ and each odd torsion prime, and Turner pages over ℤ₂.
pub fn filtered_evidence(d: &PlanarDiagram, z: &BigradedGroup) -> Result<FilteredEvidence, SpectralError> {
    let mut rings = vec![RingTag::Rationals, RingTag::ModP(3)];
    for p in z.torsion_primes() {
        let tag = RingTag::mod_p(p)?;
        if p != 2 && !rings.contains(&tag) {
            rings.push(tag);
        }
    }
    let (lee, turner) = rayon::join(
        || {
            rings
                .into_par_iter()
                .map(|r| sequence_pages(d, FrobeniusTheory::Lee, r))
                .collect::<Result<Vec<_>, _>>()
        },
        || sequence_pages(d, FrobeniusTheory::Turner, RingTag::ModP(2)),
    );
    Ok(FilteredEvidence { lee: lee?, turner: turner? })
}

/// Ranks of d_T* (over ℤ₂) and d_L* (over ℚ) for the lemma checks.
pub fn induced_ranks(d: &PlanarDiagram) -> Result<InducedRanks, SpectralError> {
    let (d_t, d_l) = rayon::join(
        || -> Result<_, SpectralError> {
            let two = CubeComplex::build(d, FrobeniusTheory::Khovanov, RingTag::ModP(2))?;
            let basis = HomologyBasis::mod_p(&two, 2)?;
            Ok(d_t_star(&two, &basis)?.ranks())
        },
        || -> Result<_, SpectralError> {
            let q = CubeComplex::build(d, FrobeniusTheory::Khovanov, RingTag::Rationals)?;
            Ok(d_l_star(&q, &HomologyBasis::rational(&q))?.ranks())
        },
    );
    Ok(InducedRanks {
        d_t_star: d_t?,
        d_l_star: d_l?,
    })
}

/// Runs the region search, hypothesis checks and verdict verification for a
/// link whose integral homology is `z`. Lemma checks need induced maps and run
/// only when `lemmas` is set.
pub fn analyze(d: &PlanarDiagram, z: &BigradedGroup, lemmas: bool) -> Result<ThinAnalysis, SpectralError> {
    analyze_with(d, z, lemmas, None)
}

/// As [`analyze`], reusing already computed Lee/Turner pages.
pub fn analyze_with(
    d: &PlanarDiagram,
    z: &BigradedGroup,
    lemmas: bool,
    evidence: Option<FilteredEvidence>,
) -> Result<ThinAnalysis, SpectralError> {
    let profile = support_diagonals(z);
    let regions = find_thin_regions_for(&profile, z);
    let mut evidence = evidence;
    let mut ranks: Option<InducedRanks> = None;
    let mut out = Vec::new();
    for region in regions {
        let needs_pages = (region.i1..=region.i2).any(|i1| {
            region.s_values.iter().any(|&s| {
                let r = check_main_theorem(z, &region.with_start(i1), s, None);
                !r.verdict && !r.vanishing_below.holds && r.thin.holds && r.torsion_free_start.holds
            })
        });
        if needs_pages && evidence.is_none() {
            evidence = Some(filtered_evidence(d, z)?);
        }
        let report = best_sub_region(z, &region, evidence.as_ref());
        let verified = report.verdict.then(|| verify_verdict(z, &region.with_start(report.i1)));
        let lemma = if lemmas && report.verdict {
            if ranks.is_none() {
                ranks = Some(induced_ranks(d)?);
            }
            Some(lemma_rank_checks(z, &report, ranks.as_ref().expect("just set")))
        } else {
            None
        };
        out.push(RegionOutcome {
            region,
            report,
            verified,
            lemmas: lemma,
        });
    }
    Ok(ThinAnalysis {
        thick_gradings: profile.thick_gradings(),
        profile,
        regions: out,
    })
}
