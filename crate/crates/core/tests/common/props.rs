//! Property checks shared by the property suites and the acceptance target.

#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use kh_core::braid::BraidWord;
use kh_core::complex::{CubeComplex, FrobeniusTheory, Part};
use kh_core::diagram::{braid_closure, SignConvention};
use kh_core::homology::{field_homology, integral_homology, jones_polynomial, les_consistency, mirror_duality_check, uct_check};
use kh_core::linalg::RingTag;
use kh_core::thin::support_diagonals;

use super::{kauffman_jones, DenseComplex};

/// Braid words on 2 to 4 strands with at most `max_len` letters.
pub fn words(max_len: usize) -> impl Strategy<Value = (usize, Vec<i32>)> {
    (2usize..=4).prop_flat_map(move |s| {
        let m = s as i32 - 1;
        let letter = (1..=m, any::<bool>()).prop_map(|(k, neg)| if neg { -k } else { k });
        (Just(s), proptest::collection::vec(letter, 0..=max_len))
    })
}

fn word(strands: usize, letters: &[i32]) -> BraidWord {
    BraidWord::new(strands, letters.to_vec()).expect("valid word")
}

fn cube(strands: usize, letters: &[i32], theory: FrobeniusTheory, ring: RingTag) -> CubeComplex {
    let d = braid_closure(&word(strands, letters), SignConvention::Standard);
    CubeComplex::build(&d, theory, ring).expect("cube")
}

/// `second ∘ first + first ∘ second` (or `first ∘ first` when equal), reduced mod `m` (0 = over ℤ).
fn composite_defects(c: &CubeComplex, first: Part, second: Part, m: i64) -> usize {
    let mut bad = 0;
    for g in 0..c.generator_count() {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        let pairs: &[(Part, Part)] = if first == second { &[(first, first)] } else { &[(first, second), (second, first)] };
        for &(a, b) in pairs {
            for (mid, c1) in c.component(g, a) {
                for (t, c2) in c.component(mid, b) {
                    *acc.entry(t).or_insert(0) += c1 * c2;
                }
            }
        }
        bad += acc.values().filter(|&&v| if m == 0 { v != 0 } else { v % m != 0 }).count();
    }
    bad
}

/// d² = 0 for every piece, and the pieces anticommute: Khovanov and Lee over ℤ,
/// Turner mod 2. The dense oracle complex squares to zero as well.
pub fn differential_identities(strands: usize, letters: &[i32]) -> Result<(), TestCaseError> {
    let c = cube(strands, letters, FrobeniusTheory::Khovanov, RingTag::Integers);
    prop_assert_eq!(composite_defects(&c, Part::Khovanov, Part::Khovanov, 0), 0, "d_K²");
    prop_assert_eq!(composite_defects(&c, Part::Lee, Part::Lee, 0), 0, "d_L²");
    prop_assert_eq!(composite_defects(&c, Part::Khovanov, Part::Lee, 0), 0, "d_K d_L + d_L d_K");
    prop_assert_eq!(composite_defects(&c, Part::Turner, Part::Turner, 2), 0, "d_T² mod 2");
    prop_assert_eq!(composite_defects(&c, Part::Khovanov, Part::Turner, 2), 0, "d_K d_T + d_T d_K mod 2");
    if letters.len() <= 6 {
        prop_assert!(DenseComplex::build(letters, strands).square_defects().is_empty(), "oracle d²");
    }
    Ok(())
}

pub fn jones_matches_bracket(strands: usize, letters: &[i32]) -> Result<(), TestCaseError> {
    let c = cube(strands, letters, FrobeniusTheory::Khovanov, RingTag::Integers);
    let h = integral_homology(&c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let ours: BTreeMap<i32, i64> = jones_polynomial(&h).terms().collect();
    prop_assert_eq!(ours, kauffman_jones(letters, strands));
    Ok(())
}

/// Integral tables against the dense oracle (small words only).
pub fn integral_matches_dense(strands: usize, letters: &[i32]) -> Result<(), TestCaseError> {
    let c = cube(strands, letters, FrobeniusTheory::Khovanov, RingTag::Integers);
    let h = integral_homology(&c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let ours: BTreeMap<(i32, i32), (usize, Vec<u64>)> = h
        .iter()
        .filter(|(_, e)| !e.is_zero())
        .map(|(k, e)| {
            let mut t = e.torsion.clone();
            t.sort_unstable();
            (k, (e.rank, t))
        })
        .collect();
    prop_assert_eq!(ours, DenseComplex::build(letters, strands).homology());
    Ok(())
}

/// Field tables over ℚ and ℤ_p agree with the universal coefficient prediction,
/// and the diagonal profile derived from ℤ agrees with direct field computations.
pub fn uct_consistency(strands: usize, letters: &[i32]) -> Result<(), TestCaseError> {
    let c = cube(strands, letters, FrobeniusTheory::Khovanov, RingTag::Integers);
    let h = integral_homology(&c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let mut direct: BTreeMap<i32, std::collections::BTreeSet<i32>> = BTreeMap::new();
    let mut fields = vec![RingTag::Rationals];
    for p in [2u64, 3, 5, 7].into_iter().chain(h.torsion_primes()) {
        fields.push(RingTag::mod_p(p).expect("prime"));
    }
    for f in fields {
        let t = field_homology(&c, f).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let report = uct_check(&h, &t);
        prop_assert!(report.passed(), "UCT over {}: {:?}", f, report.violations);
        for ((i, j), d) in t.iter() {
            if d > 0 {
                direct.entry(i).or_default().insert(2 * i - j);
            }
        }
    }
    prop_assert_eq!(support_diagonals(&h).diagonals, direct);
    Ok(())
}

pub fn mirror_duality(strands: usize, letters: &[i32]) -> Result<(), TestCaseError> {
    let w = word(strands, letters);
    for f in [RingTag::Rationals, RingTag::ModP(2), RingTag::ModP(3)] {
        let r = mirror_duality_check(&w, f, SignConvention::Standard).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(r.passed(), "mirror over {}: {:?}", f, r.violations);
    }
    Ok(())
}

/// Word with at least one letter and a chosen crossing.
pub fn word_and_crossing(max_len: usize) -> impl Strategy<Value = (usize, Vec<i32>, usize)> {
    words(max_len)
        .prop_filter("needs a crossing", |(_, l)| !l.is_empty())
        .prop_flat_map(|(s, l)| {
            let n = l.len();
            (Just(s), Just(l), 0..n)
        })
}

pub fn les_alternating_sums(strands: usize, letters: &[i32], crossing: usize) -> Result<(), TestCaseError> {
    let w = word(strands, letters);
    for f in [RingTag::Rationals, RingTag::ModP(2)] {
        let r = les_consistency(&w, crossing, f, SignConvention::Standard).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(r.passed(), "LES over {} at crossing {}: {:?}", f, crossing, r.failures);
    }
    Ok(())
}

/// Runs `check` on `cases` generated inputs; the error names the first failure.
pub fn run<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, check).map_err(|e| e.to_string())
}
