mod common;

use common::props::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn differentials_square_to_zero_and_anticommute((s, l) in words(8)) {
        differential_identities(s, &l)?;
    }

    #[test]
    fn jones_equals_kauffman_bracket((s, l) in words(10)) {
        jones_matches_bracket(s, &l)?;
    }

    #[test]
    fn integral_tables_match_dense_snf((s, l) in words(6)) {
        integral_matches_dense(s, &l)?;
    }

    #[test]
    fn universal_coefficients_hold((s, l) in words(8)) {
        uct_consistency(s, &l)?;
    }

    #[test]
    fn mirror_reflects_tables((s, l) in words(8)) {
        mirror_duality(s, &l)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn long_exact_sequence_sums_vanish((s, l, k) in word_and_crossing(8)) {
        les_alternating_sums(s, &l, k)?;
    }
}
