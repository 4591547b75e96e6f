//! Property-based invariants: the closed-form Ramanujan sum must agree
//! with its defining divisor sum, and the cache text format must round
//! trip arbitrary tables.

use ideal_moments::cache;
use ideal_moments::ideals::CoefficientTable;
use ideal_moments::moments::sample_ideals;
use ideal_moments::NumberField;
use ideal_moments::arith::{ramanujan_sum, ramanujan_sum_divisor};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_divisor_sum(seed in 0u64..10_000, d in prop_oneof![Just(-1i64), Just(5), Just(-7)]) {
        let field = NumberField::quadratic(d).unwrap();
        let ideals = sample_ideals(&field, 2, 400, seed).unwrap();
        let (modulus, arg) = (&ideals[0], &ideals[1]);
        prop_assert_eq!(
            ramanujan_sum(modulus, arg).unwrap(),
            ramanujan_sum_divisor(modulus, arg).unwrap()
        );
    }

    #[test]
    fn cache_text_round_trips(values in prop::collection::vec(any::<i64>(), 1..80)) {
        let mut padded = vec![0i128];
        padded.extend(values.iter().map(|&v| v as i128));
        let table = CoefficientTable::from_values(
            "Q(sqrt{-1})".to_string(),
            "a_K".to_string(),
            padded,
        );
        let parsed = cache::parse(&cache::render(&table)).unwrap();
        prop_assert_eq!(parsed, table);
    }
}
