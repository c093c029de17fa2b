use fibgrowth_core::mealy::decompose;
use fibgrowth_core::quotients::trace_empirical;
use fibgrowth_core::rewrite::{is_normal_shape, nf_length, normalize, normalize_indices, reduce, symbolic_decompose, RuleSet};
use fibgrowth_core::words::{Evaluator, GeneratorWord};
use num_bigint::BigUint;
use proptest::prelude::*;

fn letters() -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('s'), Just('f')], 1..40).prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normal_form_has_the_same_action(word in letters()) {
        let w = GeneratorWord::letters(&word).unwrap();
        let nf = normalize(&w).unwrap();
        let mut ev = Evaluator::new(10).unwrap();
        prop_assert_eq!(ev.table(&w), ev.table(&nf.to_generator_word()));
        prop_assert!(nf_length(&nf) <= BigUint::from(word.len()));
        prop_assert!(is_normal_shape(nf.indices()));
    }

    #[test]
    fn normalizing_twice_changes_nothing(word in letters()) {
        let nf = normalize(&GeneratorWord::letters(&word).unwrap()).unwrap();
        prop_assert_eq!(normalize_indices(&nf.word()).unwrap(), nf.clone());
        prop_assert_eq!(reduce(&nf.word(), RuleSet::Complete).unwrap(), nf.word());
    }

    #[test]
    fn indexed_words_normalize_consistently(idx in proptest::collection::vec(1u32..=9, 1..8)) {
        let nf = normalize_indices(&idx).unwrap();
        let mut ev = Evaluator::new(9).unwrap();
        prop_assert_eq!(ev.indexed_table(&idx), ev.indexed_table(&nf.word()));
    }

    #[test]
    fn symbolic_decomposition_reconstructs(word in letters()) {
        let nf = normalize(&GeneratorWord::letters(&word).unwrap()).unwrap();
        prop_assume!(nf.maximal_index().is_some());
        let d = symbolic_decompose(&nf).unwrap();
        let mut ev = Evaluator::new(8).unwrap();
        prop_assert_eq!(d.reconstruct_table(8).unwrap(), ev.table(&nf.to_generator_word()));
        let direct = decompose(&GeneratorWord::letters(&word).unwrap().to_letters()).unwrap();
        prop_assert_eq!(direct.letter_map, d.letter_map);
    }

    #[test]
    fn empirical_traces_do_not_increase(word in letters()) {
        let t = trace_empirical(&GeneratorWord::letters(&word).unwrap(), 0..=10).unwrap();
        prop_assert!(t.windows(2).all(|p| p[1] <= p[0]));
    }
}
