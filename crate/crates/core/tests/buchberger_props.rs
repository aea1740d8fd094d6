use gbperf::buchberger::{run, run_with, RunConfig, Strategy as Selection};
use gbperf::idealgen::*;
use gbperf::poly::*;
use gbperf::rng::seeded;
use proptest::prelude::*;

fn sample(n: usize, d: u32, s: usize, mode: SamplingMode, seed: u64) -> Vec<Polynomial> {
    sample_binomial_system(&BinomialDistSpec::new(n, d, s, mode), &mut seeded(seed)).unwrap()
}

fn spec_params() -> impl Strategy<Value = (usize, u32, usize, SamplingMode, u64)> {
    (
        2usize..=4,
        2u32..=6,
        1usize..=5,
        prop_oneof![Just(SamplingMode::Uniform), Just(SamplingMode::Weighted)],
        any::<u64>(),
    )
}

fn all_s_pairs_reduce_to_zero(gb: &[Polynomial]) -> bool {
    (0..gb.len()).all(|i| {
        (i + 1..gb.len()).all(|j| {
            normal_form(&s_polynomial(&gb[i], &gb[j]).unwrap(), gb)
                .remainder
                .is_zero()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn output_is_a_groebner_basis_of_the_input((n, d, s, mode, seed) in spec_params()) {
        let gens = sample(n, d, s, mode, seed);
        let (gb, stats) = run(&gens, Selection::Degree, MonomialOrder::Grevlex).unwrap();
        prop_assume!(gb.len() <= 12);
        prop_assert!(all_s_pairs_reduce_to_zero(&gb));
        for g in &gens {
            prop_assert!(normal_form(g, &gb).remainder.is_zero());
        }
        prop_assert_eq!(stats.pairs_processed, stats.zero_reductions + stats.nonzero_reductions);
        prop_assert!(stats.gb_size >= 1);
        prop_assert_eq!(stats.gb_size, gb.len() as u64);
        prop_assert!(stats.polynomial_additions >= stats.pairs_processed);
    }

    #[test]
    fn every_strategy_finds_the_same_reduced_basis((n, d, s, mode, seed) in spec_params()) {
        let gens = sample(n, d, s, mode, seed);
        let (reference, _) = run(&gens, Selection::First, MonomialOrder::Grevlex).unwrap();
        for strategy in Selection::ALL {
            let (gb, _) = run(&gens, strategy, MonomialOrder::Grevlex).unwrap();
            prop_assert_eq!(&gb, &reference, "strategy {}", strategy);
            let plain = RunConfig { pair_elimination: false, ..RunConfig::new(strategy, MonomialOrder::Grevlex) };
            let (gb, _) = run_with(&gens, &plain).unwrap();
            prop_assert_eq!(&gb, &reference, "strategy {} without pair elimination", strategy);
        }
    }

    #[test]
    fn runs_are_deterministic((n, d, s, mode, seed) in spec_params(), pick in 0usize..4) {
        let gens = sample(n, d, s, mode, seed);
        let strategy = Selection::ALL[pick];
        let a = run(&gens, strategy, MonomialOrder::Grevlex).unwrap();
        let b = run(&gens, strategy, MonomialOrder::Grevlex).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn elimination_order_bases_are_groebner((n, d, s, mode, seed) in spec_params(), k in 1usize..3) {
        let order = MonomialOrder::Elimination(k.min(n - 1));
        let gens: Vec<Polynomial> = sample(n, d, s, mode, seed).iter().map(|g| g.with_order(order)).collect();
        let (gb, _) = run(&gens, Selection::Sugar, order).unwrap();
        prop_assume!(gb.len() <= 12);
        prop_assert!(all_s_pairs_reduce_to_zero(&gb));
    }
}
