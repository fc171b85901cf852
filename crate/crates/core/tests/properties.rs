use fairpay_core::forge::{gen_random, RandomKind};
use fairpay_core::format::InstanceFile;
use fairpay_core::harness::{pond_ratio, MethodPair};
use fairpay_core::solvers::{brute_force, BruteForce};
use fairpay_core::{
    best_response_step, is_equilibrium, optimal_contract_for_set, AgentSet, Instance, Method,
    ModeSpec, SolveOptions,
};
use proptest::prelude::*;

fn random_instance() -> impl Strategy<Value = Instance> {
    (0usize..3, 1usize..=7, any::<u64>(), 0.1f64..0.95).prop_map(|(k, n, seed, margin)| {
        gen_random(RandomKind::ALL[k], n, seed, margin).expect("valid generator parameters")
    })
}

fn all_sets(n: usize) -> impl Iterator<Item = AgentSet> {
    (0..1u64 << n).map(AgentSet::from_mask)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modes_are_ordered(inst in random_instance(), beta in 1.0f64..50.0) {
        for set in all_sets(inst.n()) {
            let free = optimal_contract_for_set(&inst, &set, ModeSpec::Unconstrained).unwrap();
            let relaxed = optimal_contract_for_set(&inst, &set, ModeSpec::BetaNd { beta }).unwrap();
            let equal = optimal_contract_for_set(&inst, &set, ModeSpec::Nd).unwrap();
            prop_assert_eq!(free.feasible(), equal.feasible());
            if free.feasible() {
                prop_assert!(free.utility >= relaxed.utility - 1e-12);
                prop_assert!(relaxed.utility >= equal.utility - 1e-12);
            }
        }
    }

    #[test]
    fn beta_one_is_equal_pay(inst in random_instance()) {
        for set in all_sets(inst.n()) {
            let one = optimal_contract_for_set(&inst, &set, ModeSpec::BetaNd { beta: 1.0 }).unwrap();
            let equal = optimal_contract_for_set(&inst, &set, ModeSpec::Nd).unwrap();
            prop_assert_eq!(one, equal);
        }
    }

    #[test]
    fn relaxed_payments_respect_wage_ratio(inst in random_instance(), beta in 1.0f64..20.0) {
        for set in all_sets(inst.n()).filter(|s| !s.is_empty()) {
            let out = optimal_contract_for_set(&inst, &set, ModeSpec::BetaNd { beta }).unwrap();
            if !out.feasible() {
                continue;
            }
            let pays: Vec<f64> = set.iter().map(|i| out.payments.payments()[i]).collect();
            let hi = pays.iter().copied().fold(f64::MIN, f64::max);
            let lo = pays.iter().copied().fold(f64::MAX, f64::min);
            prop_assert!(hi <= beta * lo + 1e-9);
        }
    }

    #[test]
    fn utility_grows_with_beta(inst in random_instance(), b1 in 1.0f64..10.0, extra in 0.0f64..10.0) {
        let b2 = b1 + extra;
        for set in all_sets(inst.n()) {
            let lo = optimal_contract_for_set(&inst, &set, ModeSpec::BetaNd { beta: b1 }).unwrap();
            let hi = optimal_contract_for_set(&inst, &set, ModeSpec::BetaNd { beta: b2 }).unwrap();
            if lo.feasible() {
                prop_assert!(lo.utility <= hi.utility + 1e-12);
            }
        }
        let lo = brute_force(&inst, ModeSpec::BetaNd { beta: b1 }).unwrap().best.utility;
        let hi = brute_force(&inst, ModeSpec::BetaNd { beta: b2 }).unwrap().best.utility;
        prop_assert!(lo <= hi + 1e-12);
    }

    #[test]
    fn feasible_outcomes_are_equilibria(inst in random_instance(), beta in 1.0f64..20.0) {
        for spec in [ModeSpec::Unconstrained, ModeSpec::Nd, ModeSpec::BetaNd { beta }] {
            for set in all_sets(inst.n()) {
                let out = optimal_contract_for_set(&inst, &set, spec).unwrap();
                if out.feasible() {
                    prop_assert!(is_equilibrium(&inst, &out.payments, &set).unwrap());
                }
            }
        }
    }

    #[test]
    fn best_response_fixed_points_are_equilibria(inst in random_instance(), mask in any::<u64>()) {
        let n = inst.n();
        let set = AgentSet::from_mask(mask & ((1 << n) - 1));
        let out = optimal_contract_for_set(&inst, &set, ModeSpec::Nd).unwrap();
        let next = best_response_step(&inst, &out.payments, &set).unwrap();
        if next == set {
            prop_assert!(is_equilibrium(&inst, &out.payments, &set).unwrap());
        }
    }

    #[test]
    fn brute_force_ignores_worker_count(inst in random_instance(), workers in 1usize..9) {
        for spec in [ModeSpec::Unconstrained, ModeSpec::Nd, ModeSpec::BetaNd { beta: 3.0 }] {
            let one = brute_force(&inst, spec).unwrap();
            let many = BruteForce::with_workers(workers).solve(&inst, spec).unwrap();
            prop_assert_eq!(one, many);
        }
    }

    #[test]
    fn ratios_are_at_least_one(inst in random_instance(), beta in 1.0f64..20.0) {
        let r = pond_ratio(
            "p",
            &inst,
            ModeSpec::BetaNd { beta },
            MethodPair::both(Method::BruteForce),
            &SolveOptions::default(),
        )
        .unwrap();
        prop_assert!(r.opt.unwrap() >= r.opt_nd.unwrap() - 1e-9);
        if let Some(ratio) = r.ratio {
            prop_assert!(ratio >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn json_round_trip_preserves_solutions(inst in random_instance()) {
        let text = InstanceFile::from_instance(&inst).to_json();
        let back = InstanceFile::from_json(&text).unwrap().to_instance().unwrap();
        for spec in [ModeSpec::Unconstrained, ModeSpec::Nd, ModeSpec::BetaNd { beta: 2.5 }] {
            prop_assert_eq!(brute_force(&inst, spec).unwrap(), brute_force(&back, spec).unwrap());
        }
    }

    #[test]
    fn optimum_beats_every_singleton(inst in random_instance()) {
        let best = brute_force(&inst, ModeSpec::Unconstrained).unwrap().best.utility;
        for i in 0..inst.n() {
            let single = optimal_contract_for_set(&inst, &AgentSet::from_agents([i]), ModeSpec::Unconstrained)
                .unwrap();
            prop_assert!(single.utility > 0.0);
            prop_assert!(best >= single.utility);
        }
    }
}
