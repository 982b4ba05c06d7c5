//! Property tests over random small instances.

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::Rng;

use slotting_core::annealer::assignment_energy;
use slotting_core::exact::{count_lower_bound_log10, count_solutions_exact, enumerate_feasible};
use slotting_core::model::{check_feasible, objective_lambda, Assignment, Instance, MatchingMatrix, Pallet, Shelf};
use slotting_core::qubo::{build_qubo, default_weights, encode_assignment, qubo_energy, SlackMode};
use slotting_core::rng::seeded;
use slotting_core::PenaltyWeights;

fn random_instance(seed: u64, n: usize, m: usize, max_cap: u64, max_cost: u64, max_pre: usize) -> Instance {
    let mut rng = seeded(seed);
    let lower: Vec<Vec<f64>> = (0..n).map(|a| (0..a).map(|_| rng.gen::<f64>()).collect()).collect();
    let shelves = (0..m)
        .map(|_| Shelf {
            remaining_capacity: rng.gen_range(0..=max_cap),
            pre_affinity: (0..rng.gen_range(0..=max_pre)).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect(),
        })
        .collect();
    let pallets = (0..n).map(|_| Pallet { cost: rng.gen_range(0..=max_cost) }).collect();
    Instance::new(shelves, pallets, MatchingMatrix::from_lower_triangle(&lower).unwrap()).unwrap()
}

fn instance_and_assignment() -> impl Strategy<Value = (Instance, Assignment)> {
    (any::<u64>(), 0usize..7, 1usize..4).prop_flat_map(|(seed, n, m)| {
        let inst = random_instance(seed, n, m, 4, 2, 2);
        (Just(inst), prop::collection::vec(0..m, n).prop_map(Assignment::new))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objective_is_nonnegative_and_permutation_covariant(
        (inst, a) in instance_and_assignment(),
        perm_seed in any::<u64>(),
    ) {
        let value = objective_lambda(&inst, &a).unwrap();
        prop_assert!(value >= 0.0);

        let n = inst.num_pallets();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = seeded(perm_seed);
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        // new pallet k is old pallet perm[k]
        let rows: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| inst.matching().get(perm[a], perm[b])).collect()).collect();
        let shelves = inst.shelves().iter().map(|s| Shelf {
            remaining_capacity: s.remaining_capacity,
            pre_affinity: s.pre_affinity.iter().map(|row| (0..n).map(|k| row[perm[k]]).collect()).collect(),
        }).collect();
        let pallets = (0..n).map(|k| inst.pallets()[perm[k]]).collect();
        let permuted = Instance::new(shelves, pallets, MatchingMatrix::from_rows(&rows).unwrap()).unwrap();
        let moved = Assignment::new((0..n).map(|k| a.shelf_of[perm[k]]).collect());
        prop_assert!((objective_lambda(&permuted, &moved).unwrap() - value).abs() < 1e-9);
    }

    #[test]
    fn objective_monotone_in_co_located_lambda((inst, a) in instance_and_assignment(), bump in 0.01f64..0.5) {
        let n = inst.num_pallets();
        prop_assume!(n >= 2);
        let base = objective_lambda(&inst, &a).unwrap();
        let (x, y) = (1, 0);
        let mut rows: Vec<Vec<f64>> = inst.matching().rows().map(|r| r.to_vec()).collect();
        let old = rows[x][y];
        let new = if old + bump <= 1.0 { old + bump } else { old - bump };
        rows[x][y] = new;
        rows[y][x] = new;
        let changed = Instance::new(inst.shelves().to_vec(), inst.pallets().to_vec(), MatchingMatrix::from_rows(&rows).unwrap()).unwrap();
        let value = objective_lambda(&changed, &a).unwrap();
        if a.shelf_of[x] == a.shelf_of[y] {
            prop_assert!((value - base - (new - old)).abs() < 1e-9);
        } else {
            prop_assert_eq!(value, base);
        }
    }

    #[test]
    fn overflow_zero_iff_capacity_holds((inst, a) in instance_and_assignment()) {
        let report = check_feasible(&inst, &a).unwrap();
        for (m, status) in report.shelves.iter().enumerate() {
            let load: u64 = (0..inst.num_pallets()).filter(|&p| a.shelf_of[p] == m).map(|p| inst.cost(p)).sum();
            prop_assert_eq!(status.load, load);
            prop_assert_eq!(status.overflow == 0, load <= inst.capacity(m));
        }
    }

    #[test]
    fn feasible_assignments_pay_only_the_objective((inst, a) in instance_and_assignment()) {
        prop_assume!(check_feasible(&inst, &a).unwrap().is_feasible());
        let w = PenaltyWeights::new(3.0, 1.7, 4.0).unwrap();
        for mode in [SlackMode::Bounded, SlackMode::PureBinary] {
            let model = build_qubo(&inst, w, mode);
            let bits = encode_assignment(&inst, &a, &model).unwrap();
            let e = qubo_energy(&model, &bits).unwrap();
            prop_assert!((e - 1.7 * objective_lambda(&inst, &a).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn encoded_energy_equals_assignment_energy((inst, a) in instance_and_assignment()) {
        let w = default_weights(&inst);
        let model = build_qubo(&inst, w, SlackMode::Bounded);
        let bits = encode_assignment(&inst, &a, &model).unwrap();
        let e = qubo_energy(&model, &bits).unwrap();
        prop_assert!((e - assignment_energy(&inst, w, &a).unwrap()).abs() <= 1e-9 * e.abs().max(1.0));
    }

    #[test]
    fn unconstrained_count_is_m_to_the_n(m in 1usize..6, n in 0u64..9, slack in 0u64..3) {
        let caps: Vec<u64> = (0..m).map(|k| n + (k as u64 % (slack + 1))).collect();
        prop_assert_eq!(count_solutions_exact(&caps, n), BigUint::from(m).pow(n as u32));
    }

    #[test]
    fn exact_count_matches_enumeration(caps in prop::collection::vec(0u64..4, 0..5), n in 0usize..7) {
        let inst = Instance::new(
            caps.iter().map(|&r| Shelf::empty(r)).collect(),
            vec![Pallet::unit(); n],
            MatchingMatrix::zeros(n),
        ).unwrap();
        let enumerated = enumerate_feasible(&inst).unwrap().count();
        prop_assert_eq!(count_solutions_exact(&caps, n as u64), BigUint::from(enumerated));
    }

    #[test]
    fn balanced_term_bounds_exact_count(caps in prop::collection::vec(1u64..6, 1..6), n in 0u64..12) {
        if let Ok(lb) = count_lower_bound_log10(&caps, n) {
            let exact = count_solutions_exact(&caps, n);
            let log10_exact = exact.to_string().len() as f64 - 1.0
                + (exact.to_string().chars().take(15).collect::<String>().parse::<f64>().unwrap()).log10()
                - (exact.to_string().len().min(15) as f64 - 1.0);
            prop_assert!(log10_exact >= lb.log10 - 1e-9);
        }
    }
}
