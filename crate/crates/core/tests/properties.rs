// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

use assigntc_core::gen::{
    generate, largest_remainder, Block, GeoDataset, LatLon, ModelConfig, PriceBound, Region, Tract, TypeStat,
    UtilityModel,
};
use assigntc_core::lottery::{draw_order, run_lottery, summarize, lottery_trials};
use assigntc_core::model::{check_feasible, welfare};
use assigntc_core::pod::{BoundMode, PodReport};
use assigntc_core::solvers::bcm::solve_bcm_brute_force;
use assigntc_core::solvers::{
    reduce_to_bcm, solve_block_uniform, solve_brute_force, solve_exact, solve_greedy, solve_type_uniform,
    solve_type_uniform_explicit, solve_unconstrained,
};
use assigntc_core::{ExtReal, Instance};
use proptest::prelude::*;

/// Random instance with `n, m <= max` and integer utilities in `0..10`.
fn instance(max_types: usize, max_blocks: usize, max_group: usize) -> impl Strategy<Value = Instance> {
    (
        prop::collection::vec(0..=max_group, 1..=max_types),
        prop::collection::vec(0..=max_group, 1..=max_blocks),
    )
        .prop_flat_map(|(types, blocks)| {
            let (n, m): (usize, usize) = (types.iter().sum(), blocks.iter().sum());
            let caps: Vec<BoxedStrategy<usize>> = types
                .iter()
                .flat_map(|_| blocks.iter().map(|&b| (0..=b).boxed()))
                .collect();
            (
                Just(types),
                Just(blocks),
                prop::collection::vec(0u8..10, n * m),
                caps,
            )
        })
        .prop_map(|(types, blocks, u, caps)| {
            Instance::new(types, blocks, u.into_iter().map(f64::from).collect(), caps).unwrap()
        })
}

/// Same shape, utilities depending only on (type, item).
fn type_uniform(max_group: usize) -> impl Strategy<Value = Instance> {
    instance(3, 3, max_group).prop_flat_map(|inst| {
        let (k, m) = (inst.k(), inst.m());
        (Just(inst), prop::collection::vec(0u8..10, k * m))
    })
    .prop_map(|(inst, table)| {
        let m = inst.m();
        let u = (0..inst.n())
            .flat_map(|i| {
                let p = inst.agent_type(i);
                table[p * m..(p + 1) * m].iter().map(|&x| f64::from(x)).collect::<Vec<_>>()
            })
            .collect();
        inst.with_utilities(u).unwrap()
    })
}

/// Same shape, utilities depending only on (agent, block).
fn block_uniform(max_group: usize) -> impl Strategy<Value = Instance> {
    instance(3, 3, max_group).prop_flat_map(|inst| {
        let (n, l) = (inst.n(), inst.l());
        (Just(inst), prop::collection::vec(0u8..10, n * l))
    })
    .prop_map(|(inst, table)| {
        let (m, l) = (inst.m(), inst.l());
        let u = (0..inst.n())
            .flat_map(|i| (0..m).map(|j| f64::from(table[i * l + inst.item_block(j)])).collect::<Vec<_>>())
            .collect();
        inst.with_utilities(u).unwrap()
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn solvers_agree_and_respect_capacities(inst in instance(3, 3, 2)) {
        let brute = solve_brute_force(&inst).unwrap();
        let exact = solve_exact(&inst).unwrap();
        let greedy = solve_greedy(&inst).unwrap();
        let unc = solve_unconstrained(&inst).unwrap();
        for r in [&brute, &exact, &greedy] {
            prop_assert!(r.verify(&inst).is_ok());
            prop_assert!(check_feasible(&inst, &r.assignment).unwrap().is_ok());
        }
        prop_assert_eq!(exact.objective, brute.objective);
        prop_assert!(greedy.objective <= exact.objective);
        prop_assert!(3.0 * greedy.objective >= exact.objective);
        prop_assert!(unc.objective >= exact.objective);
        prop_assert_eq!(unc.objective, welfare(&inst, &unc.assignment).unwrap());
    }

    #[test]
    fn type_uniform_flow_matches_exact(inst in type_uniform(4)) {
        let flow = solve_type_uniform(&inst).unwrap();
        let (explicit, _) = solve_type_uniform_explicit(&inst).unwrap();
        let exact = solve_exact(&inst).unwrap();
        prop_assert!(flow.verify(&inst).is_ok());
        prop_assert!(close(flow.objective, exact.objective));
        prop_assert!(close(flow.objective, explicit.objective));
    }

    #[test]
    fn block_uniform_flow_matches_exact(inst in block_uniform(4)) {
        let flow = solve_block_uniform(&inst).unwrap();
        let exact = solve_exact(&inst).unwrap();
        prop_assert!(flow.verify(&inst).is_ok());
        prop_assert!(close(flow.objective, exact.objective));
    }

    #[test]
    fn pod_respects_both_bounds(inst in instance(3, 3, 3)) {
        let unc = solve_unconstrained(&inst).unwrap();
        let con = solve_exact(&inst).unwrap();
        let r = PodReport::from_results(&inst, &unc, &con, BoundMode::Effective).unwrap();
        if let ExtReal::Finite(p) = r.pod {
            prop_assert!(p >= 1.0 - 1e-12);
        }
        prop_assert!(r.respects_bounds(1e-9), "{:?}", r);
        prop_assert!(r.bound_combined <= r.bound_thm4_effective);
    }

    #[test]
    fn lottery_is_feasible_and_below_optimum(inst in instance(3, 3, 3), seed in any::<u64>()) {
        let run = run_lottery(&inst, seed).unwrap();
        prop_assert!(check_feasible(&inst, &run.assignment).unwrap().is_ok());
        let opt_c = solve_exact(&inst).unwrap().objective;
        prop_assert!(run.welfare <= opt_c + 1e-9);
        prop_assert_eq!(run_lottery(&inst, seed).unwrap(), run);
        let mut order = draw_order(inst.n(), seed);
        order.sort_unstable();
        prop_assert_eq!(order, (0..inst.n()).collect::<Vec<_>>());
    }

    #[test]
    fn summary_ignores_record_order(inst in instance(2, 2, 3), seed in any::<u64>()) {
        let opt = solve_unconstrained(&inst).unwrap().objective;
        let records = lottery_trials(&inst, 7, seed, opt).unwrap();
        let mut reversed = records.clone();
        reversed.reverse();
        prop_assert_eq!(summarize(&records, seed, opt), summarize(&reversed, seed, opt));
    }

    #[test]
    fn bcm_reduction_preserves_the_optimum(inst in instance(2, 2, 2)) {
        let bcm = reduce_to_bcm(&inst);
        let (best, chosen) = solve_bcm_brute_force(&bcm);
        prop_assert!(bcm.is_feasible(&chosen));
        prop_assert_eq!(best, solve_brute_force(&inst).unwrap().objective);
    }

    #[test]
    fn largest_remainder_apportions_exactly(props in prop::collection::vec(0.01f64..1.0, 1..6), n in 0usize..5000) {
        let sizes = largest_remainder(&props, n);
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        let total: f64 = props.iter().sum();
        for (s, p) in sizes.iter().zip(&props) {
            prop_assert!((*s as f64 - p / total * n as f64).abs() < 1.0 + 1e-9);
        }
    }
}

fn toy_dataset() -> GeoDataset {
    let blocks = vec![
        Block { name: "a".into(), size: 4, loc: LatLon::new(1.30, 103.80) },
        Block { name: "b".into(), size: 3, loc: LatLon::new(1.35, 103.85) },
        Block { name: "c".into(), size: 5, loc: LatLon::new(1.40, 103.75) },
    ];
    let prices = (0..3)
        .flat_map(|q| {
            [
                PriceBound { category: "small".into(), block: q, lb: 900.0, ub: 1500.0 },
                PriceBound { category: "large".into(), block: q, lb: 1500.0, ub: 2600.0 },
            ]
        })
        .collect();
    GeoDataset {
        blocks,
        types: vec![
            TypeStat { name: "x".into(), proportion: 0.6, salary: 6000.0 },
            TypeStat { name: "y".into(), proportion: 0.4, salary: 4500.0 },
        ],
        regions: vec![
            Region { name: "r1".into(), centroid: LatLon::new(1.31, 103.81), population: vec![10.0, 1.0] },
            Region { name: "r2".into(), centroid: LatLon::new(1.41, 103.76), population: vec![1.0, 10.0] },
        ],
        prices,
        tracts: vec![
            Tract { id: "t1".into(), tier: 0, loc: LatLon::new(1.32, 103.79) },
            Tract { id: "t2".into(), tier: 1, loc: LatLon::new(1.38, 103.86) },
        ],
        ..Default::default()
    }
}

fn model(kind: u8, param: f64) -> UtilityModel {
    match kind {
        0 => UtilityModel::Dist { sigma2: param },
        1 => UtilityModel::Ethn { sigma2: param },
        2 => UtilityModel::Proj { rho_km: 1.0 + param },
        3 => UtilityModel::Price { sigma2: param },
        _ => UtilityModel::Chicago { sigma2: param, top_blocks: 2 },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_utilities_are_well_formed(kind in 0u8..5, param in 0.0f64..20.0, n in 1usize..20, seed in any::<u64>()) {
        let data = toy_dataset();
        let cfg = ModelConfig::new(model(kind, param), n, seed, vec![0.75, 0.5]);
        let inst = generate(&data, &cfg).unwrap();
        prop_assert_eq!((inst.n(), inst.m(), inst.k(), inst.l()), (n, 12, 2, 3));
        prop_assert!(inst.utilities().iter().all(|u| u.is_finite() && *u >= 0.0));
        prop_assert_eq!(generate(&data, &cfg).unwrap(), inst.clone());
        if matches!(kind, 0 | 1 | 4) {
            for i in 0..n {
                let s: f64 = inst.row(i).iter().sum();
                prop_assert!((s - 1.0).abs() <= 1e-9, "row {} sums to {}", i, s);
            }
        }
        if kind == 4 {
            for i in 0..n {
                let positive = (0..inst.l())
                    .filter(|&q| inst.items_of_block(q).any(|j| inst.utility(i, j) > 0.0))
                    .count();
                prop_assert!(positive <= 2);
            }
        }
        if kind == 1 && param == 0.0 {
            prop_assert!(inst.is_type_uniform());
        }
        if kind == 2 {
            prop_assert!(inst.is_block_uniform());
        }
    }
}
