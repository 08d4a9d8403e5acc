//! Seeded property tests against brute-force oracles.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use csglab::analysis::{compute_ratios, enumerate_profiles, EnumerationLimits};
use csglab::constructive::{constructive_min_maxcost_ne, replacement_round};
use csglab::document::InstanceDocument;
use csglab::dynamics::{best_response, run_dynamics, BestResponse, DeviationPolicy, DEFAULT_STEP_CAP};
use csglab::extension::feasible_extension;
use csglab::flow::max_flow;
use csglab::game::{agent_cost, is_feasible, is_nash, max_cost, potential, sum_cost, StrategyProfile};
use csglab::graph::{classify, DEFAULT_PATH_CAP};
use csglab::instances::{random_asymmetric, random_sp, RandomDagParams, RandomSpParams};
use csglab::rational::{int, ratio};
use csglab::suite::brute_force_extensions;
use csglab::{Cost, GameInstance};

fn sp(seed: u64, agents: usize) -> GameInstance {
    random_sp(&RandomSpParams { seed, agents, ..Default::default() }).unwrap()
}

fn dag(seed: u64, agents: usize) -> GameInstance {
    random_asymmetric(&RandomDagParams { seed, agents, ..Default::default() }).unwrap()
}

fn profiles(g: &GameInstance) -> Vec<StrategyProfile> {
    enumerate_profiles(g, EnumerationLimits::default()).unwrap()
}

/// Nash by definition: no agent has a feasible unilateral move that is
/// strictly cheaper.
fn nash_oracle(g: &GameInstance, p: &StrategyProfile) -> bool {
    let strategies = g.agent_paths(DEFAULT_PATH_CAP).unwrap();
    (0..g.agent_count()).all(|j| {
        let current = agent_cost(g, p, j);
        strategies[j].iter().all(|path| {
            let q = p.with_path(j, path.clone());
            !is_feasible(g, &q) || agent_cost(g, &q, j) >= current
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sp_generator_yields_series_parallel_dags(seed in any::<u64>(), agents in 1usize..=3) {
        let g = sp(seed, agents);
        prop_assert!(classify(g.graph()).is_series_parallel());
        prop_assert!(!g.graph().has_cycle());
    }

    #[test]
    fn max_flow_ignores_edge_order(seed in any::<u64>(), shuffle in any::<u64>()) {
        let g = if seed % 2 == 0 { sp(seed, 2) } else { dag(seed, 2) };
        let graph = g.graph();
        let mut order: Vec<usize> = (0..graph.edge_count()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let permuted = graph.permute_edges(&order).unwrap();
        let caps = g.capacities();
        let permuted_caps: Vec<u32> = order.iter().map(|&i| caps[i]).collect();
        let a = max_flow(graph, &caps, graph.source(), graph.sink());
        let b = max_flow(&permuted, &permuted_caps, permuted.source(), permuted.sink());
        prop_assert_eq!(a.value, b.value);
    }

    #[test]
    fn nash_check_matches_definition(seed in any::<u64>(), agents in 1usize..=3, pick in any::<u64>()) {
        let g = if seed % 2 == 0 { sp(seed, agents) } else { dag(seed, agents.max(2)) };
        let all = profiles(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        for _ in 0..8 {
            let p = all.choose(&mut rng).unwrap();
            prop_assert_eq!(is_nash(&g, p), nash_oracle(&g, p));
        }
    }

    #[test]
    fn best_response_is_cheapest_feasible_move(seed in any::<u64>(), pick in any::<u64>()) {
        let g = sp(seed, 3);
        let all = profiles(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let p = all.choose(&mut rng).unwrap();
        let j = rng.gen_range(0..3);
        let current = agent_cost(&g, p, j);
        let cheapest = g.agent_paths(DEFAULT_PATH_CAP).unwrap()[j]
            .iter()
            .map(|path| p.with_path(j, path.clone()))
            .filter(|q| is_feasible(&g, q))
            .map(|q| agent_cost(&g, &q, j))
            .min()
            .unwrap();
        match best_response(&g, p, j).unwrap() {
            BestResponse::Unchanged => prop_assert_eq!(cheapest, current),
            BestResponse::Improve { path, cost } => {
                prop_assert!(Cost::Finite(cost.clone()) < current);
                prop_assert_eq!(Cost::Finite(cost.clone()), cheapest);
                let q = p.with_path(j, path);
                prop_assert!(is_feasible(&g, &q));
                prop_assert_eq!(agent_cost(&g, &q, j), Cost::Finite(cost));
            }
        }
    }

    #[test]
    fn dynamics_reach_equilibria(seed in any::<u64>(), agents in 1usize..=3, pick in any::<u64>()) {
        let g = if seed % 2 == 0 { sp(seed, agents) } else { dag(seed, agents.max(2)) };
        let all = profiles(&g);
        let start = all.choose(&mut ChaCha8Rng::seed_from_u64(pick)).unwrap();
        let trace = run_dynamics(&g, start, &DeviationPolicy::default(), DEFAULT_STEP_CAP).unwrap();
        prop_assert!(nash_oracle(&g, &trace.terminal));
        prop_assert!(trace.step_count() <= all.len());
        prop_assert!(trace.terminal_potential() <= &trace.start_potential);
        prop_assert_eq!(potential(&g, &trace.terminal).unwrap(), trace.terminal_potential().clone());
    }

    #[test]
    fn extension_of_a_subprofile(seed in any::<u64>(), agents in 2usize..=3, pick in any::<u64>()) {
        let g = sp(seed, agents);
        let all = profiles(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let big = all.choose(&mut rng).unwrap();
        let dropped = rng.gen_range(0..agents);
        let rest = big.paths().iter().enumerate().filter(|(i, _)| *i != dropped).map(|(_, p)| p.clone()).collect();
        let small = StrategyProfile::from_st_paths(g.graph(), rest).unwrap();
        let oracle = brute_force_extensions(&g, big, &small).unwrap();
        prop_assert!(oracle.contains(big.path(dropped)));
        let path = feasible_extension(&g, big, &small).unwrap();
        prop_assert!(oracle.contains(&path));
    }

    #[test]
    fn ratios_are_scale_free(seed in any::<u64>(), agents in 1usize..=3) {
        let g = sp(seed, agents);
        let limits = EnumerationLimits::default();
        let a = compute_ratios(&g, limits).unwrap();
        let b = compute_ratios(&g.scaled(&ratio(7, 3)), limits).unwrap();
        prop_assert_eq!(a.poa_sc, b.poa_sc);
        prop_assert_eq!(a.poa_mc, b.poa_mc);
        prop_assert_eq!(a.pos_sc, b.pos_sc);
        prop_assert_eq!(a.pos_mc, b.pos_mc);
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>(), agents in 1usize..=3) {
        for g in [sp(seed, agents), dag(seed, agents)] {
            let doc = InstanceDocument::from_instance(&g, None);
            let text = doc.to_json();
            let back = InstanceDocument::parse(&text).unwrap();
            prop_assert_eq!(back.to_json(), text);
            prop_assert_eq!(back.to_instance().unwrap(), g);
        }
    }

    /// The bound holds from any feasible start, not only a max-cost optimum.
    #[test]
    fn constructive_from_any_start(seed in any::<u64>(), agents in 2usize..=3, pick in any::<u64>()) {
        let g = sp(seed, agents);
        let all = profiles(&g);
        let start = all.choose(&mut ChaCha8Rng::seed_from_u64(pick)).unwrap();
        let out = constructive_min_maxcost_ne(&g, start, &DeviationPolicy::default()).unwrap();
        prop_assert!(is_nash(&g, &out.equilibrium));
        let bound = int(agents as i64) * max_cost(&g, start).into_finite().unwrap();
        prop_assert!(out.max_cost <= bound);
        let potentials = out.equilibrium_potentials();
        prop_assert!(potentials.windows(2).all(|w| w[1] < w[0]));
        for round in &out.iterations {
            for arc in &round.augmenting_path {
                if arc.forward {
                    prop_assert!(start.load(arc.edge) > 0);
                }
            }
        }
    }
}

/// Symmetric game on the graph of a random DAG instance, or `None` when
/// the capacities cannot carry all agents.
fn symmetric_dag(seed: u64, agents: usize) -> Option<GameInstance> {
    let a = dag(seed, agents);
    GameInstance::symmetric(a.graph().clone(), a.schemes().to_vec(), agents).ok()
}

/// Checks one replacement step from `current` against the reference `star`,
/// after scaling so that `cost_sc(star) = n`. Returns whether backward arcs
/// were used, or `None` if no agent of `current` pays more than `n`.
fn check_round(g: &GameInstance, star: &StrategyProfile, current: &StrategyProfile) -> Option<bool> {
    let n = int(g.agent_count() as i64);
    let sc = sum_cost(g, star).into_finite().unwrap();
    if sc == int(0) {
        return None;
    }
    let scaled = g.scaled(&(&n / &sc));
    if max_cost(&scaled, current).into_finite().unwrap() <= n {
        return None;
    }
    let round = replacement_round(&scaled, star, current).unwrap();
    let without = current.loads_without(round.removed_agent);
    for arc in &round.augmenting_path {
        if arc.forward {
            assert!(star.load(arc.edge) > without[arc.edge.0]);
        } else {
            assert!(without[arc.edge.0] > 0);
        }
    }
    assert!(round.path_cost <= n);
    assert!(is_feasible(&scaled, &round.recombined));
    assert!(round.recombined_potential < round.potential_before);
    let removed_cost = agent_cost(&scaled, current, round.removed_agent).into_finite().unwrap();
    assert_eq!(removed_cost, round.max_cost_before);
    assert!(round.recombined_potential <= &round.potential_before - &removed_cost + &n);
    Some(round.augmenting_path.iter().any(|a| !a.forward))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replacement_round_lowers_potential(seed in any::<u64>(), agents in 2usize..=3, pick in any::<u64>()) {
        let g = if seed % 2 == 0 { Some(sp(seed, agents)) } else { symmetric_dag(seed, agents) };
        let Some(g) = g else { return Ok(()) };
        let all = profiles(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        for _ in 0..10 {
            let star = all.choose(&mut rng).unwrap();
            let current = all.choose(&mut rng).unwrap();
            check_round(&g, star, current);
        }
    }
}

/// Over a fixed sample, replacement steps occur both with and without
/// backward arcs.
#[test]
fn replacement_round_uses_both_arc_kinds() {
    let (mut forward_only, mut with_backward) = (0, 0);
    for seed in 0..200u64 {
        let g = if seed % 2 == 0 { Some(sp(seed, 3)) } else { symmetric_dag(seed, 2) };
        let Some(g) = g else { continue };
        let all = profiles(&g);
        for star in all.iter().take(20) {
            for current in all.iter().take(20) {
                match check_round(&g, star, current) {
                    Some(true) => with_backward += 1,
                    Some(false) => forward_only += 1,
                    None => {}
                }
            }
        }
    }
    assert!(forward_only > 0, "no forward-only step in the sample");
    assert!(with_backward > 0, "no step with backward arcs in the sample");
}
