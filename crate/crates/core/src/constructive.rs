//! Construction of an equilibrium whose max-cost is within a factor `n` of
//! the max-cost optimum on symmetric games.
//!
//! Starting from a max-cost optimum `s*` with costs scaled so that
//! `cost_sc(s*) = n`, improvement dynamics reach an equilibrium `s`. While
//! some agent `i` pays more than `n`, agent `i` is replaced by an augmenting
//! path of the network spanned by `s*` and `s_{-i}`, and the dynamics resume.
//! Every round strictly lowers the potential, so the loop terminates.
//!
//! On series-parallel graphs no equilibrium agent pays more than the
//! optimal sum-cost, so rounds only happen on other graphs.

use num_traits::{One, Zero};

use crate::dynamics::{run_dynamics, DeviationPolicy, DynamicsTrace, DEFAULT_STEP_CAP};
use crate::error::{Error, Result};
use crate::flow::{augment, decompose, residual_bfs, Flow, ResidualArc};
use crate::game::{
    agent_costs, is_feasible, max_cost, potential, potential_of_loads, sum_cost, GameInstance,
    StrategyProfile,
};
use crate::graph::Path;
use crate::rational::{format_rational, int, Cost, Rational};

/// One replacement round. Costs and potentials are in the caller's units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OuterIteration {
    pub equilibrium_potential: Rational,
    pub equilibrium_max_cost: Rational,
    /// Lowest-index agent paying the max-cost.
    pub removed_agent: usize,
    pub augmenting_path: Vec<ResidualArc>,
    /// Sum of base costs over the forward arcs of the augmenting path.
    pub path_cost: Rational,
    pub recombined: StrategyProfile,
    pub recombined_potential: Rational,
    pub dynamics: DynamicsTrace,
}

impl OuterIteration {
    pub fn used_backward_arcs(&self) -> bool {
        self.augmenting_path.iter().any(|arc| !arc.forward)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructiveOutcome {
    pub equilibrium: StrategyProfile,
    pub max_cost: Rational,
    /// Factor applied to every cost internally.
    pub scale: Rational,
    pub initial: DynamicsTrace,
    pub iterations: Vec<OuterIteration>,
}

impl ConstructiveOutcome {
    /// Potentials of the successive equilibria, in the caller's units.
    pub fn equilibrium_potentials(&self) -> Vec<Rational> {
        std::iter::once(self.initial.terminal_potential().clone())
            .chain(self.iterations.iter().map(|it| it.dynamics.terminal_potential().clone()))
            .map(|p| p / &self.scale)
            .collect()
    }
}

fn assertion(msg: String) -> Error {
    Error::InternalAssertion(msg)
}

fn finite_max_cost(instance: &GameInstance, profile: &StrategyProfile) -> Result<Rational> {
    max_cost(instance, profile)
        .into_finite()
        .ok_or_else(|| assertion("feasible profile with infinite max-cost".into()))
}

/// One replacement step, in units where `cost_sc(star) = n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replacement {
    pub potential_before: Rational,
    pub max_cost_before: Rational,
    pub removed_agent: usize,
    pub augmenting_path: Vec<ResidualArc>,
    pub path_cost: Rational,
    pub recombined: StrategyProfile,
    pub recombined_potential: Rational,
}

/// Removes the lowest-index agent paying the max-cost of `current` and
/// reinserts one unit along an augmenting path of the network spanned by
/// `star` and the remaining agents, with capacities `max(x*, x_{-i})`.
///
/// Requires a symmetric game, `cost_sc(star) = n` and
/// `cost_mc(current) > n`; `current` need not be an equilibrium.
pub fn replacement_round(
    instance: &GameInstance,
    star: &StrategyProfile,
    current: &StrategyProfile,
) -> Result<Replacement> {
    if !instance.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let graph = instance.graph();
    let (s, t) = (graph.source(), graph.sink());
    let agents = instance.agent_count();
    let n = int(agents as i64);
    for profile in [star, current] {
        if profile.agent_count() != agents {
            return Err(Error::InvalidProfile(format!(
                "profile has {} agents, game has {agents}",
                profile.agent_count()
            )));
        }
        for path in profile.paths() {
            graph.check_path(path, s, t)?;
        }
        if profile.loads().len() != graph.edge_count() || !is_feasible(instance, profile) {
            return Err(Error::InfeasibleProfile);
        }
    }
    if sum_cost(instance, star) != Cost::Finite(n.clone()) {
        return Err(Error::ParameterViolation("reference profile must have sum-cost n".into()));
    }
    let mc = finite_max_cost(instance, current)?;
    if mc <= n {
        return Err(Error::ParameterViolation("no agent pays more than n".into()));
    }

    let phi = potential(instance, current)?;
    let removed = agent_costs(instance, current)
        .iter()
        .position(|c| c.finite() == Some(&mc))
        .expect("max-cost is attained");
    let without = current.loads_without(removed);
    let phi_without = potential_of_loads(instance, &without)
        .ok_or_else(|| assertion("partial profile overloads an edge".into()))?;
    if phi_without != &phi - &mc {
        return Err(assertion(format!(
            "removing agent {removed} lowers the potential by {}, not by its cost {}",
            format_rational(&(&phi - &phi_without)),
            format_rational(&mc)
        )));
    }

    let star_loads = star.loads();
    let arcs = residual_bfs(graph, s, t, |arc| {
        let (x_star, x_part) = (star_loads[arc.edge.0], without[arc.edge.0]);
        if arc.forward {
            x_part < x_star.max(x_part)
        } else {
            x_part > 0
        }
    })
    .ok_or_else(|| assertion("no augmenting path in the combined network".into()))?;

    let mut path_cost = Rational::zero();
    for arc in arcs.iter().filter(|a| a.forward) {
        if star_loads[arc.edge.0] == 0 {
            return Err(assertion(format!("augmenting path uses {} outside the reference", arc.edge)));
        }
        path_cost += instance.base_cost(arc.edge);
    }
    if path_cost > n {
        return Err(assertion(format!(
            "augmenting path costs {} > {}",
            format_rational(&path_cost),
            format_rational(&n)
        )));
    }

    let recombined = if arcs.iter().all(|a| a.forward) {
        current.with_path(removed, arcs.iter().map(|a| a.edge).collect())
    } else {
        let mut flow = Flow { values: without, value: (agents - 1) as u32 };
        augment(&mut flow, &arcs);
        let paths: Vec<Path> = decompose(graph, &flow, s, t)?;
        StrategyProfile::new(instance, paths)?
    };
    if !is_feasible(instance, &recombined) {
        return Err(assertion("recombined profile is infeasible".into()));
    }
    let recombined_potential = potential(instance, &recombined)?;
    if recombined_potential > &phi_without + &path_cost {
        return Err(assertion(format!(
            "recombination raised the potential by more than the path cost {}",
            format_rational(&path_cost)
        )));
    }
    if recombined_potential >= phi {
        return Err(assertion("recombination did not lower the potential".into()));
    }
    Ok(Replacement {
        potential_before: phi,
        max_cost_before: mc,
        removed_agent: removed,
        augmenting_path: arcs,
        path_cost,
        recombined,
        recombined_potential,
    })
}

/// Runs the replacement procedure from `optimum_mc`. Every inequality the
/// argument relies on is checked exactly and reported as an
/// `InternalAssertion` when violated.
pub fn constructive_min_maxcost_ne(
    instance: &GameInstance,
    optimum_mc: &StrategyProfile,
    policy: &DeviationPolicy,
) -> Result<ConstructiveOutcome> {
    if !instance.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let graph = instance.graph();
    let (s, t) = (graph.source(), graph.sink());
    let agents = instance.agent_count();
    if optimum_mc.agent_count() != agents {
        return Err(Error::InvalidProfile(format!(
            "profile has {} agents, game has {agents}",
            optimum_mc.agent_count()
        )));
    }
    for path in optimum_mc.paths() {
        graph.check_path(path, s, t)?;
    }
    if optimum_mc.loads().len() != graph.edge_count() || !is_feasible(instance, optimum_mc) {
        return Err(Error::InfeasibleProfile);
    }

    let n = int(agents as i64);
    let opt_sc = sum_cost(instance, optimum_mc)
        .into_finite()
        .ok_or(Error::InfeasibleProfile)?;
    let opt_mc = finite_max_cost(instance, optimum_mc)?;
    let scale = if opt_sc.is_zero() { Rational::one() } else { &n / &opt_sc };
    let scaled = instance.scaled(&scale);
    let unscale = |v: &Rational| v / &scale;

    let initial = run_dynamics(&scaled, optimum_mc, policy, DEFAULT_STEP_CAP)?;
    let mut current = initial.terminal.clone();
    let mut iterations = Vec::new();
    loop {
        let mc = finite_max_cost(&scaled, &current)?;
        if mc <= n || agents == 0 {
            break;
        }
        if iterations.len() >= DEFAULT_STEP_CAP {
            return Err(Error::StepCapExceeded(DEFAULT_STEP_CAP));
        }
        let round = replacement_round(&scaled, optimum_mc, &current)?;
        let dynamics = run_dynamics(&scaled, &round.recombined, policy, DEFAULT_STEP_CAP)?;
        if dynamics.terminal_potential() >= &round.potential_before {
            return Err(assertion("next equilibrium has no lower potential".into()));
        }
        current = dynamics.terminal.clone();
        iterations.push(OuterIteration {
            equilibrium_potential: unscale(&round.potential_before),
            equilibrium_max_cost: unscale(&round.max_cost_before),
            removed_agent: round.removed_agent,
            augmenting_path: round.augmenting_path,
            path_cost: unscale(&round.path_cost),
            recombined: round.recombined,
            recombined_potential: unscale(&round.recombined_potential),
            dynamics,
        });
    }

    let max_cost = finite_max_cost(instance, &current)?;
    if max_cost > &n * &opt_mc {
        return Err(assertion(format!(
            "equilibrium max-cost {} exceeds n times the optimum {}",
            format_rational(&max_cost),
            format_rational(&opt_mc)
        )));
    }
    Ok(ConstructiveOutcome { equilibrium: current, max_cost, scale, initial, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{all_nash, optimal_profile, Criterion, EnumerationLimits};
    use crate::game::is_nash;
    use crate::graph::EdgeId;
    use crate::instances::{fig3_parallel, two_link};
    use crate::rational::ratio;

    #[test]
    fn two_link_lands_on_cheap_edge() {
        let g = two_link(3);
        let limits = EnumerationLimits::default();
        let opt = optimal_profile(&g, Criterion::MaxCost, limits).unwrap();
        assert_eq!(opt.value, ratio(1, 3));
        // Oracle: some equilibrium meets the bound.
        let ne = all_nash(&g, limits).unwrap();
        assert!(ne.members.iter().any(|m| m.max_cost <= int(1)));
        let out = constructive_min_maxcost_ne(&g, &opt.profile, &DeviationPolicy::default()).unwrap();
        assert!(is_nash(&g, &out.equilibrium));
        assert!(out.max_cost <= int(1));
        assert!(out.iterations.is_empty());
    }

    #[test]
    fn expensive_equilibrium_is_replaced() {
        // Start from the all-expensive equilibrium: its sum-cost is already
        // n, and its max-cost 1 is n times the optimum 1/n.
        let g = two_link(2);
        let start = StrategyProfile::new(&g, vec![vec![EdgeId(1)]; 2]).unwrap();
        let out = constructive_min_maxcost_ne(&g, &start, &DeviationPolicy::default()).unwrap();
        assert!(out.max_cost <= int(2));
        assert_eq!(out.scale, int(1));
        assert!(out.iterations.is_empty());
    }

    #[test]
    fn fig3_bound() {
        let g = fig3_parallel(3, ratio(1, 1000)).unwrap();
        let opt = optimal_profile(&g, Criterion::MaxCost, EnumerationLimits::default()).unwrap();
        let out = constructive_min_maxcost_ne(&g, &opt.profile, &DeviationPolicy::default()).unwrap();
        assert!(is_nash(&g, &out.equilibrium));
        assert!(out.max_cost <= int(3) * opt.value);
        let potentials = out.equilibrium_potentials();
        assert!(potentials.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn rejects_asymmetric() {
        use crate::instances::{random_asymmetric, RandomDagParams};
        let g = random_asymmetric(&RandomDagParams { seed: 3, agents: 2, ..Default::default() }).unwrap();
        let opt = optimal_profile(&g, Criterion::MaxCost, EnumerationLimits::default()).unwrap();
        assert_eq!(
            constructive_min_maxcost_ne(&g, &opt.profile, &DeviationPolicy::default()),
            Err(Error::NotSymmetric)
        );
    }
}
