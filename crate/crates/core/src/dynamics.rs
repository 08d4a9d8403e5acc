//! Best responses and improvement dynamics.
//!
//! Only strict improvements are executed, so the potential drops at every
//! step and the dynamics stop at a pure Nash equilibrium.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{agent_cost, is_feasible, potential, GameInstance, StrategyProfile};
use crate::graph::{enumerate_st_paths, EdgeId, Path, DEFAULT_PATH_CAP};
use crate::rational::{format_rational, Cost, Rational};

pub const DEFAULT_STEP_CAP: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BestResponse {
    /// No path is strictly cheaper than the current one.
    Unchanged,
    Improve { path: Path, cost: Rational },
}

/// Price agent `agent` would pay on `edge` after switching, given the other
/// agents stay put. `None` means the edge cannot take the agent.
fn deviation_weight<'a>(
    instance: &'a GameInstance,
    profile: &StrategyProfile,
    on_path: &[bool],
    edge: EdgeId,
) -> Option<&'a Rational> {
    let load = profile.load(edge);
    let scheme = instance.scheme(edge);
    if on_path[edge.0] {
        scheme.share(load)
    } else if load < scheme.capacity() {
        scheme.share(load + 1)
    } else {
        None
    }
}

fn membership(instance: &GameInstance, path: &[EdgeId]) -> Vec<bool> {
    let mut on_path = vec![false; instance.graph().edge_count()];
    for e in path {
        on_path[e.0] = true;
    }
    on_path
}

/// Cost agent `agent` would pay on `candidate` with everyone else fixed.
pub fn deviation_cost(
    instance: &GameInstance,
    profile: &StrategyProfile,
    agent: usize,
    candidate: &[EdgeId],
) -> Cost {
    let on_path = membership(instance, profile.path(agent));
    candidate.iter().fold(Cost::zero(), |acc, &e| {
        match deviation_weight(instance, profile, &on_path, e) {
            Some(w) => acc + w,
            None => Cost::Infinite,
        }
    })
}

/// Cheapest feasible path for `agent` against the others' strategies.
///
/// Dijkstra over exact rationals; the unsettled node with the smallest label
/// and lowest index is settled first and labels only change on strict
/// improvement, scanning edges in id order.
pub fn best_response(
    instance: &GameInstance,
    profile: &StrategyProfile,
    agent: usize,
) -> Result<BestResponse> {
    let graph = instance.graph();
    let terminals = instance.agents()[agent];
    let on_path = membership(instance, profile.path(agent));

    let mut dist: Vec<Option<Rational>> = vec![None; graph.node_count()];
    let mut via: Vec<Option<EdgeId>> = vec![None; graph.node_count()];
    let mut settled = vec![false; graph.node_count()];
    dist[terminals.source.0] = Some(Rational::zero());

    loop {
        let next = graph
            .nodes()
            .filter(|v| !settled[v.0])
            .filter_map(|v| dist[v.0].as_ref().map(|d| (d, v)))
            .min_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(&b.1)))
            .map(|(_, v)| v);
        let Some(node) = next else { break };
        settled[node.0] = true;
        if node == terminals.sink {
            break;
        }
        let here = dist[node.0].clone().expect("settled nodes carry a label");
        for &e in graph.out_edges(node) {
            let head = graph.edge(e).head;
            if settled[head.0] {
                continue;
            }
            let Some(w) = deviation_weight(instance, profile, &on_path, e) else {
                continue;
            };
            let candidate = &here + w;
            if dist[head.0].as_ref().map_or(true, |d| candidate < *d) {
                dist[head.0] = Some(candidate);
                via[head.0] = Some(e);
            }
        }
    }

    let Some(best) = dist[terminals.sink.0].clone() else {
        return Err(Error::NoFeasiblePath(agent));
    };
    let current = agent_cost(instance, profile, agent);
    if Cost::Finite(best.clone()) >= current {
        return Ok(BestResponse::Unchanged);
    }
    let mut path = Vec::new();
    let mut at = terminals.sink;
    while at != terminals.source {
        let e = via[at.0].expect("reached nodes have a predecessor edge");
        path.push(e);
        at = graph.edge(e).tail;
    }
    path.reverse();
    Ok(BestResponse::Improve { path, cost: best })
}

/// First strictly improving path in lexicographic order of edge ids.
fn first_improving(
    instance: &GameInstance,
    profile: &StrategyProfile,
    agent: usize,
    strategies: &[Path],
) -> Option<(Path, Rational)> {
    let current = agent_cost(instance, profile, agent);
    strategies.iter().find_map(|candidate| {
        match deviation_cost(instance, profile, agent, candidate) {
            Cost::Finite(c) if Cost::Finite(c.clone()) < current => Some((candidate.clone(), c)),
            _ => None,
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AgentOrder {
    RoundRobin,
    /// Fixed permutation of agent indices, repeated every round.
    Fixed(Vec<usize>),
    /// A fresh seeded shuffle every round.
    Seeded(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImprovementRule {
    BestResponse,
    FirstImproving,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationPolicy {
    pub order: AgentOrder,
    pub rule: ImprovementRule,
}

impl Default for DeviationPolicy {
    fn default() -> Self {
        DeviationPolicy { order: AgentOrder::RoundRobin, rule: ImprovementRule::BestResponse }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicsStep {
    pub agent: usize,
    pub old_path: Path,
    pub new_path: Path,
    pub old_cost: Rational,
    pub new_cost: Rational,
    pub potential_after: Rational,
}

impl DynamicsStep {
    /// `new_cost - old_cost`, always negative.
    pub fn cost_delta(&self) -> Rational {
        &self.new_cost - &self.old_cost
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicsTrace {
    pub start: StrategyProfile,
    pub start_potential: Rational,
    pub steps: Vec<DynamicsStep>,
    pub terminal: StrategyProfile,
}

impl DynamicsTrace {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn terminal_potential(&self) -> &Rational {
        self.steps
            .last()
            .map_or(&self.start_potential, |s| &s.potential_after)
    }
}

/// Runs improvement dynamics from `start` until no agent can strictly
/// improve. Every step is checked against the exact potential identity
/// `Phi(before) - Phi(after) = p_j(before) - p_j(after)`.
pub fn run_dynamics(
    instance: &GameInstance,
    start: &StrategyProfile,
    policy: &DeviationPolicy,
    step_cap: usize,
) -> Result<DynamicsTrace> {
    if !is_feasible(instance, start) {
        return Err(Error::InfeasibleProfile);
    }
    let n = instance.agent_count();
    let mut rng = match policy.order {
        AgentOrder::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut order: Vec<usize> = match &policy.order {
        AgentOrder::Fixed(perm) => {
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return Err(Error::ParameterViolation(format!(
                    "agent order {perm:?} is not a permutation of 0..{n}"
                )));
            }
            perm.clone()
        }
        _ => (0..n).collect(),
    };
    let strategies: Vec<Vec<Path>> = match policy.rule {
        ImprovementRule::FirstImproving => instance
            .agents()
            .iter()
            .map(|t| enumerate_st_paths(instance.graph(), t.source, t.sink, DEFAULT_PATH_CAP))
            .collect::<Result<_>>()?,
        ImprovementRule::BestResponse => Vec::new(),
    };

    let start_potential = potential(instance, start)?;
    let mut profile = start.clone();
    let mut current_potential = start_potential.clone();
    let mut steps = Vec::new();
    loop {
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let mut moved = false;
        for &agent in &order {
            let improvement = match policy.rule {
                ImprovementRule::BestResponse => match best_response(instance, &profile, agent)? {
                    BestResponse::Improve { path, cost } => Some((path, cost)),
                    BestResponse::Unchanged => None,
                },
                ImprovementRule::FirstImproving => {
                    first_improving(instance, &profile, agent, &strategies[agent])
                }
            };
            let Some((new_path, new_cost)) = improvement else { continue };
            let old_cost = agent_cost(instance, &profile, agent)
                .into_finite()
                .ok_or_else(|| Error::InternalAssertion("feasible profile with infinite cost".into()))?;
            let next = profile.with_path(agent, new_path.clone());
            let next_potential = potential(instance, &next)?;
            if &current_potential - &next_potential != &old_cost - &new_cost {
                return Err(Error::InternalAssertion(format!(
                    "potential change {} differs from cost change {} for agent {agent}",
                    format_rational(&(&current_potential - &next_potential)),
                    format_rational(&(&old_cost - &new_cost)),
                )));
            }
            steps.push(DynamicsStep {
                agent,
                old_path: profile.path(agent).clone(),
                new_path,
                old_cost,
                new_cost,
                potential_after: next_potential.clone(),
            });
            if steps.len() > step_cap {
                return Err(Error::StepCapExceeded(step_cap));
            }
            profile = next;
            current_potential = next_potential;
            moved = true;
        }
        if !moved {
            break;
        }
    }
    Ok(DynamicsTrace { start: start.clone(), start_potential, steps, terminal: profile })
}
