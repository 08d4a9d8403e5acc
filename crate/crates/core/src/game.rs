//! Game instances, strategy profiles, agent and social costs, the potential
//! function and the equilibrium test.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::dynamics::{best_response, BestResponse};
use crate::error::{Error, Result};
use crate::flow::max_flow;
use crate::graph::{enumerate_st_paths, EdgeId, Graph, NodeId, Path, DEFAULT_PATH_CAP};
use crate::rational::{Cost, Rational};
use crate::scheme::CostSharingScheme;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Terminals {
    pub source: NodeId,
    pub sink: NodeId,
}

/// A capacitated cost-sharing connection game. Construction certifies that
/// at least one feasible strategy profile exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameInstance {
    graph: Graph,
    schemes: Vec<CostSharingScheme>,
    agents: Vec<Terminals>,
}

impl GameInstance {
    /// Symmetric game: `agents` players all routing from the graph's source
    /// to its sink.
    pub fn symmetric(graph: Graph, schemes: Vec<CostSharingScheme>, agents: usize) -> Result<Self> {
        let terminals = Terminals { source: graph.source(), sink: graph.sink() };
        Self::new(graph, schemes, vec![terminals; agents])
    }

    pub fn new(graph: Graph, schemes: Vec<CostSharingScheme>, agents: Vec<Terminals>) -> Result<Self> {
        if schemes.len() != graph.edge_count() {
            return Err(Error::InvalidInstance(format!(
                "{} schemes for {} edges",
                schemes.len(),
                graph.edge_count()
            )));
        }
        for scheme in &schemes {
            let violations = scheme.validate();
            if !violations.is_empty() {
                return Err(Error::SchemeViolation(violations));
            }
        }
        for t in &agents {
            if t.source.0 >= graph.node_count() || t.sink.0 >= graph.node_count() {
                return Err(Error::InvalidInstance("agent terminal out of range".into()));
            }
        }
        let instance = GameInstance { graph, schemes, agents };
        if !instance.has_feasible_profile()? {
            return Err(Error::InfeasibleGame);
        }
        Ok(instance)
    }

    /// Symmetric games are certified by a max-flow of at least `n`; others
    /// by a depth-first search over path assignments.
    fn has_feasible_profile(&self) -> Result<bool> {
        if self.is_symmetric() {
            let flow = max_flow(&self.graph, &self.capacities(), self.graph.source(), self.graph.sink());
            return Ok(flow.value as usize >= self.agents.len());
        }
        let paths = self.agent_paths(DEFAULT_PATH_CAP)?;
        Ok(first_feasible_assignment(self, &paths).is_some())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn schemes(&self) -> &[CostSharingScheme] {
        &self.schemes
    }

    pub fn scheme(&self, edge: EdgeId) -> &CostSharingScheme {
        &self.schemes[edge.0]
    }

    pub fn agents(&self) -> &[Terminals] {
        &self.agents
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn capacity(&self, edge: EdgeId) -> u32 {
        self.schemes[edge.0].capacity()
    }

    pub fn capacities(&self) -> Vec<u32> {
        self.schemes.iter().map(CostSharingScheme::capacity).collect()
    }

    pub fn base_cost(&self, edge: EdgeId) -> &Rational {
        self.schemes[edge.0].base_cost()
    }

    pub fn is_symmetric(&self) -> bool {
        self.agents
            .iter()
            .all(|t| t.source == self.graph.source() && t.sink == self.graph.sink())
    }

    /// Strategy sets: the simple paths of each agent, lexicographically.
    pub fn agent_paths(&self, cap: usize) -> Result<Vec<Vec<Path>>> {
        if self.is_symmetric() {
            let paths = enumerate_st_paths(&self.graph, self.graph.source(), self.graph.sink(), cap)?;
            return Ok(vec![paths; self.agents.len()]);
        }
        self.agents
            .iter()
            .map(|t| enumerate_st_paths(&self.graph, t.source, t.sink, cap))
            .collect()
    }

    /// The same game with every cost and share multiplied by `factor > 0`.
    pub fn scaled(&self, factor: &Rational) -> GameInstance {
        GameInstance {
            graph: self.graph.clone(),
            schemes: self.schemes.iter().map(|s| s.scaled(factor)).collect(),
            agents: self.agents.clone(),
        }
    }
}

/// Depth-first search for one path per agent such that no edge exceeds its
/// capacity; returns the first assignment in lexicographic order.
pub(crate) fn first_feasible_assignment(
    instance: &GameInstance,
    paths: &[Vec<Path>],
) -> Option<Vec<Path>> {
    fn go(
        agent: usize,
        paths: &[Vec<Path>],
        caps: &[u32],
        loads: &mut [u32],
        chosen: &mut Vec<Path>,
    ) -> bool {
        if agent == paths.len() {
            return true;
        }
        for path in &paths[agent] {
            if path.iter().all(|e| loads[e.0] < caps[e.0]) {
                path.iter().for_each(|e| loads[e.0] += 1);
                chosen.push(path.clone());
                if go(agent + 1, paths, caps, loads, chosen) {
                    return true;
                }
                chosen.pop();
                path.iter().for_each(|e| loads[e.0] -= 1);
            }
        }
        false
    }
    let caps = instance.capacities();
    let mut loads = vec![0; caps.len()];
    let mut chosen = Vec::with_capacity(paths.len());
    go(0, paths, &caps, &mut loads, &mut chosen).then_some(chosen)
}

/// One path per agent plus the induced edge loads.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyProfile {
    paths: Vec<Path>,
    loads: Vec<u32>,
}

impl StrategyProfile {
    /// Validates one simple path per agent between that agent's terminals.
    pub fn new(instance: &GameInstance, paths: Vec<Path>) -> Result<Self> {
        if paths.len() != instance.agent_count() {
            return Err(Error::InvalidProfile(format!(
                "{} paths for {} agents",
                paths.len(),
                instance.agent_count()
            )));
        }
        for (path, t) in paths.iter().zip(instance.agents()) {
            instance.graph().check_path(path, t.source, t.sink)?;
        }
        Ok(Self::from_paths_unchecked(instance.graph().edge_count(), paths))
    }

    /// A profile of any number of source-to-sink paths on `graph`'s
    /// designated terminals.
    pub fn from_st_paths(graph: &Graph, paths: Vec<Path>) -> Result<Self> {
        for path in &paths {
            graph.check_path(path, graph.source(), graph.sink())?;
        }
        Ok(Self::from_paths_unchecked(graph.edge_count(), paths))
    }

    pub(crate) fn from_paths_unchecked(edge_count: usize, paths: Vec<Path>) -> Self {
        let loads = loads_of(edge_count, paths.iter());
        StrategyProfile { paths, loads }
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn path(&self, agent: usize) -> &Path {
        &self.paths[agent]
    }

    pub fn agent_count(&self) -> usize {
        self.paths.len()
    }

    /// `x_e` for every edge.
    pub fn loads(&self) -> &[u32] {
        &self.loads
    }

    pub fn load(&self, edge: EdgeId) -> u32 {
        self.loads[edge.0]
    }

    /// Edges used by at least one agent.
    pub fn used_edges(&self) -> BTreeSet<EdgeId> {
        self.paths.iter().flatten().copied().collect()
    }

    /// The profile after `agent` switches to `path`.
    pub fn with_path(&self, agent: usize, path: Path) -> StrategyProfile {
        let mut loads = self.loads.clone();
        for e in &self.paths[agent] {
            loads[e.0] -= 1;
        }
        for e in &path {
            loads[e.0] += 1;
        }
        let mut paths = self.paths.clone();
        paths[agent] = path;
        StrategyProfile { paths, loads }
    }

    /// Loads with `agent` removed.
    pub fn loads_without(&self, agent: usize) -> Vec<u32> {
        let mut loads = self.loads.clone();
        for e in &self.paths[agent] {
            loads[e.0] -= 1;
        }
        loads
    }

    /// Paths sorted, i.e. the profile up to a permutation of agents.
    pub fn canonical_multiset(&self) -> Vec<Path> {
        let mut paths = self.paths.clone();
        paths.sort();
        paths
    }
}

pub fn loads_of<'a>(edge_count: usize, paths: impl Iterator<Item = &'a Path>) -> Vec<u32> {
    let mut loads = vec![0u32; edge_count];
    for path in paths {
        for e in path {
            loads[e.0] += 1;
        }
    }
    loads
}

pub fn is_feasible(instance: &GameInstance, profile: &StrategyProfile) -> bool {
    loads_within_capacity(instance, profile.loads())
}

pub fn loads_within_capacity(instance: &GameInstance, loads: &[u32]) -> bool {
    loads
        .iter()
        .enumerate()
        .all(|(e, &x)| x <= instance.capacity(EdgeId(e)))
}

/// `p_j(s)`: the sum of shares on agent `j`'s path, or infinite if any of its
/// edges is loaded beyond capacity.
pub fn agent_cost(instance: &GameInstance, profile: &StrategyProfile, agent: usize) -> Cost {
    let mut total = Rational::zero();
    for &e in profile.path(agent) {
        match instance.scheme(e).share(profile.load(e)) {
            Some(share) => total += share,
            None => return Cost::Infinite,
        }
    }
    Cost::Finite(total)
}

pub fn agent_costs(instance: &GameInstance, profile: &StrategyProfile) -> Vec<Cost> {
    (0..profile.agent_count())
        .map(|j| agent_cost(instance, profile, j))
        .collect()
}

pub fn sum_cost(instance: &GameInstance, profile: &StrategyProfile) -> Cost {
    agent_costs(instance, profile)
        .into_iter()
        .fold(Cost::zero(), |acc, c| acc + c)
}

/// Maximum agent cost; zero for a profile without agents.
pub fn max_cost(instance: &GameInstance, profile: &StrategyProfile) -> Cost {
    agent_costs(instance, profile)
        .into_iter()
        .max()
        .unwrap_or_else(Cost::zero)
}

/// Rosenthal-style potential `sum_e sum_{x=1}^{x_e} f_e(x)`.
pub fn potential(instance: &GameInstance, profile: &StrategyProfile) -> Result<Rational> {
    potential_of_loads(instance, profile.loads()).ok_or(Error::InfeasibleProfile)
}

/// Potential of an arbitrary load vector (e.g. a partial profile); `None`
/// when a load exceeds capacity.
pub fn potential_of_loads(instance: &GameInstance, loads: &[u32]) -> Option<Rational> {
    let mut total = Rational::zero();
    for (e, &x) in loads.iter().enumerate() {
        total += instance.schemes[e].partial_sum(x)?;
    }
    Some(total)
}

/// Witness that a profile is not an equilibrium.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    pub agent: usize,
    pub path: Path,
    pub old_cost: Cost,
    pub new_cost: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NashCheck {
    Nash,
    Deviation(Deviation),
}

impl NashCheck {
    pub fn is_nash(&self) -> bool {
        matches!(self, NashCheck::Nash)
    }
}

/// Pure Nash test by best response for each agent in index order; reports
/// the first strictly improving deviation found.
pub fn check_nash(instance: &GameInstance, profile: &StrategyProfile) -> NashCheck {
    for agent in 0..profile.agent_count() {
        if let Ok(BestResponse::Improve { path, cost }) = best_response(instance, profile, agent) {
            return NashCheck::Deviation(Deviation {
                agent,
                path,
                old_cost: agent_cost(instance, profile, agent),
                new_cost: cost,
            });
        }
    }
    NashCheck::Nash
}

pub fn is_nash(instance: &GameInstance, profile: &StrategyProfile) -> bool {
    check_nash(instance, profile).is_nash()
}
