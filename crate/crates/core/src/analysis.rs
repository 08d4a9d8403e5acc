//! Exhaustive analysis: feasible profiles, optima, the equilibrium set and
//! exact prices of anarchy and stability with their bound verdicts.
//!
//! Optima come from full enumeration. With general share tables the edge
//! total `x * f(x)` need not be convex, so flow-based shortcuts would be
//! unsound.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::game::{
    agent_costs, check_nash, max_cost, potential, sum_cost, GameInstance, StrategyProfile,
};
use crate::graph::{classify, GraphClass, Path, DEFAULT_PATH_CAP};
use crate::rational::{int, Cost, RatioValue, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    /// Simple paths per agent.
    pub path_cap: usize,
    /// Product of the agents' path counts.
    pub profile_cap: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { path_cap: DEFAULT_PATH_CAP, profile_cap: 1_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    SumCost,
    MaxCost,
}

pub fn social_cost(instance: &GameInstance, profile: &StrategyProfile, criterion: Criterion) -> Cost {
    match criterion {
        Criterion::SumCost => sum_cost(instance, profile),
        Criterion::MaxCost => max_cost(instance, profile),
    }
}

/// Every feasible profile, ordered lexicographically by the agents' path
/// indices.
pub fn enumerate_profiles(
    instance: &GameInstance,
    limits: EnumerationLimits,
) -> Result<Vec<StrategyProfile>> {
    let paths = instance.agent_paths(limits.path_cap)?;
    let product = paths
        .iter()
        .try_fold(1usize, |acc, p| acc.checked_mul(p.len()))
        .unwrap_or(usize::MAX);
    if product > limits.profile_cap {
        return Err(Error::PathExplosion { cap: limits.profile_cap, count: product });
    }

    fn go(
        agent: usize,
        paths: &[Vec<Path>],
        caps: &[u32],
        loads: &mut [u32],
        chosen: &mut Vec<Path>,
        edge_count: usize,
        out: &mut Vec<StrategyProfile>,
    ) {
        if agent == paths.len() {
            out.push(StrategyProfile::from_paths_unchecked(edge_count, chosen.clone()));
            return;
        }
        for path in &paths[agent] {
            if path.iter().all(|e| loads[e.0] < caps[e.0]) {
                path.iter().for_each(|e| loads[e.0] += 1);
                chosen.push(path.clone());
                go(agent + 1, paths, caps, loads, chosen, edge_count, out);
                chosen.pop();
                path.iter().for_each(|e| loads[e.0] -= 1);
            }
        }
    }

    let caps = instance.capacities();
    let edge_count = instance.graph().edge_count();
    let mut out = Vec::new();
    go(0, &paths, &caps, &mut vec![0; edge_count], &mut Vec::new(), edge_count, &mut out);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum {
    pub profile: StrategyProfile,
    pub value: Rational,
}

/// Minimizer of `criterion` over `profiles`; the first one wins ties.
pub fn optimum_among(
    instance: &GameInstance,
    profiles: &[StrategyProfile],
    criterion: Criterion,
) -> Option<Optimum> {
    let mut best: Option<Optimum> = None;
    for profile in profiles {
        let Cost::Finite(value) = social_cost(instance, profile, criterion) else { continue };
        if best.as_ref().map_or(true, |b| value < b.value) {
            best = Some(Optimum { profile: profile.clone(), value });
        }
    }
    best
}

pub fn optimal_profile(
    instance: &GameInstance,
    criterion: Criterion,
    limits: EnumerationLimits,
) -> Result<Optimum> {
    let profiles = enumerate_profiles(instance, limits)?;
    optimum_among(instance, &profiles, criterion).ok_or(Error::InfeasibleGame)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquilibriumSummary {
    pub profile: StrategyProfile,
    pub sum_cost: Rational,
    pub max_cost: Rational,
    pub potential: Rational,
}

impl EquilibriumSummary {
    pub fn cost(&self, criterion: Criterion) -> &Rational {
        match criterion {
            Criterion::SumCost => &self.sum_cost,
            Criterion::MaxCost => &self.max_cost,
        }
    }
}

/// All pure equilibria, one entry per ordered profile.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquilibriumSet {
    pub members: Vec<EquilibriumSummary>,
}

impl EquilibriumSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Equilibria up to a permutation of agents, in first-seen order, each
    /// with its number of ordered representatives.
    pub fn distinct(&self) -> Vec<(&EquilibriumSummary, usize)> {
        let mut index: HashMap<Vec<Path>, usize> = HashMap::new();
        let mut out: Vec<(&EquilibriumSummary, usize)> = Vec::new();
        for member in &self.members {
            let key = member.profile.canonical_multiset();
            match index.get(&key) {
                Some(&i) => out[i].1 += 1,
                None => {
                    index.insert(key, out.len());
                    out.push((member, 1));
                }
            }
        }
        out
    }

    pub fn best(&self, criterion: Criterion) -> Option<&EquilibriumSummary> {
        // min_by_key keeps the first minimum.
        self.members.iter().min_by_key(|m| m.cost(criterion))
    }

    pub fn worst(&self, criterion: Criterion) -> Option<&EquilibriumSummary> {
        self.members
            .iter()
            .rev()
            .max_by_key(|m| m.cost(criterion))
    }
}

pub fn equilibria_among(instance: &GameInstance, profiles: &[StrategyProfile]) -> Result<EquilibriumSet> {
    let mut members = Vec::new();
    for profile in profiles {
        if !check_nash(instance, profile).is_nash() {
            continue;
        }
        let finite = |c: Cost| {
            c.into_finite()
                .ok_or_else(|| Error::InternalAssertion("feasible equilibrium with infinite cost".into()))
        };
        members.push(EquilibriumSummary {
            profile: profile.clone(),
            sum_cost: finite(sum_cost(instance, profile))?,
            max_cost: finite(max_cost(instance, profile))?,
            potential: potential(instance, profile)?,
        });
    }
    Ok(EquilibriumSet { members })
}

pub fn all_nash(instance: &GameInstance, limits: EnumerationLimits) -> Result<EquilibriumSet> {
    let profiles = enumerate_profiles(instance, limits)?;
    equilibria_among(instance, &profiles)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioEntry {
    pub value: RatioValue,
    /// Set when both costs are zero and the ratio is reported as one.
    pub degenerate: bool,
}

impl RatioEntry {
    fn of(numerator: &Rational, denominator: &Rational) -> RatioEntry {
        let (value, degenerate) = RatioValue::of(&Cost::Finite(numerator.clone()), denominator);
        RatioEntry { value, degenerate }
    }
}

/// Outcome of checking one claimed bound on one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundVerdict {
    /// Stable identifier, e.g. `Thm5:PoA_sc<=n`.
    pub tag: String,
    pub bound: Rational,
    pub measured: RatioValue,
    pub holds: bool,
    /// Profile that breaks the bound, when it does.
    pub witness: Option<StrategyProfile>,
}

impl BoundVerdict {
    fn check(tag: &str, measured: &RatioValue, bound: &Rational, witness: &StrategyProfile) -> Self {
        let holds = measured.at_most(bound);
        BoundVerdict {
            tag: tag.to_string(),
            bound: bound.clone(),
            measured: measured.clone(),
            holds,
            witness: (!holds).then(|| witness.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub class: GraphClass,
    pub agents: usize,
    pub symmetric: bool,
    pub feasible_profiles: usize,
    pub optimum_sc: Optimum,
    pub optimum_mc: Optimum,
    pub equilibria: EquilibriumSet,
    pub poa_sc: RatioEntry,
    pub poa_mc: RatioEntry,
    pub pos_sc: RatioEntry,
    pub pos_mc: RatioEntry,
    pub verdicts: Vec<BoundVerdict>,
}

impl AnalysisReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    pub fn verdict(&self, tag: &str) -> Option<&BoundVerdict> {
        self.verdicts.iter().find(|v| v.tag == tag)
    }
}

/// Largest single-agent cost over all equilibria, with its profile.
fn worst_agent_cost(set: &EquilibriumSet, instance: &GameInstance) -> Option<(Rational, StrategyProfile)> {
    set.members
        .iter()
        .filter_map(|m| {
            let worst = agent_costs(instance, &m.profile).into_iter().max()?;
            Some((worst.into_finite()?, m.profile.clone()))
        })
        .max_by(|a, b| a.0.cmp(&b.0))
}

/// Full exact analysis. Bounds are only asserted where they are known to hold:
/// anarchy bounds and the per-agent cost bound on series-parallel symmetric
/// games, stability bounds on every symmetric game, and the weaker
/// stability bounds on asymmetric games. On DAGs and general graphs the
/// anarchy ratios are reported without a verdict.
pub fn compute_ratios(instance: &GameInstance, limits: EnumerationLimits) -> Result<AnalysisReport> {
    let profiles = enumerate_profiles(instance, limits)?;
    let optimum_sc = optimum_among(instance, &profiles, Criterion::SumCost).ok_or(Error::InfeasibleGame)?;
    let optimum_mc = optimum_among(instance, &profiles, Criterion::MaxCost).ok_or(Error::InfeasibleGame)?;
    let equilibria = equilibria_among(instance, &profiles)?;
    if equilibria.is_empty() {
        return Err(Error::InternalAssertion("feasible game without a pure equilibrium".into()));
    }

    let worst_sc = equilibria.worst(Criterion::SumCost).expect("nonempty");
    let worst_mc = equilibria.worst(Criterion::MaxCost).expect("nonempty");
    let best_sc = equilibria.best(Criterion::SumCost).expect("nonempty");
    let best_mc = equilibria.best(Criterion::MaxCost).expect("nonempty");
    let poa_sc = RatioEntry::of(&worst_sc.sum_cost, &optimum_sc.value);
    let poa_mc = RatioEntry::of(&worst_mc.max_cost, &optimum_mc.value);
    let pos_sc = RatioEntry::of(&best_sc.sum_cost, &optimum_sc.value);
    let pos_mc = RatioEntry::of(&best_mc.max_cost, &optimum_mc.value);

    let class = classify(instance.graph());
    let symmetric = instance.is_symmetric();
    let n = int(instance.agent_count() as i64);
    let mut verdicts = Vec::new();
    if symmetric && class.is_series_parallel() {
        verdicts.push(BoundVerdict::check("Thm5:PoA_sc<=n", &poa_sc.value, &n, &worst_sc.profile));
        verdicts.push(BoundVerdict::check("Thm9:PoA_mc<=n", &poa_mc.value, &n, &worst_mc.profile));
        if let Some((cost, profile)) = worst_agent_cost(&equilibria, instance) {
            verdicts.push(BoundVerdict::check(
                "Lem3:p_j(NE)<=opt_sc",
                &RatioValue::Exact(cost),
                &optimum_sc.value,
                &profile,
            ));
        }
    }
    if symmetric {
        verdicts.push(BoundVerdict::check("Thm8:PoS_sc<=n", &pos_sc.value, &n, &best_sc.profile));
        verdicts.push(BoundVerdict::check("Thm10:PoS_mc<=n", &pos_mc.value, &n, &best_mc.profile));
    } else {
        verdicts.push(BoundVerdict::check("Thm13:PoS_sc<=n", &pos_sc.value, &n, &best_sc.profile));
        let n2 = &n * &n;
        verdicts.push(BoundVerdict::check("Thm14:PoS_mc<=n^2", &pos_mc.value, &n2, &best_mc.profile));
    }
    for (tag, pos, poa, witness) in [
        ("Inv:PoS_sc<=PoA_sc", &pos_sc, &poa_sc, &best_sc.profile),
        ("Inv:PoS_mc<=PoA_mc", &pos_mc, &poa_mc, &best_mc.profile),
    ] {
        let holds = pos.value <= poa.value;
        verdicts.push(BoundVerdict {
            tag: tag.to_string(),
            bound: poa.value.exact().cloned().unwrap_or_else(Rational::zero),
            measured: pos.value.clone(),
            holds,
            witness: (!holds).then(|| witness.clone()),
        });
    }
    let one = int(1);
    let below_one = [&poa_sc, &poa_mc, &pos_sc, &pos_mc]
        .iter()
        .any(|r| matches!(&r.value, RatioValue::Exact(v) if v < &one));
    verdicts.push(BoundVerdict {
        tag: "Inv:ratios>=1".to_string(),
        bound: one,
        measured: [&poa_sc, &poa_mc, &pos_sc, &pos_mc]
            .iter()
            .map(|r| r.value.clone())
            .min()
            .expect("four ratios"),
        holds: !below_one,
        witness: None,
    });

    Ok(AnalysisReport {
        class,
        agents: instance.agent_count(),
        symmetric,
        feasible_profiles: profiles.len(),
        optimum_sc,
        optimum_mc,
        equilibria,
        poa_sc,
        poa_mc,
        pos_sc,
        pos_mc,
        verdicts,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostBoundVerdict {
    pub holds: bool,
    pub optimum_sc: Rational,
    /// Largest agent cost seen in any equilibrium.
    pub worst_agent_cost: Rational,
    /// Offending equilibrium and agent, if the bound fails.
    pub witness: Option<(StrategyProfile, usize)>,
}

/// On a symmetric series-parallel game, checks that no agent pays more than
/// the optimal sum-cost in any equilibrium.
pub fn verify_lemma_cost_bound(instance: &GameInstance, limits: EnumerationLimits) -> Result<CostBoundVerdict> {
    if !classify(instance.graph()).is_series_parallel() {
        return Err(Error::NotSeriesParallel);
    }
    if !instance.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let profiles = enumerate_profiles(instance, limits)?;
    let optimum = optimum_among(instance, &profiles, Criterion::SumCost).ok_or(Error::InfeasibleGame)?;
    let equilibria = equilibria_among(instance, &profiles)?;
    let mut worst = Rational::zero();
    let mut witness = None;
    for member in &equilibria.members {
        for (agent, cost) in agent_costs(instance, &member.profile).into_iter().enumerate() {
            let cost = cost.into_finite().expect("equilibria are feasible");
            if cost > optimum.value && witness.is_none() {
                witness = Some((member.profile.clone(), agent));
            }
            if cost > worst {
                worst = cost;
            }
        }
    }
    Ok(CostBoundVerdict {
        holds: witness.is_none(),
        optimum_sc: optimum.value,
        worst_agent_cost: worst,
        witness,
    })
}
