//! Instance generators: the three hand-built constructions (five-node DAG
//! with unbounded anarchy, parallel links with a threshold edge, and the
//! cheap/expensive link pair) plus seeded random families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::max_flow;
use crate::game::{
    is_nash, max_cost, sum_cost, GameInstance, StrategyProfile, Terminals,
};
use crate::graph::{
    build_from_sp, classify, enumerate_st_paths, EdgeId, Graph, GraphClass, NodeId, SpExpr,
    DEFAULT_PATH_CAP,
};
use crate::rational::{int, ratio, serde_str, Cost, Rational};
use crate::scheme::{project_table, CostSharingScheme};

/// Generation attempts before `GenerationFailed`.
const MAX_ATTEMPTS: usize = 500;

/// How the share tables of generated edges are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeFamily {
    Ordinary,
    Threshold,
    RandomValid,
    /// Each edge picks one of the three families above.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSpParams {
    pub seed: u64,
    pub agents: usize,
    pub max_edges: usize,
    pub max_depth: usize,
    /// Base costs are `k / d` with `k` in `cost_min..=cost_max` and `d` in
    /// `1..=max_denominator`.
    pub cost_min: u32,
    pub cost_max: u32,
    pub max_denominator: u32,
    pub cap_min: u32,
    pub cap_max: u32,
    pub family: SchemeFamily,
}

impl Default for RandomSpParams {
    fn default() -> Self {
        RandomSpParams {
            seed: 0,
            agents: 2,
            max_edges: 8,
            max_depth: 5,
            cost_min: 1,
            cost_max: 10,
            max_denominator: 3,
            cap_min: 1,
            cap_max: 3,
            family: SchemeFamily::Mixed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomDagParams {
    pub seed: u64,
    pub agents: usize,
    pub nodes: usize,
    pub max_edges: usize,
    pub cost_min: u32,
    pub cost_max: u32,
    pub max_denominator: u32,
    pub cap_min: u32,
    pub cap_max: u32,
    pub family: SchemeFamily,
}

impl Default for RandomDagParams {
    fn default() -> Self {
        RandomDagParams {
            seed: 0,
            agents: 2,
            nodes: 5,
            max_edges: 8,
            cost_min: 1,
            cost_max: 10,
            max_denominator: 3,
            cap_min: 1,
            cap_max: 2,
            family: SchemeFamily::Mixed,
        }
    }
}

/// Provenance of an instance; every generator is reachable from here.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceRecipe {
    Fig2 {
        #[serde(with = "serde_str")]
        x: Rational,
        #[serde(with = "serde_str")]
        y: Rational,
    },
    Fig3 {
        n: u32,
        #[serde(with = "serde_str")]
        eps: Rational,
    },
    TwoLink {
        n: u32,
    },
    RandomSp(RandomSpParams),
    RandomDag(RandomDagParams),
    Custom,
}

impl InstanceRecipe {
    pub fn build(&self) -> Result<GameInstance> {
        match self {
            InstanceRecipe::Fig2 { x, y } => fig2_dag(x.clone(), y.clone()),
            InstanceRecipe::Fig3 { n, eps } => fig3_parallel(*n, eps.clone()),
            InstanceRecipe::TwoLink { n } => Ok(two_link(*n)),
            InstanceRecipe::RandomSp(params) => random_sp(params),
            InstanceRecipe::RandomDag(params) => random_asymmetric(params),
            InstanceRecipe::Custom => Err(Error::ParameterViolation(
                "custom instances have no generator".into(),
            )),
        }
    }
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Two agents on the five-node DAG `s, a, b, c, t` with edges
/// `s->a, s->b, a->c (x); a->b, b->c (y); b->t, c->t (x)`, all capacity one
/// and fairly shared. Requires `0 < x < y`.
///
/// Construction re-derives four values and fails if any differs: the
/// profile `{s.a.c.t, s.b.t}` costs `5x` in total and `3x` at most; the
/// profile `{s.a.b.t, s.b.c.t}` is an equilibrium costing `4x + 2y` in total
/// and `2x + y` at most.
pub fn fig2_dag(x: Rational, y: Rational) -> Result<GameInstance> {
    if x <= int(0) || x >= y {
        return Err(Error::ParameterViolation(format!("need 0 < x < y, got x={x}, y={y}")));
    }
    fig2_dag_relaxed(x, y)
}

/// [`fig2_dag`] on the closed range `0 < x <= y`. At `x = y` the same two
/// profiles and the same four values remain valid.
pub fn fig2_dag_relaxed(x: Rational, y: Rational) -> Result<GameInstance> {
    if x <= int(0) || x > y {
        return Err(Error::ParameterViolation(format!("need 0 < x <= y, got x={x}, y={y}")));
    }
    let n = NodeId;
    let (s, a, b, c, t) = (n(0), n(1), n(2), n(3), n(4));
    let arcs = [(s, a), (s, b), (a, c), (a, b), (b, c), (b, t), (c, t)];
    let costs = [&x, &x, &x, &y, &y, &x, &x];
    let graph = Graph::new(labels(&["s", "a", "b", "c", "t"]), &arcs, s, t)?;
    let schemes = costs
        .iter()
        .map(|p| CostSharingScheme::ordinary((*p).clone(), 1))
        .collect();
    let instance = GameInstance::symmetric(graph, schemes, 2)?;

    let e = |ids: &[usize]| ids.iter().map(|&i| EdgeId(i)).collect::<Vec<_>>();
    let good = StrategyProfile::new(&instance, vec![e(&[0, 2, 6]), e(&[1, 5])])?;
    let bad = StrategyProfile::new(&instance, vec![e(&[0, 3, 5]), e(&[1, 4, 6])])?;
    let checks = [
        ("sum-cost of {s.a.c.t, s.b.t}", sum_cost(&instance, &good), int(5) * &x),
        ("max-cost of {s.a.c.t, s.b.t}", max_cost(&instance, &good), int(3) * &x),
        ("sum-cost of {s.a.b.t, s.b.c.t}", sum_cost(&instance, &bad), int(4) * &x + int(2) * &y),
        ("max-cost of {s.a.b.t, s.b.c.t}", max_cost(&instance, &bad), int(2) * &x + &y),
    ];
    for (what, got, want) in checks {
        if got != Cost::Finite(want.clone()) {
            return Err(Error::SelfCheckFailed(format!("{what} is {got}, expected {want}")));
        }
    }
    if !is_nash(&instance, &bad) {
        return Err(Error::SelfCheckFailed("{s.a.b.t, s.b.c.t} is not an equilibrium".into()));
    }
    Ok(instance)
}

/// `n` agents on `n + 1` parallel links: `e_0` costs `1/n`, `e_1..e_{n-1}`
/// cost 1, all with capacity one; `e_n` costs `1 + eps` with capacity `n`
/// and charges the full cost to each user unless all `n` agents share it.
pub fn fig3_parallel(n: u32, eps: Rational) -> Result<GameInstance> {
    if n < 2 {
        return Err(Error::ParameterViolation(format!("need n >= 2, got {n}")));
    }
    if eps <= int(0) {
        return Err(Error::ParameterViolation(format!("need eps > 0, got {eps}")));
    }
    let (s, t) = (NodeId(0), NodeId(1));
    let arcs = vec![(s, t); n as usize + 1];
    let graph = Graph::new(labels(&["s", "t"]), &arcs, s, t)?;
    let mut schemes = Vec::with_capacity(n as usize + 1);
    schemes.push(CostSharingScheme::ordinary(ratio(1, i64::from(n)), 1));
    for _ in 1..n {
        schemes.push(CostSharingScheme::ordinary(int(1), 1));
    }
    schemes.push(CostSharingScheme::threshold(int(1) + eps, n, n)?);
    GameInstance::symmetric(graph, schemes, n as usize)
}

/// `n` agents, two parallel links of cost 1 and `n`, both with capacity `n`.
pub fn two_link(n: u32) -> GameInstance {
    let (s, t) = (NodeId(0), NodeId(1));
    let graph = Graph::new(labels(&["s", "t"]), &[(s, t), (s, t)], s, t)
        .expect("two parallel links form a valid graph");
    let schemes = vec![
        CostSharingScheme::ordinary(int(1), n),
        CostSharingScheme::ordinary(int(i64::from(n)), n),
    ];
    GameInstance::symmetric(graph, schemes, n as usize).expect("capacity n admits n agents")
}

fn random_expr(rng: &mut ChaCha8Rng, edges: usize, depth: usize, max_depth: usize) -> SpExpr {
    if edges <= 1 || depth >= max_depth {
        return SpExpr::Edge;
    }
    let left = rng.gen_range(1..edges);
    let l = random_expr(rng, left, depth + 1, max_depth);
    let r = random_expr(rng, edges - left, depth + 1, max_depth);
    if rng.gen_bool(0.5) {
        SpExpr::series(l, r)
    } else {
        SpExpr::parallel(l, r)
    }
}

fn random_cost(rng: &mut ChaCha8Rng, lo: u32, hi: u32, max_den: u32) -> Rational {
    let num = rng.gen_range(lo..=hi.max(lo));
    let den = rng.gen_range(1..=max_den.max(1));
    ratio(i64::from(num), i64::from(den))
}

fn random_scheme(
    rng: &mut ChaCha8Rng,
    family: SchemeFamily,
    base: Rational,
    capacity: u32,
) -> Result<CostSharingScheme> {
    let family = match family {
        SchemeFamily::Mixed => *[SchemeFamily::Ordinary, SchemeFamily::Threshold, SchemeFamily::RandomValid]
            .choose(rng)
            .expect("nonempty"),
        other => other,
    };
    if capacity == 0 {
        return Ok(CostSharingScheme::ordinary(base, 0));
    }
    let scheme = match family {
        SchemeFamily::Ordinary | SchemeFamily::Mixed => CostSharingScheme::ordinary(base, capacity),
        SchemeFamily::Threshold => {
            let at = rng.gen_range(1..=capacity);
            CostSharingScheme::threshold(base, capacity, at)?
        }
        SchemeFamily::RandomValid => {
            // Candidates between the fair share and the full cost, then projected.
            let candidate: Vec<Rational> = (1..=capacity)
                .map(|x| {
                    let floor = &base / int(i64::from(x));
                    let k = rng.gen_range(0..=6);
                    &floor + (&base - &floor) * ratio(k, 6)
                })
                .collect();
            let table = project_table(&base, &candidate);
            CostSharingScheme::try_from_table(base, table)?
        }
    };
    Ok(scheme)
}

/// Raises capacities along random source-sink paths until `agents` units of
/// flow fit.
fn ensure_flow(
    rng: &mut ChaCha8Rng,
    graph: &Graph,
    capacities: &mut [u32],
    agents: usize,
) -> Result<()> {
    let paths = enumerate_st_paths(graph, graph.source(), graph.sink(), DEFAULT_PATH_CAP)?;
    if paths.is_empty() && agents > 0 {
        return Err(Error::GenerationFailed("sink unreachable".into()));
    }
    while (max_flow(graph, capacities, graph.source(), graph.sink()).value as usize) < agents {
        let path = paths.choose(rng).expect("nonempty");
        for e in path {
            capacities[e.0] += 1;
        }
    }
    Ok(())
}

/// Symmetric game on a random two-terminal series-parallel graph.
pub fn random_sp(params: &RandomSpParams) -> Result<GameInstance> {
    if params.max_edges == 0 || params.cost_min > params.cost_max || params.cap_min > params.cap_max {
        return Err(Error::ParameterViolation("empty generation range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..MAX_ATTEMPTS {
        let edges = rng.gen_range(params.max_edges.min(2)..=params.max_edges);
        let expr = random_expr(&mut rng, edges, 0, params.max_depth);
        let graph = build_from_sp(&expr);
        let costs: Vec<Rational> = (0..graph.edge_count())
            .map(|_| random_cost(&mut rng, params.cost_min, params.cost_max, params.max_denominator))
            .collect();
        let mut caps: Vec<u32> = (0..graph.edge_count())
            .map(|_| rng.gen_range(params.cap_min..=params.cap_max))
            .collect();
        ensure_flow(&mut rng, &graph, &mut caps, params.agents)?;
        let schemes = costs
            .into_iter()
            .zip(&caps)
            .map(|(p, &c)| random_scheme(&mut rng, params.family, p, c))
            .collect::<Result<Vec<_>>>()?;
        match GameInstance::symmetric(graph, schemes, params.agents) {
            Ok(instance) => return Ok(instance),
            Err(Error::InfeasibleGame) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(Error::GenerationFailed(format!("no instance after {MAX_ATTEMPTS} attempts")))
}

/// Game on a random DAG in which agents have their own terminal pairs. The
/// graph is a spine `v0 -> v1 -> ... -> v{k-1}` plus random forward chords,
/// redrawn until it is not series-parallel and the agents do not all share
/// one terminal pair.
pub fn random_asymmetric(params: &RandomDagParams) -> Result<GameInstance> {
    let k = params.nodes;
    if k < 3 || params.max_edges < k || params.cost_min > params.cost_max || params.cap_min > params.cap_max {
        return Err(Error::ParameterViolation(
            "need at least 3 nodes, a spine-sized edge budget and nonempty ranges".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let names: Vec<String> = (0..k).map(|i| format!("v{i}")).collect();
    for _ in 0..MAX_ATTEMPTS {
        let mut arcs: Vec<(NodeId, NodeId)> = (0..k - 1).map(|i| (NodeId(i), NodeId(i + 1))).collect();
        let target = rng.gen_range(k..=params.max_edges);
        while arcs.len() < target {
            let u = rng.gen_range(0..k - 1);
            let v = rng.gen_range(u + 1..k);
            arcs.push((NodeId(u), NodeId(v)));
        }
        arcs.sort();
        let graph = Graph::new(names.clone(), &arcs, NodeId(0), NodeId(k - 1))?;
        if classify(&graph) != GraphClass::Dag {
            continue;
        }
        let agents: Vec<Terminals> = (0..params.agents)
            .map(|_| {
                let u = rng.gen_range(0..k - 1);
                let v = rng.gen_range(u + 1..k);
                Terminals { source: NodeId(u), sink: NodeId(v) }
            })
            .collect();
        let symmetric = agents
            .iter()
            .all(|t| t.source == graph.source() && t.sink == graph.sink());
        if symmetric && params.agents > 1 {
            continue;
        }
        let costs: Vec<Rational> = (0..graph.edge_count())
            .map(|_| random_cost(&mut rng, params.cost_min, params.cost_max, params.max_denominator))
            .collect();
        let mut caps: Vec<u32> = (0..graph.edge_count())
            .map(|_| rng.gen_range(params.cap_min..=params.cap_max))
            .collect();
        // Make one random assignment fit so the game is feasible.
        let mut loads = vec![0u32; graph.edge_count()];
        for t in &agents {
            let options = enumerate_st_paths(&graph, t.source, t.sink, DEFAULT_PATH_CAP)?;
            let path = options.choose(&mut rng).expect("the spine connects every ordered pair");
            for e in path {
                loads[e.0] += 1;
            }
        }
        for (c, &x) in caps.iter_mut().zip(&loads) {
            *c = (*c).max(x);
        }
        let schemes = costs
            .into_iter()
            .zip(&caps)
            .map(|(p, &c)| random_scheme(&mut rng, params.family, p, c))
            .collect::<Result<Vec<_>>>()?;
        return GameInstance::new(graph, schemes, agents);
    }
    Err(Error::GenerationFailed(format!("no asymmetric DAG after {MAX_ATTEMPTS} attempts")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::is_feasible;

    #[test]
    fn fig2_self_check_points() {
        for (x, y) in [(int(1), int(2)), (int(1), int(100)), (int(3), int(9)), (ratio(1, 3), ratio(2, 5))] {
            let g = fig2_dag(x, y).unwrap();
            assert_eq!(classify(g.graph()), GraphClass::Dag);
        }
    }

    #[test]
    fn fig2_rejects_bad_parameters() {
        assert!(matches!(fig2_dag(int(1), int(1)), Err(Error::ParameterViolation(_))));
        assert!(matches!(fig2_dag(int(0), int(1)), Err(Error::ParameterViolation(_))));
        assert!(matches!(fig2_dag(int(3), int(2)), Err(Error::ParameterViolation(_))));
    }

    #[test]
    fn fig3_shape() {
        let g = fig3_parallel(4, ratio(1, 100)).unwrap();
        assert_eq!(g.graph().edge_count(), 5);
        assert_eq!(classify(g.graph()), GraphClass::ParallelLink);
        let last = g.scheme(EdgeId(4));
        assert_eq!(last.shares().last(), Some(&ratio(101, 400)));
        assert_eq!(g.scheme(EdgeId(0)).shares(), &[ratio(1, 4)]);
        assert!(fig3_parallel(1, ratio(1, 100)).is_err());
        assert!(fig3_parallel(3, int(0)).is_err());
    }

    #[test]
    fn two_link_shape() {
        let g = two_link(5);
        assert_eq!(g.agent_count(), 5);
        assert_eq!(g.capacities(), vec![5, 5]);
        assert_eq!(g.base_cost(EdgeId(1)), &int(5));
    }

    #[test]
    fn random_sp_is_deterministic_and_valid() {
        for seed in 0..30 {
            for family in [SchemeFamily::Ordinary, SchemeFamily::Threshold, SchemeFamily::RandomValid, SchemeFamily::Mixed] {
                let params = RandomSpParams { seed, agents: 3, family, ..Default::default() };
                let g = random_sp(&params).unwrap();
                assert!(classify(g.graph()).is_series_parallel());
                assert!(g.graph().edge_count() <= params.max_edges);
                assert!(g.schemes().iter().all(|s| s.validate().is_empty()));
                let flow = max_flow(g.graph(), &g.capacities(), g.graph().source(), g.graph().sink());
                assert!(flow.value >= 3);
                assert_eq!(random_sp(&params).unwrap(), g);
            }
        }
    }

    #[test]
    fn random_asymmetric_is_deterministic_feasible_dag() {
        for seed in 0..30 {
            let params = RandomDagParams { seed, agents: 3, ..Default::default() };
            let g = random_asymmetric(&params).unwrap();
            assert_eq!(classify(g.graph()), GraphClass::Dag);
            assert!(!g.is_symmetric());
            let paths = g.agent_paths(DEFAULT_PATH_CAP).unwrap();
            let witness = crate::game::first_feasible_assignment(&g, &paths).unwrap();
            let profile = StrategyProfile::new(&g, witness).unwrap();
            assert!(is_feasible(&g, &profile));
            assert_eq!(random_asymmetric(&params).unwrap(), g);
        }
    }

    #[test]
    fn recipe_round_trip() {
        let recipe = InstanceRecipe::Fig3 { n: 4, eps: ratio(1, 100) };
        let json = serde_json::to_string(&recipe).unwrap();
        assert_eq!(json, r#"{"kind":"fig3","n":4,"eps":"1/100"}"#);
        let back: InstanceRecipe = serde_json::from_str(&json).unwrap();
        assert_eq!(back, recipe);
        assert_eq!(back.build().unwrap(), fig3_parallel(4, ratio(1, 100)).unwrap());
    }
}
