//! JSON documents: instances, profiles, analysis reports and dynamics
//! traces. Rationals always travel as reduced `"num/den"` strings.

use serde::{Deserialize, Serialize};

use crate::analysis::{AnalysisReport, BoundVerdict, EquilibriumSummary, Optimum, RatioEntry};
use crate::dynamics::DynamicsTrace;
use crate::error::{Error, Result};
use crate::game::{is_nash, max_cost, sum_cost, GameInstance, StrategyProfile, Terminals};
use crate::graph::{EdgeId, Graph, NodeId, Path};
use crate::instances::InstanceRecipe;
use crate::rational::{serde_str, to_f64, Cost, RatioValue, Rational};
use crate::scheme::CostSharingScheme;

pub const FORMAT_VERSION: u32 = 1;

/// A rational that serializes as `"num/den"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exact(#[serde(with = "serde_str")] pub Rational);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AgentsField {
    /// `n` agents between the document's source and sink.
    Count(usize),
    List(Vec<TerminalsDoc>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalsDoc {
    pub source: String,
    pub sink: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemeDoc {
    /// Only `"ordinary"` is accepted.
    Named(String),
    Table { table: Vec<Exact> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: usize,
    pub tail: String,
    pub head: String,
    pub cost: Exact,
    pub capacity: u32,
    pub scheme: SchemeDoc,
}

fn default_source() -> String {
    "s".to_string()
}

fn default_sink() -> String {
    "t".to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub version: u32,
    pub agents: AgentsField,
    pub nodes: Vec<String>,
    #[serde(default = "default_source")]
    pub source: String,
    #[serde(default = "default_sink")]
    pub sink: String,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<InstanceRecipe>,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    text
}

fn parse_error(err: serde_json::Error) -> Error {
    Error::Parse(err.to_string())
}

impl InstanceDocument {
    pub fn from_instance(instance: &GameInstance, recipe: Option<InstanceRecipe>) -> Self {
        let graph = instance.graph();
        let label = |node: NodeId| graph.label(node).to_string();
        let agents = if instance.is_symmetric() {
            AgentsField::Count(instance.agent_count())
        } else {
            AgentsField::List(
                instance
                    .agents()
                    .iter()
                    .map(|t| TerminalsDoc { source: label(t.source), sink: label(t.sink) })
                    .collect(),
            )
        };
        let edges = graph
            .edges()
            .iter()
            .map(|edge| {
                let scheme = instance.scheme(edge.id);
                EdgeDoc {
                    id: edge.id.0,
                    tail: label(edge.tail),
                    head: label(edge.head),
                    cost: Exact(scheme.base_cost().clone()),
                    capacity: scheme.capacity(),
                    scheme: if scheme.is_ordinary() {
                        SchemeDoc::Named("ordinary".to_string())
                    } else {
                        SchemeDoc::Table {
                            table: scheme.shares().iter().cloned().map(Exact).collect(),
                        }
                    },
                }
            })
            .collect();
        InstanceDocument {
            version: FORMAT_VERSION,
            agents,
            nodes: graph.labels().to_vec(),
            source: label(graph.source()),
            sink: label(graph.sink()),
            edges,
            recipe,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Validates and builds the game.
    pub fn to_instance(&self) -> Result<GameInstance> {
        if self.version != FORMAT_VERSION {
            return Err(Error::InvalidInstance(format!(
                "unsupported document version {}",
                self.version
            )));
        }
        let node = |name: &str| -> Result<NodeId> {
            self.nodes
                .iter()
                .position(|n| n == name)
                .map(NodeId)
                .ok_or_else(|| Error::InvalidGraph(format!("unknown node {name:?}")))
        };
        let mut arcs = Vec::with_capacity(self.edges.len());
        let mut schemes = Vec::with_capacity(self.edges.len());
        for (position, edge) in self.edges.iter().enumerate() {
            if edge.id != position {
                return Err(Error::InvalidGraph(format!(
                    "edge at position {position} has id {}; ids must be 0..m-1 in order",
                    edge.id
                )));
            }
            arcs.push((node(&edge.tail)?, node(&edge.head)?));
            let base = edge.cost.0.clone();
            let scheme = match &edge.scheme {
                SchemeDoc::Named(name) if name == "ordinary" => {
                    CostSharingScheme::ordinary(base, edge.capacity)
                }
                SchemeDoc::Named(name) => {
                    return Err(Error::InvalidInstance(format!("unknown scheme {name:?}")))
                }
                SchemeDoc::Table { table } => {
                    if table.len() != edge.capacity as usize {
                        return Err(Error::InvalidInstance(format!(
                            "edge {position}: table has {} entries for capacity {}",
                            table.len(),
                            edge.capacity
                        )));
                    }
                    CostSharingScheme::from_table(base, table.iter().map(|e| e.0.clone()).collect())
                }
            };
            schemes.push(scheme);
        }
        let graph = Graph::new(self.nodes.clone(), &arcs, node(&self.source)?, node(&self.sink)?)?;
        match &self.agents {
            AgentsField::Count(n) => GameInstance::symmetric(graph, schemes, *n),
            AgentsField::List(list) => {
                let agents = list
                    .iter()
                    .map(|t| Ok(Terminals { source: node(&t.source)?, sink: node(&t.sink)? }))
                    .collect::<Result<Vec<_>>>()?;
                GameInstance::new(graph, schemes, agents)
            }
        }
    }
}

fn edge_ids(path: &Path) -> Vec<usize> {
    path.iter().map(|e| e.0).collect()
}

fn profile_ids(profile: &StrategyProfile) -> Vec<Vec<usize>> {
    profile.paths().iter().map(edge_ids).collect()
}

/// A strategy profile as per-agent edge-id lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    pub paths: Vec<Vec<usize>>,
}

impl ProfileDocument {
    pub fn from_profile(profile: &StrategyProfile) -> Self {
        ProfileDocument { paths: profile_ids(profile) }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_profile(&self, instance: &GameInstance) -> Result<StrategyProfile> {
        let edges = instance.graph().edge_count();
        let paths = self
            .paths
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&e| {
                        if e < edges {
                            Ok(EdgeId(e))
                        } else {
                            Err(Error::InvalidProfile(format!("edge id {e} out of range")))
                        }
                    })
                    .collect::<Result<Path>>()
            })
            .collect::<Result<Vec<_>>>()?;
        StrategyProfile::new(instance, paths)
    }
}

/// Exact value with a decimal approximation alongside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueDoc {
    /// `"num/den"` or `"inf"`.
    pub exact: String,
    /// `null` when infinite.
    pub decimal: Option<f64>,
}

impl ValueDoc {
    pub fn of_rational(value: &Rational) -> Self {
        ValueDoc { exact: crate::rational::format_rational(value), decimal: Some(to_f64(value)) }
    }

    pub fn of_ratio(value: &RatioValue) -> Self {
        match value {
            RatioValue::Exact(v) => Self::of_rational(v),
            RatioValue::Infinite => ValueDoc { exact: "inf".to_string(), decimal: None },
        }
    }

    pub fn of_cost(value: &Cost) -> Self {
        match value {
            Cost::Finite(v) => Self::of_rational(v),
            Cost::Infinite => ValueDoc { exact: "inf".to_string(), decimal: None },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimumDoc {
    pub value: ValueDoc,
    pub profile: Vec<Vec<usize>>,
}

impl OptimumDoc {
    fn of(optimum: &Optimum) -> Self {
        OptimumDoc { value: ValueDoc::of_rational(&optimum.value), profile: profile_ids(&optimum.profile) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumDoc {
    pub profile: Vec<Vec<usize>>,
    /// Ordered profiles that are permutations of this one.
    pub multiplicity: usize,
    pub sum_cost: ValueDoc,
    pub max_cost: ValueDoc,
    pub potential: ValueDoc,
}

impl EquilibriumDoc {
    fn of(member: &EquilibriumSummary, multiplicity: usize) -> Self {
        EquilibriumDoc {
            profile: profile_ids(&member.profile),
            multiplicity,
            sum_cost: ValueDoc::of_rational(&member.sum_cost),
            max_cost: ValueDoc::of_rational(&member.max_cost),
            potential: ValueDoc::of_rational(&member.potential),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriaDoc {
    pub count: usize,
    pub distinct: Vec<EquilibriumDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioDoc {
    pub exact: String,
    pub decimal: Option<f64>,
    pub degenerate: bool,
}

impl RatioDoc {
    fn of(entry: &RatioEntry) -> Self {
        let v = ValueDoc::of_ratio(&entry.value);
        RatioDoc { exact: v.exact, decimal: v.decimal, degenerate: entry.degenerate }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub tag: String,
    pub bound: ValueDoc,
    pub measured: ValueDoc,
    pub holds: bool,
    pub witness: Option<Vec<Vec<usize>>>,
}

impl VerdictDoc {
    fn of(verdict: &BoundVerdict) -> Self {
        VerdictDoc {
            tag: verdict.tag.clone(),
            bound: ValueDoc::of_rational(&verdict.bound),
            measured: ValueDoc::of_ratio(&verdict.measured),
            holds: verdict.holds,
            witness: verdict.witness.as_ref().map(profile_ids),
        }
    }
}

/// Which social cost a report covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionSelection {
    Both,
    Sc,
    Mc,
}

impl CriterionSelection {
    fn sum_cost(self) -> bool {
        self != CriterionSelection::Mc
    }

    fn max_cost(self) -> bool {
        self != CriterionSelection::Sc
    }

    /// Verdict tags ending in `_sc` or `_mc` belong to one criterion; the
    /// per-agent cost bound belongs to sum-cost.
    pub fn covers(self, tag: &str) -> bool {
        let claim = tag.split(':').nth(1).unwrap_or(tag);
        if claim.contains("_sc") || claim.contains("opt_sc") {
            self.sum_cost()
        } else if claim.contains("_mc") {
            self.max_cost()
        } else {
            true
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poa_sc: Option<RatioDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pos_sc: Option<RatioDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poa_mc: Option<RatioDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pos_mc: Option<RatioDoc>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Optima {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum_cost: Option<OptimumDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_cost: Option<OptimumDoc>,
}

/// Run-dependent data kept apart so the rest of a report is byte-stable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Volatile {
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: u32,
    pub class: String,
    pub agents: usize,
    pub symmetric: bool,
    pub feasible_profiles: usize,
    pub criterion: CriterionSelection,
    pub optima: Optima,
    pub equilibria: EquilibriaDoc,
    pub ratios: Ratios,
    pub verdicts: Vec<VerdictDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<TraceDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volatile: Option<Volatile>,
}

impl ReportDocument {
    pub fn from_report(report: &AnalysisReport, criterion: CriterionSelection) -> Self {
        let sc = criterion.sum_cost();
        let mc = criterion.max_cost();
        ReportDocument {
            version: FORMAT_VERSION,
            class: report.class.to_string(),
            agents: report.agents,
            symmetric: report.symmetric,
            feasible_profiles: report.feasible_profiles,
            criterion,
            optima: Optima {
                sum_cost: sc.then(|| OptimumDoc::of(&report.optimum_sc)),
                max_cost: mc.then(|| OptimumDoc::of(&report.optimum_mc)),
            },
            equilibria: EquilibriaDoc {
                count: report.equilibria.len(),
                distinct: report
                    .equilibria
                    .distinct()
                    .into_iter()
                    .map(|(m, k)| EquilibriumDoc::of(m, k))
                    .collect(),
            },
            ratios: Ratios {
                poa_sc: sc.then(|| RatioDoc::of(&report.poa_sc)),
                pos_sc: sc.then(|| RatioDoc::of(&report.pos_sc)),
                poa_mc: mc.then(|| RatioDoc::of(&report.poa_mc)),
                pos_mc: mc.then(|| RatioDoc::of(&report.pos_mc)),
            },
            verdicts: report
                .verdicts
                .iter()
                .filter(|v| criterion.covers(&v.tag))
                .map(VerdictDoc::of)
                .collect(),
            dynamics: None,
            seed: None,
            volatile: None,
        }
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepDoc {
    pub agent: usize,
    pub old_path: Vec<usize>,
    pub new_path: Vec<usize>,
    pub old_cost: Exact,
    pub new_cost: Exact,
    pub potential: Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub start: Vec<Vec<usize>>,
    pub start_potential: Exact,
    pub steps: Vec<StepDoc>,
    pub terminal: Vec<Vec<usize>>,
    pub terminal_potential: Exact,
    pub terminal_sum_cost: ValueDoc,
    pub terminal_max_cost: ValueDoc,
    pub terminal_is_nash: bool,
}

impl TraceDocument {
    pub fn from_trace(instance: &GameInstance, trace: &DynamicsTrace) -> Self {
        TraceDocument {
            start: profile_ids(&trace.start),
            start_potential: Exact(trace.start_potential.clone()),
            steps: trace
                .steps
                .iter()
                .map(|s| StepDoc {
                    agent: s.agent,
                    old_path: edge_ids(&s.old_path),
                    new_path: edge_ids(&s.new_path),
                    old_cost: Exact(s.old_cost.clone()),
                    new_cost: Exact(s.new_cost.clone()),
                    potential: Exact(s.potential_after.clone()),
                })
                .collect(),
            terminal: profile_ids(&trace.terminal),
            terminal_potential: Exact(trace.terminal_potential().clone()),
            terminal_sum_cost: ValueDoc::of_cost(&sum_cost(instance, &trace.terminal)),
            terminal_max_cost: ValueDoc::of_cost(&max_cost(instance, &trace.terminal)),
            terminal_is_nash: is_nash(instance, &trace.terminal),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{compute_ratios, EnumerationLimits};
    use crate::instances::{fig2_dag, fig3_parallel, random_asymmetric, two_link, RandomDagParams};
    use crate::rational::{int, ratio};

    fn round_trip(instance: &GameInstance, recipe: Option<InstanceRecipe>) {
        let doc = InstanceDocument::from_instance(instance, recipe);
        let text = doc.to_json();
        let parsed = InstanceDocument::parse(&text).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(parsed.to_json(), text);
        assert_eq!(&parsed.to_instance().unwrap(), instance);
    }

    #[test]
    fn round_trips() {
        round_trip(&two_link(5), Some(InstanceRecipe::TwoLink { n: 5 }));
        round_trip(&fig2_dag(int(1), int(2)).unwrap(), None);
        round_trip(&fig3_parallel(4, ratio(1, 100)).unwrap(), None);
        let params = RandomDagParams { seed: 9, agents: 3, ..Default::default() };
        round_trip(&random_asymmetric(&params).unwrap(), Some(InstanceRecipe::RandomDag(params)));
    }

    #[test]
    fn fig3_threshold_table() {
        let doc = InstanceDocument::from_instance(&fig3_parallel(4, ratio(1, 100)).unwrap(), None);
        let last = doc.edges.last().unwrap();
        match &last.scheme {
            SchemeDoc::Table { table } => {
                assert_eq!(table.len(), 4);
                assert_eq!(table[3].0, ratio(101, 400));
            }
            other => panic!("expected a table, got {other:?}"),
        }
        assert_eq!(doc.edges[0].scheme, SchemeDoc::Named("ordinary".into()));
    }

    #[test]
    fn rejects_bad_documents() {
        let good = InstanceDocument::from_instance(&two_link(2), None).to_json();
        let zero_den = good.replace("\"2/1\"", "\"1/0\"");
        assert!(matches!(InstanceDocument::parse(&zero_den), Err(Error::Parse(_))));
        let unknown = good.replace("\"ordinary\"", "\"fancy\"");
        assert!(InstanceDocument::parse(&unknown).unwrap().to_instance().is_err());
        let mut doc = InstanceDocument::parse(&good).unwrap();
        doc.edges.swap(0, 1);
        assert!(matches!(doc.to_instance(), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn report_is_stable_and_tagged() {
        let g = two_link(5);
        let report = compute_ratios(&g, EnumerationLimits::default()).unwrap();
        let a = ReportDocument::from_report(&report, CriterionSelection::Both).to_json();
        let b = ReportDocument::from_report(&report, CriterionSelection::Both).to_json();
        assert_eq!(a, b);
        let doc = ReportDocument::from_report(&report, CriterionSelection::Both);
        assert_eq!(doc.ratios.poa_sc.as_ref().unwrap().exact, "5/1");
        assert!(doc.verdicts.iter().any(|v| v.tag == "Thm5:PoA_sc<=n" && v.holds));
        let sc_only = ReportDocument::from_report(&report, CriterionSelection::Sc);
        assert!(sc_only.ratios.poa_mc.is_none());
        assert!(sc_only.verdicts.iter().all(|v| !v.tag.contains("_mc")));
    }

    #[test]
    fn profile_documents() {
        let g = two_link(2);
        let doc = ProfileDocument::parse(r#"{"paths": [[0], [1]]}"#).unwrap();
        let profile = doc.to_profile(&g).unwrap();
        assert_eq!(ProfileDocument::from_profile(&profile), doc);
        let bad = ProfileDocument { paths: vec![vec![7], vec![0]] };
        assert!(matches!(bad.to_profile(&g), Err(Error::InvalidProfile(_))));
    }
}
