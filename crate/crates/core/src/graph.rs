//! Directed multigraphs with designated terminals, series-parallel
//! construction and recognition, and simple-path enumeration.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the number of simple paths enumerated per terminal pair.
pub const DEFAULT_PATH_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A path given as its edge sequence.
pub type Path = Vec<EdgeId>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: NodeId,
    pub head: NodeId,
}

/// Immutable directed multigraph. Edge ids are dense and equal to the
/// position of the edge in [`Graph::edges`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
    source: NodeId,
    sink: NodeId,
}

impl Graph {
    /// Builds a graph from node labels and `(tail, head)` pairs. Self-loops
    /// are rejected.
    pub fn new(
        labels: Vec<String>,
        arcs: &[(NodeId, NodeId)],
        source: NodeId,
        sink: NodeId,
    ) -> Result<Self> {
        Self::build(labels, arcs, source, sink, false)
    }

    pub fn new_allowing_self_loops(
        labels: Vec<String>,
        arcs: &[(NodeId, NodeId)],
        source: NodeId,
        sink: NodeId,
    ) -> Result<Self> {
        Self::build(labels, arcs, source, sink, true)
    }

    fn build(
        labels: Vec<String>,
        arcs: &[(NodeId, NodeId)],
        source: NodeId,
        sink: NodeId,
        allow_self_loops: bool,
    ) -> Result<Self> {
        let node_count = labels.len();
        let mut seen = HashMap::new();
        for (index, label) in labels.iter().enumerate() {
            if let Some(prev) = seen.insert(label.as_str(), index) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate node label {label:?} at {prev} and {index}"
                )));
            }
        }
        for terminal in [source, sink] {
            if terminal.0 >= node_count {
                return Err(Error::InvalidGraph(format!("terminal {terminal} out of range")));
            }
        }
        let mut edges = Vec::with_capacity(arcs.len());
        let mut out_edges = vec![Vec::new(); node_count];
        let mut in_edges = vec![Vec::new(); node_count];
        for (index, &(tail, head)) in arcs.iter().enumerate() {
            if tail.0 >= node_count || head.0 >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge {index} references a missing node"
                )));
            }
            if tail == head && !allow_self_loops {
                return Err(Error::InvalidGraph(format!("edge {index} is a self-loop")));
            }
            let id = EdgeId(index);
            edges.push(Edge { id, tail, head });
            out_edges[tail.0].push(id);
            in_edges[head.0].push(id);
        }
        Ok(Graph { labels, edges, out_edges, in_edges, source, sink })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.labels.len()).map(NodeId)
    }

    /// Outgoing edges of `node`, in increasing id order.
    pub fn out_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.out_edges[node.0]
    }

    /// Incoming edges of `node`, in increasing id order.
    pub fn in_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.in_edges[node.0]
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.labels.iter().position(|l| l == label).map(NodeId)
    }

    /// Checks that `path` is a simple directed path from `from` to `to`.
    pub fn check_path(&self, path: &[EdgeId], from: NodeId, to: NodeId) -> Result<()> {
        let mut visited = vec![false; self.node_count()];
        let mut at = from;
        visited[at.0] = true;
        for &id in path {
            let edge = self
                .edges
                .get(id.0)
                .ok_or_else(|| Error::InvalidProfile(format!("unknown edge {id}")))?;
            if edge.tail != at {
                return Err(Error::InvalidProfile(format!(
                    "edge {id} does not continue the path at node {:?}",
                    self.label(at)
                )));
            }
            at = edge.head;
            if visited[at.0] {
                return Err(Error::InvalidProfile(format!(
                    "path revisits node {:?}",
                    self.label(at)
                )));
            }
            visited[at.0] = true;
        }
        if at != to {
            return Err(Error::InvalidProfile(format!(
                "path ends at {:?} instead of {:?}",
                self.label(at),
                self.label(to)
            )));
        }
        Ok(())
    }

    /// The same graph with edges reordered: edge `i` of the result is edge
    /// `order[i]` of `self`.
    pub fn permute_edges(&self, order: &[usize]) -> Result<Graph> {
        if order.len() != self.edge_count() {
            return Err(Error::InvalidGraph("permutation length mismatch".into()));
        }
        let arcs: Vec<_> = order
            .iter()
            .map(|&i| (self.edges[i].tail, self.edges[i].head))
            .collect();
        Self::build(self.labels.clone(), &arcs, self.source, self.sink, true)
    }

    pub fn has_cycle(&self) -> bool {
        topological_order(self).is_none()
    }
}

/// Kahn's algorithm; `None` when the graph has a directed cycle.
pub fn topological_order(graph: &Graph) -> Option<Vec<NodeId>> {
    let mut indegree: Vec<usize> = graph.nodes().map(|v| graph.in_edges(v).len()).collect();
    let mut ready: Vec<NodeId> = graph.nodes().filter(|v| indegree[v.0] == 0).collect();
    ready.reverse();
    let mut order = Vec::with_capacity(graph.node_count());
    while let Some(node) = ready.pop() {
        order.push(node);
        for &id in graph.out_edges(node) {
            let head = graph.edge(id).head;
            indegree[head.0] -= 1;
            if indegree[head.0] == 0 {
                ready.push(head);
            }
        }
    }
    (order.len() == graph.node_count()).then_some(order)
}

/// Expression tree over single edges, series and parallel composition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpExpr {
    Edge,
    Series(Box<SpExpr>, Box<SpExpr>),
    Parallel(Box<SpExpr>, Box<SpExpr>),
}

impl SpExpr {
    pub fn series(left: SpExpr, right: SpExpr) -> SpExpr {
        SpExpr::Series(Box::new(left), Box::new(right))
    }

    pub fn parallel(left: SpExpr, right: SpExpr) -> SpExpr {
        SpExpr::Parallel(Box::new(left), Box::new(right))
    }

    pub fn edge_count(&self) -> usize {
        match self {
            SpExpr::Edge => 1,
            SpExpr::Series(l, r) | SpExpr::Parallel(l, r) => l.edge_count() + r.edge_count(),
        }
    }
}

/// Evaluates the expression into a two-terminal graph. The source is node 0,
/// the sink node 1; the junction node of every series composition gets the
/// next id in pre-order, and edges are numbered left to right.
pub fn build_from_sp(expr: &SpExpr) -> Graph {
    fn walk(
        expr: &SpExpr,
        from: NodeId,
        to: NodeId,
        next_node: &mut usize,
        arcs: &mut Vec<(NodeId, NodeId)>,
    ) {
        match expr {
            SpExpr::Edge => arcs.push((from, to)),
            SpExpr::Series(left, right) => {
                let mid = NodeId(*next_node);
                *next_node += 1;
                walk(left, from, mid, next_node, arcs);
                walk(right, mid, to, next_node, arcs);
            }
            SpExpr::Parallel(left, right) => {
                walk(left, from, to, next_node, arcs);
                walk(right, from, to, next_node, arcs);
            }
        }
    }

    let mut next_node = 2;
    let mut arcs = Vec::with_capacity(expr.edge_count());
    walk(expr, NodeId(0), NodeId(1), &mut next_node, &mut arcs);
    let labels = (0..next_node)
        .map(|i| match i {
            0 => "s".to_string(),
            1 => "t".to_string(),
            _ => format!("v{i}"),
        })
        .collect();
    Graph::new(labels, &arcs, NodeId(0), NodeId(1)).expect("series-parallel construction is total")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GraphClass {
    ParallelLink,
    SeriesParallel,
    Dag,
    General,
}

impl GraphClass {
    pub fn is_series_parallel(self) -> bool {
        matches!(self, GraphClass::ParallelLink | GraphClass::SeriesParallel)
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GraphClass::ParallelLink => "ParallelLink",
            GraphClass::SeriesParallel => "SeriesParallel",
            GraphClass::Dag => "Dag",
            GraphClass::General => "General",
        };
        f.write_str(name)
    }
}

/// Most restrictive class of the graph with respect to its designated
/// terminals.
pub fn classify(graph: &Graph) -> GraphClass {
    if graph.has_cycle() {
        return GraphClass::General;
    }
    if !reduces_to_single_edge(graph) {
        return GraphClass::Dag;
    }
    let parallel_only = graph
        .edges()
        .iter()
        .all(|e| e.tail == graph.source() && e.head == graph.sink());
    if parallel_only {
        GraphClass::ParallelLink
    } else {
        GraphClass::SeriesParallel
    }
}

/// Series/parallel reduction to a fixpoint: merge parallel edges, splice out
/// inner nodes with one incoming and one outgoing edge. The graph is
/// two-terminal series-parallel iff a single source-to-sink edge remains and
/// every node took part.
fn reduces_to_single_edge(graph: &Graph) -> bool {
    let (s, t) = (graph.source(), graph.sink());
    if s == t || graph.edge_count() == 0 {
        return false;
    }
    if graph
        .nodes()
        .any(|v| graph.in_edges(v).is_empty() && graph.out_edges(v).is_empty())
    {
        return false;
    }

    // Multiset of arcs keyed by (tail, head); parallel reduction is implicit.
    let mut arcs: BTreeMap<(usize, usize), ()> = graph
        .edges()
        .iter()
        .map(|e| ((e.tail.0, e.head.0), ()))
        .collect();
    loop {
        let mut outs: Vec<Vec<usize>> = vec![Vec::new(); graph.node_count()];
        let mut ins: Vec<Vec<usize>> = vec![Vec::new(); graph.node_count()];
        for &(u, v) in arcs.keys() {
            outs[u].push(v);
            ins[v].push(u);
        }
        let splice = graph
            .nodes()
            .map(|v| v.0)
            .find(|&v| v != s.0 && v != t.0 && ins[v].len() == 1 && outs[v].len() == 1);
        match splice {
            Some(v) => {
                let (u, w) = (ins[v][0], outs[v][0]);
                arcs.remove(&(u, v));
                arcs.remove(&(v, w));
                arcs.insert((u, w), ());
            }
            None => break,
        }
    }
    arcs.len() == 1 && arcs.contains_key(&(s.0, t.0))
}

/// All simple directed paths from `from` to `to`, in lexicographic order of
/// their edge-id sequences. Fails with `PathExplosion` once more than `cap`
/// paths exist.
pub fn enumerate_st_paths(
    graph: &Graph,
    from: NodeId,
    to: NodeId,
    cap: usize,
) -> Result<Vec<Path>> {
    fn dfs(
        graph: &Graph,
        at: NodeId,
        to: NodeId,
        cap: usize,
        visited: &mut [bool],
        prefix: &mut Path,
        out: &mut Vec<Path>,
    ) -> Result<()> {
        if at == to {
            if out.len() == cap {
                return Err(Error::PathExplosion { cap, count: cap + 1 });
            }
            out.push(prefix.clone());
            return Ok(());
        }
        for &id in graph.out_edges(at) {
            let head = graph.edge(id).head;
            if visited[head.0] {
                continue;
            }
            visited[head.0] = true;
            prefix.push(id);
            dfs(graph, head, to, cap, visited, prefix, out)?;
            prefix.pop();
            visited[head.0] = false;
        }
        Ok(())
    }

    let mut visited = vec![false; graph.node_count()];
    visited[from.0] = true;
    let mut out = Vec::new();
    dfs(graph, from, to, cap.max(1), &mut visited, &mut Vec::new(), &mut out)?;
    Ok(out)
}
