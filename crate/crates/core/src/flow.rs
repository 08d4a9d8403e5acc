//! Integral flows, residual networks and augmenting paths.
//!
//! Every search scans arcs in increasing edge-id order, so results are
//! reproducible for a given graph.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId, Path};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flow {
    /// Flow on each edge, indexed by edge id.
    pub values: Vec<u32>,
    /// Net flow leaving the source.
    pub value: u32,
}

impl Flow {
    pub fn zero(graph: &Graph) -> Self {
        Flow { values: vec![0; graph.edge_count()], value: 0 }
    }

    /// Superposition of unit paths, e.g. the load vector of a strategy profile.
    pub fn from_paths<'a>(graph: &Graph, paths: impl IntoIterator<Item = &'a Path>) -> Self {
        let mut flow = Flow::zero(graph);
        for path in paths {
            for id in path {
                flow.values[id.0] += 1;
            }
            flow.value += 1;
        }
        flow
    }
}

/// One arc of the residual network: an edge traversed along its direction
/// (room left below capacity) or against it (positive flow to cancel).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidualArc {
    pub edge: EdgeId,
    pub forward: bool,
}

impl ResidualArc {
    fn endpoints(&self, graph: &Graph) -> (NodeId, NodeId) {
        let e = graph.edge(self.edge);
        if self.forward {
            (e.tail, e.head)
        } else {
            (e.head, e.tail)
        }
    }
}

/// Checks capacity bounds and conservation for a single-commodity flow of
/// `flow.value` units from `source` to `sink`.
pub fn check_flow(
    graph: &Graph,
    capacities: &[u32],
    flow: &Flow,
    source: NodeId,
    sink: NodeId,
) -> Result<()> {
    if capacities.len() != graph.edge_count() || flow.values.len() != graph.edge_count() {
        return Err(Error::InfeasibleFlow("vector length does not match edge count".into()));
    }
    for (i, (&f, &c)) in flow.values.iter().zip(capacities).enumerate() {
        if f > c {
            return Err(Error::InfeasibleFlow(format!("edge {i} carries {f} > capacity {c}")));
        }
    }
    let mut net = vec![0i64; graph.node_count()];
    for edge in graph.edges() {
        let f = i64::from(flow.values[edge.id.0]);
        net[edge.tail.0] -= f;
        net[edge.head.0] += f;
    }
    let value = i64::from(flow.value);
    for node in graph.nodes() {
        let expected = if source == sink {
            0
        } else if node == source {
            -value
        } else if node == sink {
            value
        } else {
            0
        };
        if net[node.0] != expected {
            return Err(Error::InfeasibleFlow(format!(
                "conservation fails at node {:?}",
                graph.label(node)
            )));
        }
    }
    Ok(())
}

/// Breadth-first search for an augmenting path in the residual network of
/// `flow`. Returns `None` when the flow is maximum.
pub fn augmenting_path(
    graph: &Graph,
    capacities: &[u32],
    flow: &Flow,
    source: NodeId,
    sink: NodeId,
) -> Result<Option<Vec<ResidualArc>>> {
    check_flow(graph, capacities, flow, source, sink)?;
    Ok(residual_bfs(graph, source, sink, |arc| {
        let f = flow.values[arc.edge.0];
        if arc.forward {
            f < capacities[arc.edge.0]
        } else {
            f > 0
        }
    }))
}

/// BFS over residual arcs accepted by `usable`. Arcs at a node are scanned
/// in edge-id order.
pub(crate) fn residual_bfs(
    graph: &Graph,
    source: NodeId,
    sink: NodeId,
    usable: impl Fn(&ResidualArc) -> bool,
) -> Option<Vec<ResidualArc>> {
    if source == sink {
        return None;
    }
    let mut parent: Vec<Option<ResidualArc>> = vec![None; graph.node_count()];
    let mut seen = vec![false; graph.node_count()];
    seen[source.0] = true;
    let mut queue = VecDeque::from([source]);
    while let Some(at) = queue.pop_front() {
        let mut arcs: Vec<ResidualArc> = graph
            .out_edges(at)
            .iter()
            .map(|&edge| ResidualArc { edge, forward: true })
            .chain(graph.in_edges(at).iter().map(|&edge| ResidualArc { edge, forward: false }))
            .collect();
        arcs.sort_by_key(|a| (a.edge, !a.forward));
        for arc in arcs {
            if !usable(&arc) {
                continue;
            }
            let (_, next) = arc.endpoints(graph);
            if seen[next.0] {
                continue;
            }
            seen[next.0] = true;
            parent[next.0] = Some(arc);
            if next == sink {
                let mut path = Vec::new();
                let mut node = sink;
                while node != source {
                    let arc = parent[node.0].expect("bfs tree is connected");
                    path.push(arc);
                    node = arc.endpoints(graph).0;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(next);
        }
    }
    None
}

/// Pushes one unit along `path`.
pub fn augment(flow: &mut Flow, path: &[ResidualArc]) {
    for arc in path {
        if arc.forward {
            flow.values[arc.edge.0] += 1;
        } else {
            flow.values[arc.edge.0] -= 1;
        }
    }
    flow.value += 1;
}

/// Integral maximum flow by repeated shortest augmenting paths.
pub fn max_flow(graph: &Graph, capacities: &[u32], source: NodeId, sink: NodeId) -> Flow {
    assert_eq!(capacities.len(), graph.edge_count(), "one capacity per edge");
    let mut flow = Flow::zero(graph);
    while let Some(path) = residual_bfs(graph, source, sink, |arc| {
        let f = flow.values[arc.edge.0];
        if arc.forward {
            f < capacities[arc.edge.0]
        } else {
            f > 0
        }
    }) {
        let bottleneck = path
            .iter()
            .map(|arc| {
                let f = flow.values[arc.edge.0];
                if arc.forward {
                    capacities[arc.edge.0] - f
                } else {
                    f
                }
            })
            .min()
            .expect("augmenting paths are nonempty");
        for arc in &path {
            if arc.forward {
                flow.values[arc.edge.0] += bottleneck;
            } else {
                flow.values[arc.edge.0] -= bottleneck;
            }
        }
        flow.value += bottleneck;
    }
    flow
}

/// Splits a conserving flow into `flow.value` unit source-sink paths, always
/// following the lowest-id edge that still carries flow. Circulations met
/// along the way are cancelled and dropped.
pub fn decompose(graph: &Graph, flow: &Flow, source: NodeId, sink: NodeId) -> Result<Vec<Path>> {
    let mut rest = flow.values.clone();
    let mut paths = Vec::with_capacity(flow.value as usize);
    while paths.len() < flow.value as usize {
        let mut position: Vec<Option<usize>> = vec![None; graph.node_count()];
        let mut walk: Path = Vec::new();
        let mut at = source;
        position[at.0] = Some(0);
        while at != sink {
            let next = graph
                .out_edges(at)
                .iter()
                .copied()
                .find(|id| rest[id.0] > 0)
                .ok_or_else(|| {
                    Error::InfeasibleFlow(format!(
                        "flow stops at node {:?} during decomposition",
                        graph.label(at)
                    ))
                })?;
            walk.push(next);
            at = graph.edge(next).head;
            if let Some(start) = position[at.0] {
                // Cancel the cycle walk[start..] and continue from its entry.
                for id in walk.drain(start..) {
                    rest[id.0] -= 1;
                }
                for slot in position.iter_mut() {
                    if matches!(*slot, Some(p) if p > start) {
                        *slot = None;
                    }
                }
            } else {
                position[at.0] = Some(walk.len());
            }
        }
        for id in &walk {
            rest[id.0] -= 1;
        }
        paths.push(walk);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_from_sp, SpExpr};

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn diamond_dag() -> Graph {
        let n = |i| NodeId(i);
        Graph::new(
            labels(&["s", "a", "b", "c", "t"]),
            &[
                (n(0), n(1)),
                (n(0), n(2)),
                (n(1), n(3)),
                (n(1), n(2)),
                (n(2), n(3)),
                (n(2), n(4)),
                (n(3), n(4)),
            ],
            n(0),
            n(4),
        )
        .unwrap()
    }

    #[test]
    fn diamond_unit_capacity_max_flow() {
        let g = diamond_dag();
        let flow = max_flow(&g, &[1; 7], g.source(), g.sink());
        assert_eq!(flow.value, 2);
        check_flow(&g, &[1; 7], &flow, g.source(), g.sink()).unwrap();
    }

    #[test]
    fn parallel_pair_max_flow() {
        let g = build_from_sp(&SpExpr::parallel(SpExpr::Edge, SpExpr::Edge));
        assert_eq!(max_flow(&g, &[5, 5], g.source(), g.sink()).value, 10);
    }

    #[test]
    fn unreachable_sink_zero_flow() {
        let n = |i| NodeId(i);
        let g = Graph::new(labels(&["s", "a", "t"]), &[(n(0), n(1))], n(0), n(2)).unwrap();
        assert_eq!(max_flow(&g, &[3], g.source(), g.sink()).value, 0);
    }

    #[test]
    fn augmenting_on_single_edge() {
        let g = build_from_sp(&SpExpr::Edge);
        let zero = Flow::zero(&g);
        let path = augmenting_path(&g, &[1], &zero, g.source(), g.sink()).unwrap().unwrap();
        assert_eq!(path, vec![ResidualArc { edge: EdgeId(0), forward: true }]);

        let full = Flow { values: vec![1], value: 1 };
        assert_eq!(augmenting_path(&g, &[1], &full, g.source(), g.sink()).unwrap(), None);
    }

    #[test]
    fn augmenting_rejects_infeasible_flow() {
        let g = build_from_sp(&SpExpr::Edge);
        let over = Flow { values: vec![2], value: 2 };
        assert!(matches!(
            augmenting_path(&g, &[1], &over, g.source(), g.sink()),
            Err(Error::InfeasibleFlow(_))
        ));
        let leaky = Flow { values: vec![1], value: 0 };
        assert!(augmenting_path(&g, &[1], &leaky, g.source(), g.sink()).is_err());
    }

    #[test]
    fn augmenting_path_uses_backward_arc() {
        // Classic crossing: the greedy path s-a-b-t blocks both short routes.
        let n = |i| NodeId(i);
        let g = Graph::new(
            labels(&["s", "a", "b", "t"]),
            &[(n(0), n(1)), (n(0), n(2)), (n(1), n(2)), (n(1), n(3)), (n(2), n(3))],
            n(0),
            n(3),
        )
        .unwrap();
        let caps = [1; 5];
        let flow = Flow { values: vec![1, 0, 1, 0, 1], value: 1 };
        let path = augmenting_path(&g, &caps, &flow, g.source(), g.sink()).unwrap().unwrap();
        assert!(path.contains(&ResidualArc { edge: EdgeId(2), forward: false }));
        let mut next = flow.clone();
        augment(&mut next, &path);
        check_flow(&g, &caps, &next, g.source(), g.sink()).unwrap();
        assert_eq!(next.value, 2);
        let mut paths = decompose(&g, &next, g.source(), g.sink()).unwrap();
        paths.sort();
        assert_eq!(paths, vec![vec![EdgeId(0), EdgeId(3)], vec![EdgeId(1), EdgeId(4)]]);
    }

    #[test]
    fn decomposition_drops_cycles() {
        let n = |i| NodeId(i);
        let g = Graph::new(
            labels(&["s", "a", "b", "t"]),
            &[(n(0), n(1)), (n(1), n(2)), (n(2), n(1)), (n(1), n(3))],
            n(0),
            n(3),
        )
        .unwrap();
        let flow = Flow { values: vec![1, 1, 1, 1], value: 1 };
        check_flow(&g, &[1; 4], &flow, g.source(), g.sink()).unwrap();
        let paths = decompose(&g, &flow, g.source(), g.sink()).unwrap();
        assert_eq!(paths, vec![vec![EdgeId(0), EdgeId(3)]]);
    }
}
