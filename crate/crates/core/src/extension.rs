//! Extending a partial profile by one more agent using only edges of a
//! larger profile.
//!
//! Both profiles are read as integral flows. On a series-parallel graph a
//! flow of value `k` dominates a flow of value `r < k` edgewise along some
//! source-sink path, so a forward-only augmenting path exists in the network
//! restricted to the larger profile's edges with capacities
//! `min(c_e, x_e(big))`.

use crate::error::{Error, Result};
use crate::flow::residual_bfs;
use crate::game::{GameInstance, StrategyProfile};
use crate::graph::{classify, Path};

/// A source-sink path inside `E(big)` that `small` can absorb without
/// exceeding any capacity.
pub fn feasible_extension(
    instance: &GameInstance,
    big: &StrategyProfile,
    small: &StrategyProfile,
) -> Result<Path> {
    let graph = instance.graph();
    if !classify(graph).is_series_parallel() {
        return Err(Error::NotSeriesParallel);
    }
    if small.agent_count() >= big.agent_count() {
        return Err(Error::ParameterViolation(format!(
            "small profile has {} agents, big profile {}",
            small.agent_count(),
            big.agent_count()
        )));
    }
    for profile in [big, small] {
        for path in profile.paths() {
            graph.check_path(path, graph.source(), graph.sink())?;
        }
        if profile.loads().len() != graph.edge_count()
            || !crate::game::is_feasible(instance, profile)
        {
            return Err(Error::InfeasibleProfile);
        }
    }
    let room: Vec<u32> = (0..graph.edge_count())
        .map(|e| instance.capacity(crate::graph::EdgeId(e)).min(big.loads()[e]))
        .collect();
    let arcs = residual_bfs(graph, graph.source(), graph.sink(), |arc| {
        arc.forward && small.loads()[arc.edge.0] < room[arc.edge.0]
    })
    .ok_or(Error::NoExtension)?;
    Ok(arcs.into_iter().map(|arc| arc.edge).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::is_feasible;
    use crate::graph::EdgeId;
    use crate::instances::{fig2_dag, two_link};
    use crate::rational::int;

    #[test]
    fn two_link_all_expensive() {
        let n = 4;
        let g = two_link(n);
        let big = StrategyProfile::new(&g, vec![vec![EdgeId(1)]; n as usize]).unwrap();
        let small = StrategyProfile::from_st_paths(g.graph(), vec![]).unwrap();
        assert_eq!(feasible_extension(&g, &big, &small).unwrap(), vec![EdgeId(1)]);
    }

    #[test]
    fn big_is_small_plus_one() {
        let g = two_link(3);
        let small = StrategyProfile::from_st_paths(g.graph(), vec![vec![EdgeId(0)], vec![EdgeId(0)]]).unwrap();
        let big = StrategyProfile::from_st_paths(
            g.graph(),
            vec![vec![EdgeId(0)], vec![EdgeId(0)], vec![EdgeId(1)]],
        )
        .unwrap();
        let path = feasible_extension(&g, &big, &small).unwrap();
        let mut paths = small.paths().to_vec();
        paths.push(path);
        let combined = StrategyProfile::from_st_paths(g.graph(), paths).unwrap();
        assert!(is_feasible(&g, &combined));
    }

    #[test]
    fn rejects_non_series_parallel() {
        let g = fig2_dag(int(1), int(2)).unwrap();
        let big = StrategyProfile::from_st_paths(g.graph(), vec![vec![EdgeId(1), EdgeId(5)]]).unwrap();
        let small = StrategyProfile::from_st_paths(g.graph(), vec![]).unwrap();
        assert_eq!(feasible_extension(&g, &big, &small), Err(Error::NotSeriesParallel));
    }

    #[test]
    fn rejects_overloaded_profiles() {
        let g = two_link(1);
        let small = StrategyProfile::from_st_paths(g.graph(), vec![vec![EdgeId(0)]; 2]).unwrap();
        let big = StrategyProfile::from_st_paths(g.graph(), vec![vec![EdgeId(1)]; 3]).unwrap();
        assert_eq!(feasible_extension(&g, &big, &small), Err(Error::InfeasibleProfile));
    }
}
