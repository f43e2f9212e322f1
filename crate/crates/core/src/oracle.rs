//! Exhaustive ground-truth solvers for desk-scale instances.
//!
//! Nothing here touches the flow code: feasibility is decided by the
//! connectivity oracles only in [`brute_force_opt`], and the path and
//! separator enumerators use plain depth-first search and reachability.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectivity::{is_feasible, original_thresholds, DisjointPathSet, Path};
use crate::graph::{EdgeId, GraphView, VertexId};
use crate::instance::{Instance, Removal, Semantics};

pub const DEFAULT_SIZE_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{items} candidate items exceed the oracle cap of {cap}")]
    TooLarge { items: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub cost: f64,
    /// One optimal removal set, ascending item ids.
    pub set: Vec<usize>,
    pub optimal_count: usize,
    pub explored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OracleOutcome {
    Optimal(OracleResult),
    /// Even removing every removable item leaves some demand at threshold.
    Infeasible {
        explored: usize,
    },
}

impl OracleOutcome {
    pub fn cost(&self) -> Option<f64> {
        match self {
            OracleOutcome::Optimal(r) => Some(r.cost),
            OracleOutcome::Infeasible { .. } => None,
        }
    }
}

#[derive(Debug, PartialEq)]
struct Frontier {
    sum: f64,
    mask: u64,
    last: usize,
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other.sum.total_cmp(&self.sum).then_with(|| other.mask.cmp(&self.mask))
    }
}

/// Exact minimum-cost cut at the instance's own thresholds.
pub fn brute_force_opt(instance: &Instance, cap: usize) -> Result<OracleOutcome, OracleError> {
    brute_force_opt_at(instance, &original_thresholds(instance), cap)
}

/// Exact minimum-cost cut at `thresholds`. Subsets of removable items are
/// visited best-first in nondecreasing cost, so the first feasible subset is
/// optimal; the search then drains every subset of equal cost to count ties.
pub fn brute_force_opt_at(instance: &Instance, thresholds: &[u32], cap: usize) -> Result<OracleOutcome, OracleError> {
    let mut items: Vec<usize> = match instance.removal() {
        Removal::Edge => (0..instance.item_count()).collect(),
        Removal::Vertex => (0..instance.item_count()).filter(|&v| instance.is_removable(v)).collect(),
    };
    if items.len() > cap.min(63) {
        return Err(OracleError::TooLarge { items: items.len(), cap });
    }
    let costs = instance.costs();
    items.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
    let decode = |mask: u64| -> Vec<usize> {
        let mut set: Vec<usize> = (0..items.len()).filter(|i| mask >> i & 1 == 1).map(|i| items[i]).collect();
        set.sort_unstable();
        set
    };
    if !is_feasible(instance, &items, thresholds) {
        return Ok(OracleOutcome::Infeasible { explored: 1 });
    }
    let exact = instance.has_integral_costs();
    let same_cost = |a: f64, b: f64| if exact { a == b } else { (a - b).abs() <= 1e-9 };

    let mut explored = 0;
    let mut best: Option<(f64, u64)> = None;
    let mut count = 0;
    let mut visit = |sum: f64, mask: u64, explored: &mut usize| -> bool {
        if let Some((c, _)) = best {
            if !same_cost(sum, c) {
                return false;
            }
        }
        *explored += 1;
        if is_feasible(instance, &decode(mask), thresholds) {
            best.get_or_insert((sum, mask));
            count += 1;
        }
        true
    };

    if visit(0.0, 0, &mut explored) && !items.is_empty() {
        let mut heap = BinaryHeap::from([Frontier { sum: costs[items[0]], mask: 1, last: 0 }]);
        while let Some(Frontier { sum, mask, last }) = heap.pop() {
            if !visit(sum, mask, &mut explored) {
                break;
            }
            let next = last + 1;
            if next < items.len() {
                let add = costs[items[next]];
                heap.push(Frontier { sum: sum + add, mask: mask | 1 << next, last: next });
                heap.push(Frontier {
                    sum: sum - costs[items[last]] + add,
                    mask: (mask & !(1 << last)) | 1 << next,
                    last: next,
                });
            }
        }
    }
    let (cost, mask) = best.expect("removing every candidate item is feasible");
    Ok(OracleOutcome::Optimal(OracleResult { cost, set: decode(mask), optimal_count: count, explored }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSetEnumeration {
    /// Each entry is `k` disjoint paths in canonical order.
    pub sets: Vec<Vec<Path>>,
    /// Set when `limit` cut the enumeration short.
    pub partial: bool,
}

impl PathSetEnumeration {
    pub fn with_metric(&self, metric: &[f64]) -> Vec<DisjointPathSet> {
        self.sets.iter().map(|s| DisjointPathSet::new(s.clone(), metric)).collect()
    }

    /// Smallest sum of path lengths over all sets.
    pub fn min_total(&self, metric: &[f64]) -> Option<f64> {
        self.with_metric(metric).iter().map(|s| s.total_length).min_by(f64::total_cmp)
    }

    /// Smallest metric sum over the edge union of a set.
    pub fn min_union(&self, metric: &[f64]) -> Option<f64> {
        self.with_metric(metric).iter().map(|s| s.union_length).min_by(f64::total_cmp)
    }
}

/// All simple `u`–`v` paths over live edges, by DFS in edge-id order.
pub fn simple_paths(view: &GraphView<'_>, u: VertexId, v: VertexId, limit: usize) -> (Vec<Path>, bool) {
    fn dfs(
        view: &GraphView<'_>,
        x: VertexId,
        v: VertexId,
        on_path: &mut Vec<bool>,
        stack: &mut Path,
        out: &mut Vec<Path>,
        limit: usize,
    ) -> bool {
        if x == v {
            out.push(stack.clone());
            return out.len() < limit;
        }
        for (id, y) in view.out_edges(x) {
            if on_path[y] {
                continue;
            }
            on_path[y] = true;
            stack.vertices.push(y);
            stack.edges.push(id);
            let go_on = dfs(view, y, v, on_path, stack, out, limit);
            stack.vertices.pop();
            stack.edges.pop();
            on_path[y] = false;
            if !go_on {
                return false;
            }
        }
        true
    }
    let mut on_path = vec![false; view.vertex_count()];
    on_path[u] = true;
    let mut stack = Path { vertices: vec![u], edges: Vec::new() };
    let mut out = Vec::new();
    let complete = dfs(view, u, v, &mut on_path, &mut stack, &mut out, limit.max(1));
    (out, !complete)
}

/// Every set of `k` pairwise disjoint simple `u`–`v` paths. Edge-disjoint
/// means no edge is used by more paths than its capacity; vertex-disjoint
/// additionally forbids shared interior vertices.
pub fn enumerate_disjoint_path_sets(
    view: &GraphView<'_>,
    semantics: Semantics,
    u: VertexId,
    v: VertexId,
    k: u32,
    limit: usize,
) -> PathSetEnumeration {
    let (mut paths, mut partial) = simple_paths(view, u, v, limit);
    paths.sort_by(|a, b| a.edges.cmp(&b.edges));
    let graph = view.graph();
    let mut sets = Vec::new();
    let mut edge_use = vec![0u32; graph.edge_count()];
    let mut vertex_use = vec![false; graph.vertex_count()];
    let mut chosen = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn extend(
        start: usize,
        k: usize,
        paths: &[Path],
        semantics: Semantics,
        graph: &crate::graph::Graph,
        edge_use: &mut [u32],
        vertex_use: &mut [bool],
        chosen: &mut Vec<usize>,
        sets: &mut Vec<Vec<Path>>,
        limit: usize,
    ) -> bool {
        if chosen.len() == k {
            sets.push(chosen.iter().map(|&i| paths[i].clone()).collect());
            return sets.len() < limit;
        }
        for i in start..paths.len() {
            let p = &paths[i];
            let interior = &p.vertices[1..p.vertices.len() - 1];
            let edges_fit = p.edges.iter().all(|&e| edge_use[e] < graph.edge(e).capacity);
            let vertices_fit = semantics == Semantics::EdgeDisjoint || interior.iter().all(|&w| !vertex_use[w]);
            if !edges_fit || !vertices_fit {
                continue;
            }
            p.edges.iter().for_each(|&e| edge_use[e] += 1);
            if semantics == Semantics::VertexDisjoint {
                interior.iter().for_each(|&w| vertex_use[w] = true);
            }
            chosen.push(i);
            let go_on = extend(i + 1, k, paths, semantics, graph, edge_use, vertex_use, chosen, sets, limit);
            chosen.pop();
            p.edges.iter().for_each(|&e| edge_use[e] -= 1);
            if semantics == Semantics::VertexDisjoint {
                interior.iter().for_each(|&w| vertex_use[w] = false);
            }
            if !go_on {
                return false;
            }
        }
        true
    }

    let complete = extend(
        0,
        k as usize,
        &paths,
        semantics,
        graph,
        &mut edge_use,
        &mut vertex_use,
        &mut chosen,
        &mut sets,
        limit.max(1),
    );
    partial |= !complete;
    PathSetEnumeration { sets, partial }
}

/// Smallest number of removals separating `u` from `v`, by exhaustive search
/// over edge subsets (edge semantics) or vertex subsets plus all direct
/// `u`–`v` edges (vertex semantics). Only for unit-capacity graphs.
pub fn brute_force_separator(view: &GraphView<'_>, semantics: Semantics, u: VertexId, v: VertexId) -> usize {
    let graph = view.graph();
    match semantics {
        Semantics::EdgeDisjoint => {
            let live: Vec<EdgeId> = view.live_edges().map(|(id, _)| id).collect();
            assert!(live.len() < 32, "too many edges for exhaustive search");
            (0u32..1 << live.len())
                .filter(|mask| {
                    let ids: Vec<EdgeId> = (0..live.len()).filter(|i| mask >> i & 1 == 1).map(|i| live[i]).collect();
                    !view.without(&ids).expect("live ids").reachable(u)[v]
                })
                .map(|mask| mask.count_ones() as usize)
                .min()
                .expect("removing all edges separates")
        }
        Semantics::VertexDisjoint => {
            let direct: Vec<EdgeId> = view
                .live_edges()
                .filter(|(_, e)| (e.a == u && e.b == v) || (!e.directed && e.a == v && e.b == u))
                .map(|(id, _)| id)
                .collect();
            let base = view.without(&direct).expect("live ids");
            let others: Vec<VertexId> = (0..graph.vertex_count()).filter(|&w| w != u && w != v).collect();
            (0u32..1 << others.len())
                .filter(|mask| {
                    let gone: Vec<EdgeId> = (0..others.len())
                        .filter(|i| mask >> i & 1 == 1)
                        .flat_map(|i| graph.incident(others[i]).iter().copied())
                        .collect();
                    !base.without(&gone).expect("valid ids").reachable(u)[v]
                })
                .map(|mask| mask.count_ones() as usize + direct.len())
                .min()
                .expect("removing all other vertices separates")
        }
    }
}
