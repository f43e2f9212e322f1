//! Flow-based connectivity oracles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{decompose, selfcheck_enabled, FlowNetwork};
use crate::graph::{EdgeId, GraphView, VertexId};
use crate::instance::{Instance, InstanceError, Semantics};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConnectivityError {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("connectivity query needs distinct endpoints, got {0} twice")]
    SameEndpoints(VertexId),
    #[error("metric entry for edge {edge} is {value}; lengths must be nonnegative")]
    NegativeMetric { edge: EdgeId, value: f64 },
    #[error("metric has {got} entries for {expected} edges")]
    MetricLength { expected: usize, got: usize },
    #[error("path count k must be at least 1")]
    ZeroPaths,
}

fn check_pair(view: &GraphView<'_>, u: VertexId, v: VertexId) -> Result<(), ConnectivityError> {
    let n = view.vertex_count();
    for x in [u, v] {
        if x >= n {
            return Err(ConnectivityError::VertexOutOfRange { vertex: x, n });
        }
    }
    if u == v {
        return Err(ConnectivityError::SameEndpoints(u));
    }
    Ok(())
}

/// Maximum flow value with a minimum-cut witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowResult {
    pub value: u32,
    /// Edges crossing the witness cut.
    pub cut_edges: Vec<EdgeId>,
    /// Vertices whose capacity-one split arc crosses the witness cut
    /// (vertex-disjoint semantics only).
    pub cut_vertices: Vec<VertexId>,
}

/// Max flow from `u` to `v` under `semantics`. Under vertex-disjoint
/// semantics each vertex other than `u` and `v` has capacity one and
/// parallel direct `u`–`v` edges each count as a path.
pub fn max_flow(
    view: &GraphView<'_>,
    semantics: Semantics,
    u: VertexId,
    v: VertexId,
) -> Result<FlowResult, ConnectivityError> {
    check_pair(view, u, v)?;
    let mut net = FlowNetwork::paths(view, semantics, u, v, None);
    let value = net.max_flow(f64::INFINITY);
    if selfcheck_enabled() {
        net.check_cut(value);
    }
    let mut cut_edges = Vec::new();
    let mut cut_vertices = Vec::new();
    for a in net.cut_arcs() {
        let arc = &net.arcs[a];
        match (arc.edge, arc.vertex) {
            (Some(id), _) => cut_edges.push(id),
            (None, Some(w)) => cut_vertices.push(w),
            (None, None) => {}
        }
    }
    cut_edges.sort_unstable();
    cut_edges.dedup();
    Ok(FlowResult { value: value.round() as u32, cut_edges, cut_vertices })
}

/// Number of `semantics`-disjoint `u`–`v` paths.
pub fn connectivity(
    view: &GraphView<'_>,
    semantics: Semantics,
    u: VertexId,
    v: VertexId,
) -> Result<u32, ConnectivityError> {
    max_flow(view, semantics, u, v).map(|r| r.value)
}

/// Whether at least `k` disjoint paths exist; stops the flow early.
pub fn has_paths(
    view: &GraphView<'_>,
    semantics: Semantics,
    u: VertexId,
    v: VertexId,
    k: u32,
) -> Result<bool, ConnectivityError> {
    check_pair(view, u, v)?;
    let mut net = FlowNetwork::paths(view, semantics, u, v, None);
    Ok(net.max_flow(k as f64) >= k as f64 - 0.5)
}

/// Maximum number of pairwise edge-disjoint `u`–`v` paths.
pub fn edge_connectivity(view: &GraphView<'_>, u: VertexId, v: VertexId) -> Result<u32, ConnectivityError> {
    connectivity(view, Semantics::EdgeDisjoint, u, v)
}

/// Maximum number of internally vertex-disjoint `u`–`v` paths.
pub fn vertex_connectivity(view: &GraphView<'_>, u: VertexId, v: VertexId) -> Result<u32, ConnectivityError> {
    connectivity(view, Semantics::VertexDisjoint, u, v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

/// `k` disjoint paths between one pair, with their lengths under a metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjointPathSet {
    pub paths: Vec<Path>,
    /// Distinct edge ids used by any path, ascending.
    pub union: Vec<EdgeId>,
    /// Sum of path lengths.
    pub total_length: f64,
    /// Sum of metric values over `union`; equals `total_length` unless some
    /// edge has capacity above one and is shared.
    pub union_length: f64,
}

impl DisjointPathSet {
    pub fn new(paths: Vec<Path>, metric: &[f64]) -> Self {
        let total_length = paths.iter().flat_map(|p| &p.edges).map(|&e| metric[e]).sum();
        let mut union: Vec<EdgeId> = paths.iter().flat_map(|p| p.edges.iter().copied()).collect();
        union.sort_unstable();
        union.dedup();
        let union_length = union.iter().map(|&e| metric[e]).sum();
        DisjointPathSet { paths, union, total_length, union_length }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum KFlow {
    Paths(DisjointPathSet),
    /// Fewer than `k` disjoint paths exist; carries the maximum.
    Insufficient(u32),
}

/// Cheapest `k` disjoint `u`–`v` paths under nonnegative edge lengths
/// `metric`, by successive shortest augmentations with potentials.
pub fn min_cost_k_flow(
    view: &GraphView<'_>,
    metric: &[f64],
    semantics: Semantics,
    u: VertexId,
    v: VertexId,
    k: u32,
) -> Result<KFlow, ConnectivityError> {
    check_pair(view, u, v)?;
    let m = view.graph().edge_count();
    if metric.len() != m {
        return Err(ConnectivityError::MetricLength { expected: m, got: metric.len() });
    }
    if let Some((edge, &value)) = metric.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
        return Err(ConnectivityError::NegativeMetric { edge, value });
    }
    if k == 0 {
        return Err(ConnectivityError::ZeroPaths);
    }
    let mut net = FlowNetwork::paths(view, semantics, u, v, Some(metric));
    let (routed, _) = net.min_cost_flow(k);
    if routed < k {
        return Ok(KFlow::Insufficient(routed));
    }
    let flows = net.edge_flows(m);
    let paths = decompose(&flows, view.vertex_count(), u, v, k)
        .into_iter()
        .map(|(vertices, edges)| Path { vertices, edges })
        .collect();
    Ok(KFlow::Paths(DisjointPathSet::new(paths, metric)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub u: VertexId,
    pub v: VertexId,
    /// Original threshold.
    pub k: u32,
    /// Threshold the check was run at.
    pub threshold: u32,
    pub achieved: u32,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pairs: Vec<PairCheck>,
    pub feasible: bool,
    pub cost: f64,
}

/// Recomputes every demand's connectivity after removing `items` (edge ids
/// or vertex ids per the instance's removal variant) and compares it with
/// `thresholds`, one per demand.
pub fn verify_cut(
    instance: &Instance,
    items: &[usize],
    thresholds: &[u32],
) -> Result<VerificationReport, InstanceError> {
    instance.check_cut(items)?;
    let view = instance.graph().view().without(&instance.masked_edges(items))?;
    let pairs: Vec<PairCheck> = instance
        .demands()
        .iter()
        .zip(thresholds)
        .map(|(d, &threshold)| {
            let achieved = connectivity(&view, instance.semantics(), d.u, d.v).expect("validated demand");
            PairCheck { u: d.u, v: d.v, k: d.k, threshold, achieved, satisfied: achieved < threshold }
        })
        .collect();
    let feasible = pairs.iter().all(|p| p.satisfied);
    Ok(VerificationReport { pairs, feasible, cost: instance.cut_cost(items) })
}

/// Whether removing `items` leaves every demand below its threshold.
pub fn is_feasible(instance: &Instance, items: &[usize], thresholds: &[u32]) -> bool {
    let view = match instance.graph().view().without(&instance.masked_edges(items)) {
        Ok(v) => v,
        Err(_) => return false,
    };
    instance
        .demands()
        .iter()
        .zip(thresholds)
        .all(|(d, &k)| !has_paths(&view, instance.semantics(), d.u, d.v, k).expect("validated demand"))
}

pub fn original_thresholds(instance: &Instance) -> Vec<u32> {
    instance.demands().iter().map(|d| d.k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::instance::{Demand, Removal};

    fn complete(n: usize) -> Graph {
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((a, b));
            }
        }
        Graph::from_pairs(n, &pairs).unwrap()
    }

    #[test]
    fn small_connectivities() {
        let tri = Graph::from_pairs(3, &[(0, 1), (0, 2), (2, 1)]).unwrap();
        assert_eq!(edge_connectivity(&tri.view(), 0, 1).unwrap(), 2);
        let path = Graph::from_pairs(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(edge_connectivity(&path.view(), 0, 3).unwrap(), 1);
        let k5 = complete(5);
        assert_eq!(edge_connectivity(&k5.view(), 1, 3).unwrap(), 4);
        let k4 = complete(4);
        assert_eq!(vertex_connectivity(&k4.view(), 0, 3).unwrap(), 3);
        let star = Graph::from_pairs(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(vertex_connectivity(&star.view(), 0, 2).unwrap(), 1);
        let triple = Graph::from_pairs(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        assert_eq!(vertex_connectivity(&triple.view(), 0, 1).unwrap(), 3);
    }

    #[test]
    fn vertex_connectivity_below_edge_connectivity() {
        // bowtie: two triangles sharing vertex 2
        let g = Graph::from_pairs(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]).unwrap();
        assert_eq!(edge_connectivity(&g.view(), 0, 3).unwrap(), 2);
        assert_eq!(vertex_connectivity(&g.view(), 0, 3).unwrap(), 1);
        let r = max_flow(&g.view(), Semantics::VertexDisjoint, 0, 3).unwrap();
        assert_eq!(r.cut_vertices, vec![2]);
    }

    #[test]
    fn witness_cut_matches_value() {
        let g = complete(5);
        let r = max_flow(&g.view(), Semantics::EdgeDisjoint, 0, 4).unwrap();
        assert_eq!(r.value, 4);
        assert_eq!(r.cut_edges.len(), 4);
    }

    #[test]
    fn removing_everything_gives_zero() {
        let g = complete(4);
        let view = g.view().without(&[0, 1, 2, 3, 4, 5]).unwrap();
        for (a, b) in [(0, 1), (2, 3)] {
            assert_eq!(edge_connectivity(&view, a, b).unwrap(), 0);
            assert_eq!(vertex_connectivity(&view, a, b).unwrap(), 0);
        }
    }

    #[test]
    fn query_errors() {
        let g = complete(3);
        assert_eq!(edge_connectivity(&g.view(), 1, 1).unwrap_err(), ConnectivityError::SameEndpoints(1));
        assert!(matches!(edge_connectivity(&g.view(), 0, 7), Err(ConnectivityError::VertexOutOfRange { .. })));
        assert!(matches!(
            min_cost_k_flow(&g.view(), &[0.0, -1.0, 0.0], Semantics::EdgeDisjoint, 0, 1, 1),
            Err(ConnectivityError::NegativeMetric { edge: 1, .. })
        ));
    }

    #[test]
    fn triangle_two_paths() {
        // s = 0, t = 1, a = 2; edges st, sa, at
        let g = Graph::from_pairs(3, &[(0, 1), (0, 2), (2, 1)]).unwrap();
        let KFlow::Paths(set) = min_cost_k_flow(&g.view(), &[0.2, 0.3, 0.4], Semantics::EdgeDisjoint, 0, 1, 2).unwrap()
        else {
            panic!("expected paths");
        };
        assert!((set.total_length - 0.9).abs() < 1e-12);
        assert_eq!(set.union, vec![0, 1, 2]);
        let mut vs: Vec<_> = set.paths.iter().map(|p| p.vertices.clone()).collect();
        vs.sort();
        assert_eq!(vs, vec![vec![0, 1], vec![0, 2, 1]]);
    }

    #[test]
    fn zero_metric_and_insufficient() {
        let g = complete(4);
        let KFlow::Paths(set) = min_cost_k_flow(&g.view(), &[0.0; 6], Semantics::EdgeDisjoint, 0, 1, 3).unwrap() else {
            panic!()
        };
        assert_eq!(set.total_length, 0.0);
        assert_eq!(set.paths.len(), 3);
        let path = Graph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            min_cost_k_flow(&path.view(), &[0.0; 2], Semantics::EdgeDisjoint, 0, 2, 2).unwrap(),
            KFlow::Insufficient(1)
        );
    }

    #[test]
    fn vertex_disjoint_paths_share_no_interior() {
        let g = Graph::from_pairs(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4), (1, 3)]).unwrap();
        let KFlow::Paths(set) = min_cost_k_flow(&g.view(), &[1.0; 7], Semantics::VertexDisjoint, 0, 3, 2).unwrap()
        else {
            panic!()
        };
        let interior: Vec<_> = set.paths.iter().flat_map(|p| p.vertices[1..p.vertices.len() - 1].to_vec()).collect();
        let mut dedup = interior.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(interior.len(), dedup.len());
    }

    #[test]
    fn verify_triangle_cuts() {
        let g = Graph::from_pairs(3, &[(0, 1), (0, 2), (2, 1)]).unwrap();
        let inst =
            Instance::new(g, vec![3.0, 1.0, 1.0], vec![Demand::new(0, 1, 2)], Removal::Edge, Semantics::EdgeDisjoint)
                .unwrap();
        let r = verify_cut(&inst, &[1], &[2]).unwrap();
        assert_eq!(r.pairs[0].achieved, 1);
        assert!(r.feasible);
        let r = verify_cut(&inst, &[], &[1]).unwrap();
        assert!(!r.feasible);
        let r = verify_cut(&inst, &[0, 1, 2], &[1]).unwrap();
        assert!(r.feasible);
        assert_eq!(r.cost, 5.0);
    }

    #[test]
    fn verify_rejects_terminals() {
        let g = Graph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let inst =
            Instance::new(g, vec![1.0; 3], vec![Demand::new(0, 2, 1)], Removal::Vertex, Semantics::VertexDisjoint)
                .unwrap();
        assert_eq!(verify_cut(&inst, &[0], &[1]).unwrap_err(), InstanceError::Protected(0));
        assert!(verify_cut(&inst, &[1], &[1]).unwrap().feasible);
    }
}
