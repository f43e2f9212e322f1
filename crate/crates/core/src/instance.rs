//! Problem instances and the vertex-split reduction.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, EdgeId, Graph, GraphError, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Removal {
    Edge,
    Vertex,
}

/// How connectivity between a demand pair is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    EdgeDisjoint,
    VertexDisjoint,
}

/// A pair whose connectivity must end strictly below `k`. Pairs the caller
/// does not care about are simply not listed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Demand {
    pub u: VertexId,
    pub v: VertexId,
    pub k: u32,
}

impl Demand {
    pub fn new(u: VertexId, v: VertexId, k: u32) -> Self {
        Demand { u, v, k }
    }

    fn key(&self) -> (VertexId, VertexId) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("expected {expected} costs, got {got}")]
    CostCount { expected: usize, got: usize },
    #[error("cost of item {index} is {value}; costs must be finite and nonnegative")]
    BadCost { index: usize, value: f64 },
    #[error("demand {index} has equal endpoints {u}")]
    DemandLoop { index: usize, u: VertexId },
    #[error("demand {index} has threshold 0; thresholds start at 1")]
    ZeroThreshold { index: usize },
    #[error("demand {index} repeats pair ({u}, {v})")]
    DuplicateDemand { index: usize, u: VertexId, v: VertexId },
    #[error("vertex-split transform requires a vertex-removal instance")]
    NotVertexRemoval,
    #[error("removed item {0} is a protected demand terminal or non-removable edge")]
    Protected(usize),
    #[error("removed item {id} out of range ({count} items)")]
    ItemOutOfRange { id: usize, count: usize },
}

/// Validated problem instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    graph: Graph,
    costs: Vec<f64>,
    demands: Vec<Demand>,
    removal: Removal,
    semantics: Semantics,
    protected_cost: Option<f64>,
}

impl Instance {
    pub fn new(
        graph: Graph,
        costs: Vec<f64>,
        demands: Vec<Demand>,
        removal: Removal,
        semantics: Semantics,
    ) -> Result<Self, InstanceError> {
        let expected = match removal {
            Removal::Edge => graph.edge_count(),
            Removal::Vertex => graph.vertex_count(),
        };
        if costs.len() != expected {
            return Err(InstanceError::CostCount { expected, got: costs.len() });
        }
        if let Some((index, &value)) = costs.iter().enumerate().find(|(_, c)| !c.is_finite() || **c < 0.0) {
            return Err(InstanceError::BadCost { index, value });
        }
        let mut seen = HashSet::new();
        for (index, d) in demands.iter().enumerate() {
            graph.check_vertex(d.u)?;
            graph.check_vertex(d.v)?;
            if d.u == d.v {
                return Err(InstanceError::DemandLoop { index, u: d.u });
            }
            if d.k == 0 {
                return Err(InstanceError::ZeroThreshold { index });
            }
            if !seen.insert(d.key()) {
                return Err(InstanceError::DuplicateDemand { index, u: d.u, v: d.v });
            }
        }
        Ok(Instance { graph, costs, demands, removal, semantics, protected_cost: None })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn demands(&self) -> &[Demand] {
        &self.demands
    }

    pub fn removal(&self) -> Removal {
        self.removal
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    /// Cost sentinel marking edges that stand for something non-removable.
    pub fn protected_cost(&self) -> Option<f64> {
        self.protected_cost
    }

    /// Number of removable-item slots: edges or vertices.
    pub fn item_count(&self) -> usize {
        self.costs.len()
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.demands.iter().any(|d| d.u == v || d.v == v)
    }

    /// Whether item `id` may appear in a cut. Vertex variants protect every
    /// demand endpoint; split instances protect sentinel-cost edges.
    pub fn is_removable(&self, id: usize) -> bool {
        match self.removal {
            Removal::Vertex => !self.is_terminal(id),
            Removal::Edge => self.protected_cost.is_none_or(|p| self.costs[id] < p),
        }
    }

    pub fn cut_cost(&self, items: &[usize]) -> f64 {
        // fold from +0.0 so the empty cut is not reported as -0
        items.iter().fold(0.0, |acc, &i| acc + self.costs[i])
    }

    pub fn total_cost(&self) -> f64 {
        self.costs.iter().sum()
    }

    pub fn has_integral_costs(&self) -> bool {
        self.costs.iter().all(|c| c.fract() == 0.0)
    }

    /// Checks that `items` are valid, distinct-agnostic ids of removable items.
    pub fn check_cut(&self, items: &[usize]) -> Result<(), InstanceError> {
        let count = self.item_count();
        for &id in items {
            if id >= count {
                return Err(InstanceError::ItemOutOfRange { id, count });
            }
            if self.removal == Removal::Vertex && !self.is_removable(id) {
                return Err(InstanceError::Protected(id));
            }
        }
        Ok(())
    }

    /// Edge ids masked when `items` are removed.
    pub fn masked_edges(&self, items: &[usize]) -> Vec<EdgeId> {
        match self.removal {
            Removal::Edge => items.to_vec(),
            Removal::Vertex => {
                let mut out: Vec<EdgeId> = items.iter().flat_map(|&v| self.graph.incident(v).iter().copied()).collect();
                out.sort_unstable();
                out.dedup();
                out
            }
        }
    }

    /// Copy with demand thresholds replaced; used for bicriteria thresholds.
    pub fn with_thresholds(&self, thresholds: &[u32]) -> Instance {
        let mut out = self.clone();
        for (d, &k) in out.demands.iter_mut().zip(thresholds) {
            d.k = k;
        }
        out
    }
}

/// Bookkeeping for the vertex-split reduction.
///
/// Vertex `w` becomes `in(w) = 2w` and `out(w) = 2w + 1` joined by the
/// internal arc `in(w) -> out(w)` with edge id `w`. Original edge `i` between
/// `a` and `b` becomes the two arcs `out(a) -> in(b)` (id `n + 2i`) and
/// `out(b) -> in(a)` (id `n + 2i + 1`). Arcs are needed because an undirected
/// split lets a path slip past an internal edge through the shared out-node.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSplitMap {
    n: usize,
    original_edges: usize,
    large: f64,
    terminal: Vec<bool>,
}

impl VertexSplitMap {
    pub fn in_node(&self, w: VertexId) -> VertexId {
        2 * w
    }

    pub fn out_node(&self, w: VertexId) -> VertexId {
        2 * w + 1
    }

    pub fn internal_edge(&self, w: VertexId) -> EdgeId {
        w
    }

    pub fn link_arcs(&self, edge: EdgeId) -> (EdgeId, EdgeId) {
        (self.n + 2 * edge, self.n + 2 * edge + 1)
    }

    pub fn original_vertex_count(&self) -> usize {
        self.n
    }

    pub fn original_edge_count(&self) -> usize {
        self.original_edges
    }

    /// Cost assigned to non-removable edges: one more than all finite costs.
    pub fn large(&self) -> f64 {
        self.large
    }

    /// Maps a cut of the split instance back to removed vertices. Fails if
    /// the cut uses a link arc or a terminal's internal arc.
    pub fn vertices_of(&self, cut: &[EdgeId]) -> Result<Vec<VertexId>, InstanceError> {
        let mut out = Vec::with_capacity(cut.len());
        for &id in cut {
            if id >= self.n || self.terminal[id] {
                return Err(InstanceError::Protected(id));
            }
            out.push(id);
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn edges_of(&self, vertices: &[VertexId]) -> Vec<EdgeId> {
        vertices.iter().map(|&w| self.internal_edge(w)).collect()
    }
}

/// Reduces a vertex-removal instance to an edge-removal instance on `2n`
/// vertices whose only finite-cost edges are the internal arcs of
/// non-terminal vertices.
///
/// Under vertex-disjoint semantics internal arcs have capacity 1, so arc
/// connectivity from `out(u)` to `in(v)` counts internally vertex-disjoint
/// paths. Under edge-disjoint semantics they have capacity `deg(w)` so that
/// only the link arcs limit flow.
pub fn vertex_split_transform(instance: &Instance) -> Result<(Instance, VertexSplitMap), InstanceError> {
    if instance.removal != Removal::Vertex {
        return Err(InstanceError::NotVertexRemoval);
    }
    let g = instance.graph();
    let n = g.vertex_count();
    let large = 1.0 + instance.total_cost();
    let terminal: Vec<bool> = (0..n).map(|w| instance.is_terminal(w)).collect();

    let mut edges = Vec::with_capacity(n + 2 * g.edge_count());
    let mut costs = Vec::with_capacity(edges.capacity());
    for w in 0..n {
        let capacity = match instance.semantics {
            Semantics::VertexDisjoint => 1,
            Semantics::EdgeDisjoint => g.degree(w).max(1) as u32,
        };
        edges.push(Edge::arc(2 * w, 2 * w + 1, capacity));
        costs.push(if terminal[w] { large } else { instance.costs[w] });
    }
    for e in g.edges() {
        edges.push(Edge::arc(2 * e.a + 1, 2 * e.b, 1));
        edges.push(Edge::arc(2 * e.b + 1, 2 * e.a, 1));
        costs.push(large);
        costs.push(large);
    }
    let demands = instance.demands.iter().map(|d| Demand::new(2 * d.u + 1, 2 * d.v, d.k)).collect();
    let graph = Graph::new(2 * n, edges)?;
    let mut split = Instance::new(graph, costs, demands, Removal::Edge, Semantics::EdgeDisjoint)?;
    split.protected_cost = Some(large);
    let map = VertexSplitMap { n, original_edges: g.edge_count(), large, terminal };
    Ok((split, map))
}
