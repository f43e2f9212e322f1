//! Multigraph storage and masked views.
//!
//! Instances read from text are undirected multigraphs. The vertex-split
//! transform additionally produces directed arcs and internal edges with
//! capacity above one, so [`Edge`] carries both an orientation flag and a
//! capacity. Every flow and distance routine in the crate reads edges only
//! through [`Edge::traversals`] so the two kinds never need special-casing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("edge {0} is a self-loop")]
    SelfLoop(EdgeId),
    #[error("edge id {id} out of range (m = {m})")]
    EdgeOutOfRange { id: EdgeId, m: usize },
    #[error("edge {0} has zero capacity")]
    ZeroCapacity(EdgeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    /// When set, the edge is an arc usable only from `a` to `b`.
    pub directed: bool,
    /// Number of unit paths the edge can carry at once.
    pub capacity: u32,
}

impl Edge {
    pub fn undirected(a: VertexId, b: VertexId) -> Self {
        Edge { a, b, directed: false, capacity: 1 }
    }

    pub fn arc(a: VertexId, b: VertexId, capacity: u32) -> Self {
        Edge { a, b, directed: true, capacity }
    }

    /// Directed traversals `(from, to)` this edge allows.
    pub fn traversals(&self) -> impl Iterator<Item = (VertexId, VertexId)> {
        let back = if self.directed { None } else { Some((self.b, self.a)) };
        std::iter::once((self.a, self.b)).chain(back)
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Immutable multigraph. Edge ids are positions in the edge list and never
/// change; parallel edges are distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    incident: Vec<Vec<EdgeId>>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut incident = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            for v in [e.a, e.b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if e.a == e.b {
                return Err(GraphError::SelfLoop(id));
            }
            if e.capacity == 0 {
                return Err(GraphError::ZeroCapacity(id));
            }
            incident[e.a].push(id);
            incident[e.b].push(id);
        }
        Ok(Graph { n, edges, incident })
    }

    /// Undirected unit-capacity multigraph from endpoint pairs.
    pub fn from_pairs(n: usize, pairs: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        Graph::new(n, pairs.iter().map(|&(a, b)| Edge::undirected(a, b)).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// Edge ids touching `v`, ascending.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incident[v].len()
    }

    pub fn is_undirected(&self) -> bool {
        self.edges.iter().all(|e| !e.directed)
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    pub fn view(&self) -> GraphView<'_> {
        GraphView { graph: self, removed: vec![false; self.edges.len()] }
    }
}

/// A graph with some edges masked out. The underlying graph is borrowed
/// immutably; masking never touches it.
#[derive(Debug, Clone)]
pub struct GraphView<'a> {
    graph: &'a Graph,
    removed: Vec<bool>,
}

/// Masks `removed` out of `graph`.
pub fn remove_edges<'a>(graph: &'a Graph, removed: &[EdgeId]) -> Result<GraphView<'a>, GraphError> {
    graph.view().without(removed)
}

impl<'a> GraphView<'a> {
    pub fn graph(&self) -> &'a Graph {
        self.graph
    }

    /// A further-masked copy of this view.
    pub fn without(&self, ids: &[EdgeId]) -> Result<GraphView<'a>, GraphError> {
        let mut out = self.clone();
        out.mask(ids)?;
        Ok(out)
    }

    pub fn mask(&mut self, ids: &[EdgeId]) -> Result<(), GraphError> {
        let m = self.graph.edge_count();
        if let Some(&id) = ids.iter().find(|&&id| id >= m) {
            return Err(GraphError::EdgeOutOfRange { id, m });
        }
        for &id in ids {
            self.removed[id] = true;
        }
        Ok(())
    }

    pub fn unmask(&mut self, id: EdgeId) {
        self.removed[id] = false;
    }

    pub fn is_live(&self, id: EdgeId) -> bool {
        !self.removed[id]
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.n
    }

    pub fn live_edges(&self) -> impl Iterator<Item = (EdgeId, &'a Edge)> + '_ {
        let graph = self.graph;
        graph.edges.iter().enumerate().filter(move |(id, _)| !self.removed[*id])
    }

    pub fn removed_ids(&self) -> Vec<EdgeId> {
        (0..self.removed.len()).filter(|&id| self.removed[id]).collect()
    }

    /// Live edges leaving `v` as `(edge id, head)`, ascending by edge id.
    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = (EdgeId, VertexId)> + '_ {
        let graph = self.graph;
        graph.incident[v].iter().filter_map(move |&id| {
            if self.removed[id] {
                return None;
            }
            let e = &graph.edges[id];
            if e.directed && e.a != v {
                return None;
            }
            Some((id, e.other(v)))
        })
    }

    /// Vertices reachable from `source` over live edges.
    pub fn reachable(&self, source: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.graph.n];
        let mut stack = vec![source];
        seen[source] = true;
        while let Some(v) = stack.pop() {
            for (_, w) in self.out_edges(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}
