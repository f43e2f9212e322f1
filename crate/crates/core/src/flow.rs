//! Residual flow network shared by the connectivity oracles.
//!
//! Nodes are either the graph's vertices (edge-disjoint counting) or an
//! in/out pair per vertex (vertex-disjoint counting). Arcs are added in
//! ascending edge-id order so that every search visits them in that order;
//! together with strict-improvement relaxation this makes the lowest edge id
//! win every tie.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::sync::OnceLock;

use crate::graph::{EdgeId, GraphView, VertexId};
use crate::instance::Semantics;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct Arc {
    pub to: usize,
    pub cap: f64,
    pub initial: f64,
    pub cost: f64,
    pub rev: usize,
    /// Graph edge behind this arc; `None` for vertex-internal and residual arcs.
    pub edge: Option<EdgeId>,
    /// Vertex whose internal arc this is.
    pub vertex: Option<VertexId>,
    pub forward: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct FlowNetwork {
    pub arcs: Vec<Arc>,
    pub adj: Vec<Vec<usize>>,
    pub source: usize,
    pub sink: usize,
    split: bool,
}

pub(crate) fn selfcheck_enabled() -> bool {
    static FLAG: OnceLock<bool> = OnceLock::new();
    cfg!(debug_assertions) || *FLAG.get_or_init(|| std::env::var("MRC_SELFCHECK").is_ok_and(|v| v == "1"))
}

impl FlowNetwork {
    fn empty(nodes: usize, source: usize, sink: usize, split: bool) -> Self {
        FlowNetwork { arcs: Vec::new(), adj: vec![Vec::new(); nodes], source, sink, split }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: f64, cost: f64, edge: Option<EdgeId>, vertex: Option<VertexId>) {
        let fwd = self.arcs.len();
        self.arcs.push(Arc { to, cap, initial: cap, cost, rev: fwd + 1, edge, vertex, forward: true });
        self.arcs.push(Arc { to: from, cap: 0.0, initial: 0.0, cost: -cost, rev: fwd, edge, vertex, forward: false });
        self.adj[from].push(fwd);
        self.adj[to].push(fwd + 1);
    }

    /// Network for counting `semantics`-disjoint paths from `u` to `v`.
    /// Arc capacities are edge capacities; `lengths` sets per-edge costs.
    pub fn paths(
        view: &GraphView<'_>,
        semantics: Semantics,
        u: VertexId,
        v: VertexId,
        lengths: Option<&[f64]>,
    ) -> Self {
        let n = view.vertex_count();
        let cost = |id: EdgeId| lengths.map_or(0.0, |x| x[id]);
        match semantics {
            Semantics::EdgeDisjoint => {
                let mut net = FlowNetwork::empty(n, u, v, false);
                for (id, e) in view.live_edges() {
                    for (from, to) in e.traversals() {
                        net.add_arc(from, to, e.capacity as f64, cost(id), Some(id), None);
                    }
                }
                net
            }
            Semantics::VertexDisjoint => {
                let mut net = FlowNetwork::empty(2 * n, 2 * u + 1, 2 * v, true);
                for w in 0..n {
                    if w != u && w != v {
                        net.add_arc(2 * w, 2 * w + 1, 1.0, 0.0, None, Some(w));
                    }
                }
                for (id, e) in view.live_edges() {
                    for (from, to) in e.traversals() {
                        net.add_arc(2 * from + 1, 2 * to, e.capacity as f64, cost(id), Some(id), None);
                    }
                }
                net
            }
        }
    }

    /// Network whose arc capacities are arbitrary per-edge weights; used for
    /// minimum-weight cuts.
    pub fn weighted(view: &GraphView<'_>, u: VertexId, v: VertexId, weights: &[f64]) -> Self {
        let mut net = FlowNetwork::empty(view.vertex_count(), u, v, false);
        for (id, e) in view.live_edges() {
            for (from, to) in e.traversals() {
                net.add_arc(from, to, weights[id], 0.0, Some(id), None);
            }
        }
        net
    }

    pub fn graph_vertex(&self, node: usize) -> VertexId {
        if self.split {
            node / 2
        } else {
            node
        }
    }

    /// Edmonds–Karp, stopping once `limit` units have been routed.
    pub fn max_flow(&mut self, limit: f64) -> f64 {
        let mut total = 0.0;
        let nodes = self.adj.len();
        while total < limit - EPS {
            let mut pred: Vec<Option<usize>> = vec![None; nodes];
            let mut seen = vec![false; nodes];
            seen[self.source] = true;
            let mut queue = VecDeque::from([self.source]);
            'bfs: while let Some(x) = queue.pop_front() {
                for &a in &self.adj[x] {
                    let arc = &self.arcs[a];
                    if arc.cap > EPS && !seen[arc.to] {
                        seen[arc.to] = true;
                        pred[arc.to] = Some(a);
                        if arc.to == self.sink {
                            break 'bfs;
                        }
                        queue.push_back(arc.to);
                    }
                }
            }
            if !seen[self.sink] {
                break;
            }
            let mut push = limit - total;
            let mut x = self.sink;
            while let Some(a) = pred[x] {
                push = push.min(self.arcs[a].cap);
                x = self.arcs[self.arcs[a].rev].to;
            }
            let mut x = self.sink;
            while let Some(a) = pred[x] {
                self.arcs[a].cap -= push;
                let r = self.arcs[a].rev;
                self.arcs[r].cap += push;
                x = self.arcs[r].to;
            }
            total += push;
        }
        total
    }

    /// Nodes reachable from the source in the residual network.
    pub fn source_side(&self) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[self.source] = true;
        let mut stack = vec![self.source];
        while let Some(x) = stack.pop() {
            for &a in &self.adj[x] {
                let arc = &self.arcs[a];
                if arc.cap > EPS && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }

    /// Forward arcs leaving the residual source side.
    pub fn cut_arcs(&self) -> Vec<usize> {
        let side = self.source_side();
        (0..self.arcs.len())
            .filter(|&a| {
                let arc = &self.arcs[a];
                let from = self.arcs[arc.rev].to;
                arc.forward && side[from] && !side[arc.to]
            })
            .collect()
    }

    /// Checks max-flow/min-cut equality for a flow of `value` that was run to
    /// completion.
    pub fn check_cut(&self, value: f64) {
        let cap: f64 = self.cut_arcs().iter().map(|&a| self.arcs[a].initial).sum();
        assert!(
            (cap - value).abs() <= 1e-9 * value.abs().max(1.0),
            "max-flow {value} disagrees with witness cut capacity {cap}"
        );
    }

    /// Successive shortest paths with Dijkstra on reduced costs. Routes up to
    /// `k` units one at a time and returns the amount routed and its cost.
    pub fn min_cost_flow(&mut self, k: u32) -> (u32, f64) {
        let nodes = self.adj.len();
        let mut potential = vec![0.0; nodes];
        let mut routed = 0;
        let mut cost = 0.0;
        while routed < k {
            let mut dist = vec![f64::INFINITY; nodes];
            let mut pred: Vec<Option<usize>> = vec![None; nodes];
            let mut done = vec![false; nodes];
            let mut heap = BinaryHeap::new();
            dist[self.source] = 0.0;
            heap.push(Entry { dist: 0.0, node: self.source });
            while let Some(Entry { dist: d, node: x }) = heap.pop() {
                if done[x] {
                    continue;
                }
                done[x] = true;
                for &a in &self.adj[x] {
                    let arc = &self.arcs[a];
                    if arc.cap <= EPS || done[arc.to] {
                        continue;
                    }
                    let reduced = (arc.cost + potential[x] - potential[arc.to]).max(0.0);
                    let nd = d + reduced;
                    if nd < dist[arc.to] - 1e-12 {
                        dist[arc.to] = nd;
                        pred[arc.to] = Some(a);
                        heap.push(Entry { dist: nd, node: arc.to });
                    }
                }
            }
            if !done[self.sink] {
                break;
            }
            for x in 0..nodes {
                if done[x] {
                    potential[x] += dist[x];
                }
            }
            let mut x = self.sink;
            while let Some(a) = pred[x] {
                self.arcs[a].cap -= 1.0;
                let r = self.arcs[a].rev;
                self.arcs[r].cap += 1.0;
                cost += self.arcs[a].cost;
                x = self.arcs[r].to;
            }
            routed += 1;
        }
        (routed, cost)
    }

    /// Net flow per `(edge id, from vertex, to vertex)` after cancelling
    /// flow that crosses an undirected edge in both directions.
    pub fn edge_flows(&self, edge_count: usize) -> Vec<Vec<(VertexId, VertexId, u32)>> {
        let mut per_edge: Vec<Vec<(VertexId, VertexId, f64)>> = vec![Vec::new(); edge_count];
        for arc in self.arcs.iter().filter(|a| a.forward) {
            let Some(id) = arc.edge else { continue };
            let used = arc.initial - arc.cap;
            if used > 0.5 {
                let from = self.graph_vertex(self.arcs[arc.rev].to);
                let to = self.graph_vertex(arc.to);
                per_edge[id].push((from, to, used));
            }
        }
        per_edge
            .into_iter()
            .map(|flows| {
                if flows.len() == 2 && flows[0].0 == flows[1].1 && flows[0].1 == flows[1].0 {
                    let net = flows[0].2 - flows[1].2;
                    if net > 0.5 {
                        vec![(flows[0].0, flows[0].1, net.round() as u32)]
                    } else if net < -0.5 {
                        vec![(flows[1].0, flows[1].1, (-net).round() as u32)]
                    } else {
                        Vec::new()
                    }
                } else {
                    flows.into_iter().map(|(a, b, f)| (a, b, f.round() as u32)).collect()
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    dist: f64,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

/// Splits per-edge unit flows into `u`–`v` paths, walking lowest edge id
/// first and discarding any cycles met on the way.
pub(crate) fn decompose(
    flows: &[Vec<(VertexId, VertexId, u32)>],
    vertex_count: usize,
    u: VertexId,
    v: VertexId,
    count: u32,
) -> Vec<(Vec<VertexId>, Vec<EdgeId>)> {
    let mut remaining: Vec<Vec<(EdgeId, VertexId, u32)>> = vec![Vec::new(); vertex_count];
    for (id, fs) in flows.iter().enumerate() {
        for &(from, to, f) in fs {
            remaining[from].push((id, to, f));
        }
    }
    let mut paths = Vec::new();
    for _ in 0..count {
        let mut vertices = vec![u];
        let mut edges: Vec<EdgeId> = Vec::new();
        let mut x = u;
        while x != v {
            let Some(slot) = remaining[x].iter_mut().find(|(_, _, f)| *f > 0) else {
                // conservation guarantees an exit until v is reached
                unreachable!("flow conservation violated at vertex {x}");
            };
            slot.2 -= 1;
            let (id, to) = (slot.0, slot.1);
            if let Some(pos) = vertices.iter().position(|&w| w == to) {
                vertices.truncate(pos + 1);
                edges.truncate(pos);
            } else {
                vertices.push(to);
                edges.push(id);
            }
            x = to;
        }
        paths.push((vertices, edges));
    }
    paths
}
