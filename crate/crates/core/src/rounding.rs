//! Region-growing rounding of the fractional solution.
//!
//! While some demand `(u, v)` still has at least `k'` disjoint paths, a ball
//! is grown around `u` in the metric `x` until its boundary cost is small
//! relative to the fractional volume inside, and the boundary is cut except
//! for the `k' - 1` most expensive edges. At most `k' - 1` paths then leave
//! the ball, and `v` lies outside it, so the demand drops below `k'`. When
//! no radius qualifies before `v` enters the ball, a minimum-cost `u`–`v`
//! cut is used instead with the same keep rule. The result is pruned by
//! reverse delete.
//!
//! Edges whose cost reaches the instance's protected sentinel (the link and
//! terminal arcs of a vertex-split instance) never count toward boundary
//! cost or volume and are never removed.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectivity::{has_paths, is_feasible};
use crate::flow::FlowNetwork;
use crate::graph::{EdgeId, GraphView, VertexId};
use crate::instance::{Instance, Removal};
use crate::lp::FracSolution;

pub const DEFAULT_RADIUS_CAP: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoundingError {
    #[error("root {root} out of range (n = {n})")]
    InvalidRoot { root: VertexId, n: usize },
    #[error("radius cap and seed volume must be positive")]
    BadSweepParameters,
    #[error("relaxation factor {0} must be finite and at least 1")]
    InvalidBeta(f64),
    #[error("rounding needs an edge-removal instance; apply the vertex-split transform first")]
    VertexInstance,
    #[error("demand {demand} cannot be cut without removing a protected item")]
    Infeasible { demand: usize },
    #[error("cut given to pruning is not feasible at the requested thresholds")]
    NotFeasible,
}

/// Ball statistics at one breakpoint radius. The region is constant on
/// `[radius, next breakpoint)` and the volume grows linearly there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub radius: f64,
    pub region: Vec<VertexId>,
    pub boundary: Vec<EdgeId>,
    /// Cost of removable boundary edges.
    pub boundary_cost: f64,
    /// Total capacity of protected boundary edges.
    pub protected_capacity: u32,
    /// Seed plus `c_e x_e` over edges inside the region.
    pub inner_volume: f64,
    /// Sum of `c_e` over crossing removable edges.
    pub crossing_cost: f64,
    /// Sum of `c_e * d(inner endpoint)` over crossing removable edges.
    pub crossing_offset: f64,
}

impl Breakpoint {
    pub fn volume_at(&self, r: f64) -> f64 {
        self.inner_volume + self.crossing_cost * r - self.crossing_offset
    }

    pub fn volume(&self) -> f64 {
        self.volume_at(self.radius)
    }

    pub fn ratio(&self) -> f64 {
        self.boundary_cost / self.volume()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSweep {
    pub root: VertexId,
    pub radius_cap: f64,
    pub seed_volume: f64,
    /// Shortest distance from the root under `x`; infinite if unreachable.
    pub distances: Vec<f64>,
    pub breakpoints: Vec<Breakpoint>,
}

const SAME: f64 = 1e-12;

fn distances(view: &GraphView<'_>, x: &[f64], root: VertexId) -> Vec<f64> {
    let n = view.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[root] = 0.0;
    // dense Dijkstra; graphs here are small and this keeps ties by vertex id
    for _ in 0..n {
        let Some(x0) = (0..n).filter(|&w| !done[w] && dist[w].is_finite()).min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
        else {
            break;
        };
        done[x0] = true;
        for (id, y) in view.out_edges(x0) {
            let nd = dist[x0] + x[id].max(0.0);
            if nd < dist[y] {
                dist[y] = nd;
            }
        }
    }
    dist
}

/// Grows balls around `root` under edge lengths `x` and records, for every
/// distinct distance below `radius_cap`, the region, its boundary and the
/// volume `seed + sum_inside c_e x_e + sum_crossing c_e (r - d(inner end))`.
pub fn region_sweep(
    view: &GraphView<'_>,
    x: &[f64],
    costs: &[f64],
    protected: &[bool],
    root: VertexId,
    radius_cap: f64,
    seed_volume: f64,
) -> Result<RegionSweep, RoundingError> {
    let n = view.vertex_count();
    if root >= n {
        return Err(RoundingError::InvalidRoot { root, n });
    }
    if !(radius_cap > 0.0 && seed_volume > 0.0) {
        return Err(RoundingError::BadSweepParameters);
    }
    let dist = distances(view, x, root);
    let mut radii: Vec<f64> = dist.iter().copied().filter(|d| *d < radius_cap).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| (*a - *b).abs() <= SAME);

    let breakpoints = radii
        .into_iter()
        .map(|radius| {
            let inside = |w: VertexId| dist[w] <= radius + SAME;
            let region: Vec<VertexId> = (0..n).filter(|&w| inside(w)).collect();
            let mut bp = Breakpoint {
                radius,
                region,
                boundary: Vec::new(),
                boundary_cost: 0.0,
                protected_capacity: 0,
                inner_volume: seed_volume,
                crossing_cost: 0.0,
                crossing_offset: 0.0,
            };
            for (id, e) in view.live_edges() {
                let crossing = e.traversals().find(|&(from, to)| inside(from) && !inside(to));
                if let Some((from, _)) = crossing {
                    bp.boundary.push(id);
                    if protected[id] {
                        bp.protected_capacity += e.capacity;
                    } else {
                        bp.boundary_cost += costs[id];
                        bp.crossing_cost += costs[id];
                        bp.crossing_offset += costs[id] * dist[from];
                    }
                } else if inside(e.a) && inside(e.b) && !protected[id] {
                    bp.inner_volume += costs[id] * x[id];
                }
            }
            bp
        })
        .collect();
    Ok(RegionSweep { root, radius_cap, seed_volume, distances: dist, breakpoints })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusChoice {
    /// Breakpoint whose region and boundary apply.
    pub index: usize,
    pub radius: f64,
}

/// Smallest evaluation radius `r < R` with
/// `c(boundary) <= (2/R) ln(p+1) V(r)` whose region avoids `exclusion` and
/// whose protected boundary capacity fits in `keep_budget`. Evaluation
/// radii are the breakpoints and the midpoint of each gap (the last gap
/// ends at `R`).
pub fn choose_radius(
    sweep: &RegionSweep,
    pairs: usize,
    exclusion: &[VertexId],
    keep_budget: u32,
) -> Option<RadiusChoice> {
    let alpha = 2.0 / sweep.radius_cap * ((pairs as f64) + 1.0).ln();
    let bps = &sweep.breakpoints;
    for (i, bp) in bps.iter().enumerate() {
        if exclusion.iter().any(|&w| sweep.distances[w] <= bp.radius + SAME) {
            return None;
        }
        if bp.protected_capacity > keep_budget {
            continue;
        }
        let end = bps.get(i + 1).map_or(sweep.radius_cap, |b| b.radius);
        for r in [bp.radius, 0.5 * (bp.radius + end)] {
            if bp.boundary_cost <= alpha * bp.volume_at(r) * (1.0 + 1e-12) {
                return Some(RadiusChoice { index: i, radius: r });
            }
        }
    }
    None
}

/// First radius in the gap after breakpoint `index` at which the charging
/// inequality holds with equality, if the volume grows at all there.
pub fn crossing_radius(sweep: &RegionSweep, pairs: usize, index: usize) -> Option<f64> {
    let alpha = 2.0 / sweep.radius_cap * ((pairs as f64) + 1.0).ln();
    let bp = sweep.breakpoints.get(index)?;
    if alpha <= 0.0 || bp.crossing_cost <= 0.0 {
        return None;
    }
    Some((bp.boundary_cost / alpha - bp.inner_volume + bp.crossing_offset) / bp.crossing_cost)
}

/// Splits `boundary` into kept and removed edges: the most expensive edges
/// (ties by lower id) are kept while their total capacity fits in `budget`.
pub fn keep_rule(instance: &Instance, boundary: &[EdgeId], budget: u32) -> (Vec<EdgeId>, Vec<EdgeId>) {
    let g = instance.graph();
    let costs = instance.costs();
    let mut order = boundary.to_vec();
    order.sort_by(|&a, &b| costs[b].total_cmp(&costs[a]).then(a.cmp(&b)));
    let mut used = 0;
    let (mut kept, mut removed) = (Vec::new(), Vec::new());
    for id in order {
        let cap = g.edge(id).capacity;
        if used + cap <= budget {
            used += cap;
            kept.push(id);
        } else {
            removed.push(id);
        }
    }
    kept.sort_unstable();
    removed.sort_unstable();
    (kept, removed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionStep {
    pub demand: usize,
    pub root: VertexId,
    /// Chosen radius; `None` when the min-cut fallback ran.
    pub radius: Option<f64>,
    pub fallback: bool,
    pub threshold: u32,
    pub kept: Vec<EdgeId>,
    pub removed: Vec<EdgeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Bicriteria { beta: f64 },
}

impl Mode {
    pub fn beta(&self) -> f64 {
        match *self {
            Mode::Exact => 1.0,
            Mode::Bicriteria { beta } => beta,
        }
    }
}

/// An integral cut: removed item ids (edges or vertices) and its cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutSolution {
    pub removed: Vec<usize>,
    pub cost: f64,
    pub mode: Mode,
    /// Thresholds the cut was built for, one per demand.
    pub thresholds: Vec<u32>,
    pub trace: Vec<RegionStep>,
}

/// `ceil(beta * k)`, guarded against representation noise.
pub fn relaxed_threshold(k: u32, beta: f64) -> u32 {
    let t = (beta * k as f64 - 1e-9).ceil();
    (t as u32).max(k)
}

pub fn relaxed_thresholds(instance: &Instance, beta: f64) -> Vec<u32> {
    instance.demands().iter().map(|d| relaxed_threshold(d.k, beta)).collect()
}

fn protected_mask(instance: &Instance) -> Vec<bool> {
    (0..instance.item_count()).map(|e| !instance.is_removable(e)).collect()
}

/// One region-growing pass at fixed `thresholds`, before pruning.
fn grow_regions(
    instance: &Instance,
    x: &FracSolution,
    thresholds: &[u32],
    radius_cap: f64,
) -> Result<(Vec<EdgeId>, Vec<RegionStep>), RoundingError> {
    let graph = instance.graph();
    let sem = instance.semantics();
    let demands = instance.demands();
    let protected = protected_mask(instance);
    let weights: Vec<f64> = {
        let big = 1.0 + (0..instance.item_count()).filter(|&e| !protected[e]).map(|e| instance.costs()[e]).sum::<f64>();
        (0..instance.item_count())
            .map(|e| if protected[e] { big * graph.edge(e).capacity as f64 } else { instance.costs()[e] })
            .collect()
    };
    let mut view = graph.view();
    let is_live = |view: &GraphView<'_>, i: usize| {
        let d = demands[i];
        has_paths(view, sem, d.u, d.v, thresholds[i]).expect("validated demand")
    };
    let pairs = (0..demands.len()).filter(|&i| is_live(&view, i)).count().max(1);
    let mut removed = BTreeSet::new();
    let mut trace = Vec::new();

    while let Some(i) = (0..demands.len()).find(|&i| is_live(&view, i)) {
        let d = demands[i];
        let budget = thresholds[i] - 1;
        let live_count = (0..demands.len()).filter(|&j| is_live(&view, j)).count().max(1);
        let seed = (x.objective / live_count as f64).max(1e-9);
        let sweep = region_sweep(&view, &x.x, instance.costs(), &protected, d.u, radius_cap, seed)?;
        let step = match choose_radius(&sweep, pairs, &[d.v], budget) {
            Some(choice) => {
                let (kept, cut) = keep_rule(instance, &sweep.breakpoints[choice.index].boundary, budget);
                RegionStep {
                    demand: i,
                    root: d.u,
                    radius: Some(choice.radius),
                    fallback: false,
                    threshold: thresholds[i],
                    kept,
                    removed: cut,
                }
            }
            None => {
                let mut net = FlowNetwork::weighted(&view, d.u, d.v, &weights);
                let value = net.max_flow(f64::INFINITY);
                if crate::flow::selfcheck_enabled() {
                    net.check_cut(value);
                }
                let mut boundary: Vec<EdgeId> = net.cut_arcs().iter().filter_map(|&a| net.arcs[a].edge).collect();
                boundary.sort_unstable();
                boundary.dedup();
                let (kept, cut) = keep_rule(instance, &boundary, budget);
                RegionStep {
                    demand: i,
                    root: d.u,
                    radius: None,
                    fallback: true,
                    threshold: thresholds[i],
                    kept,
                    removed: cut,
                }
            }
        };
        if step.removed.iter().any(|&e| protected[e]) {
            return Err(RoundingError::Infeasible { demand: i });
        }
        view.mask(&step.removed).expect("boundary ids are valid");
        removed.extend(step.removed.iter().copied());
        debug_assert!(!is_live(&view, i), "step left demand {i} at threshold");
        trace.push(step);
    }
    Ok((removed.into_iter().collect(), trace))
}

/// Reverse delete: restores removed items from most to least expensive
/// (ties: higher id first) whenever every demand stays below threshold.
pub fn prune_items(instance: &Instance, items: &[usize], thresholds: &[u32]) -> Result<Vec<usize>, RoundingError> {
    if !is_feasible(instance, items, thresholds) {
        return Err(RoundingError::NotFeasible);
    }
    let costs = instance.costs();
    let mut order = items.to_vec();
    order.sort_by(|&a, &b| costs[b].total_cmp(&costs[a]).then(b.cmp(&a)));
    let mut current: BTreeSet<usize> = items.iter().copied().collect();
    for id in order {
        current.remove(&id);
        let trial: Vec<usize> = current.iter().copied().collect();
        if !is_feasible(instance, &trial, thresholds) {
            current.insert(id);
        }
    }
    Ok(current.into_iter().collect())
}

pub fn prune_cut(instance: &Instance, cut: &CutSolution, thresholds: &[u32]) -> Result<CutSolution, RoundingError> {
    let removed = prune_items(instance, &cut.removed, thresholds)?;
    Ok(CutSolution { cost: instance.cut_cost(&removed), removed, ..cut.clone() })
}

/// Relaxation factors at which some threshold `ceil(beta k)` steps up, from
/// 1 to `beta`, reduced to distinct threshold vectors.
fn threshold_ladder(instance: &Instance, beta: f64) -> Vec<Vec<u32>> {
    let mut betas = vec![1.0];
    for d in instance.demands() {
        let top = relaxed_threshold(d.k, beta);
        for m in d.k + 1..=top {
            betas.push(m as f64 / d.k as f64);
        }
    }
    betas.push(beta);
    betas.retain(|b| *b <= beta);
    betas.sort_by(f64::total_cmp);
    let mut ladder: Vec<Vec<u32>> = Vec::new();
    for b in betas {
        let t = relaxed_thresholds(instance, b);
        if ladder.last() != Some(&t) {
            ladder.push(t);
        }
    }
    ladder
}

/// Rounds `x` to a cut leaving every demand below `ceil(beta k)`.
///
/// With `beta = 1` this is one region-growing pass followed by pruning. For
/// `beta > 1` the pass is repeated at every threshold vector reached on the
/// way from 1 to `beta`, and each level keeps the cheaper of its own pruned
/// cut and the previous level's cut pruned again, so the cost never grows
/// with `beta`.
pub fn round_exact(instance: &Instance, x: &FracSolution, mode: Mode) -> Result<CutSolution, RoundingError> {
    round_with_cap(instance, x, mode, DEFAULT_RADIUS_CAP)
}

pub fn round_with_cap(
    instance: &Instance,
    x: &FracSolution,
    mode: Mode,
    radius_cap: f64,
) -> Result<CutSolution, RoundingError> {
    let beta = mode.beta();
    if !(beta.is_finite() && beta >= 1.0) {
        return Err(RoundingError::InvalidBeta(beta));
    }
    if instance.removal() == Removal::Vertex {
        return Err(RoundingError::VertexInstance);
    }
    let mut best: Option<CutSolution> = None;
    for thresholds in threshold_ladder(instance, beta) {
        let (raw, trace) = grow_regions(instance, x, &thresholds, radius_cap)?;
        let removed = prune_items(instance, &raw, &thresholds)?;
        let own =
            CutSolution { cost: instance.cut_cost(&removed), removed, mode, thresholds: thresholds.clone(), trace };
        best = Some(match best {
            None => own,
            Some(prev) => {
                let carried = prune_cut(instance, &prev, &thresholds)?;
                let carried = CutSolution { thresholds: thresholds.clone(), ..carried };
                if carried.cost < own.cost {
                    carried
                } else {
                    own
                }
            }
        });
    }
    Ok(best.expect("ladder is never empty"))
}
