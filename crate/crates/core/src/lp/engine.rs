use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::simplex::{MasterError, MasterLp};
use crate::connectivity::{has_paths, min_cost_k_flow, DisjointPathSet, KFlow};
use crate::graph::EdgeId;
use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpConfig {
    /// A demand is violated when its cheapest union is shorter than `1 - eps_sep`.
    pub eps_sep: f64,
    pub eps_feas: f64,
    pub row_cap: usize,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig { eps_sep: 1e-6, eps_feas: 1e-7, row_cap: 10_000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("restricted master failed numerically: {0}")]
    Numerical(#[from] MasterError),
}

/// Per-edge fractional cut values and their cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FracSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl FracSolution {
    pub fn new(x: Vec<f64>, costs: &[f64]) -> Self {
        let objective = x.iter().zip(costs).map(|(a, c)| a * c).sum();
        FracSolution { x, objective }
    }

    pub fn zeros(m: usize) -> Self {
        FracSolution { x: vec![0.0; m], objective: 0.0 }
    }
}

/// Row `sum_{e in edges} x_e >= 1` for one demand, with the disjoint paths
/// whose union produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutConstraint {
    pub demand: usize,
    pub edges: Vec<EdgeId>,
    pub witness: DisjointPathSet,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Separation {
    /// The demand's cheapest union is too short; `violation = 1 - length`.
    Violated {
        row: CutConstraint,
        violation: f64,
    },
    Satisfied,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    /// Row cap hit; `x` is the last restricted-master optimum.
    NonConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpReport {
    pub status: LpStatus,
    pub objective: f64,
    pub rows: usize,
    pub rounds: usize,
    pub pivots: usize,
    /// Restricted-master objective after each round.
    pub objective_trace: Vec<f64>,
    /// Cheapest union length minus one per demand; `None` for demands whose
    /// graph connectivity is already below threshold.
    pub slacks: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: FracSolution,
    pub report: LpReport,
    pub pool: Vec<CutConstraint>,
}

fn cheapest_union(instance: &Instance, x: &[f64], index: usize) -> Option<DisjointPathSet> {
    let d = instance.demands()[index];
    match min_cost_k_flow(&instance.graph().view(), x, instance.semantics(), d.u, d.v, d.k) {
        Ok(KFlow::Paths(set)) => Some(set),
        Ok(KFlow::Insufficient(_)) => None,
        Err(e) => panic!("validated instance rejected by separation: {e}"),
    }
}

/// Exact separation for one demand: the cheapest `k`-path union under `x`
/// is returned as a row if it is shorter than `1 - eps_sep`.
pub fn separate(instance: &Instance, x: &[f64], demand: usize, eps_sep: f64) -> Separation {
    match cheapest_union(instance, x, demand) {
        Some(set) if set.union_length < 1.0 - eps_sep => {
            let violation = 1.0 - set.union_length;
            Separation::Violated { row: CutConstraint { demand, edges: set.union.clone(), witness: set }, violation }
        }
        _ => Separation::Satisfied,
    }
}

/// Cutting-plane solve. Each round re-optimizes the restricted master, then
/// separates every live demand (in parallel, collected in index order) and
/// adds one row per violated demand.
pub fn solve_lp(instance: &Instance, config: &LpConfig) -> Result<LpSolution, LpError> {
    let view = instance.graph().view();
    let live: Vec<usize> = (0..instance.demands().len())
        .filter(|&i| {
            let d = instance.demands()[i];
            has_paths(&view, instance.semantics(), d.u, d.v, d.k).expect("validated demand")
        })
        .collect();

    let mut master = MasterLp::new(instance.costs());
    let mut pool: Vec<CutConstraint> = Vec::new();
    let mut trace = Vec::new();
    let mut rounds = 0;
    let mut status = LpStatus::Optimal;
    let mut sol = master.solve()?;
    loop {
        rounds += 1;
        let found: Vec<(CutConstraint, f64)> = live
            .par_iter()
            .filter_map(|&i| match separate(instance, &sol.x, i, config.eps_sep) {
                Separation::Violated { row, violation } => Some((row, violation)),
                Separation::Satisfied => None,
            })
            .collect();
        if found.is_empty() {
            break;
        }
        if pool.len() + found.len() > config.row_cap {
            status = LpStatus::NonConverged;
            break;
        }
        for (row, _) in found {
            master.add_row(&row.edges)?;
            pool.push(row);
        }
        sol = master.solve()?;
        trace.push(sol.objective);
    }

    let slacks = (0..instance.demands().len())
        .map(|i| {
            if live.binary_search(&i).is_err() {
                return None;
            }
            cheapest_union(instance, &sol.x, i).map(|s| s.union_length - 1.0)
        })
        .collect();
    let report = LpReport {
        status,
        objective: sol.objective,
        rows: pool.len(),
        rounds,
        pivots: sol.pivots,
        objective_trace: trace,
        slacks,
    };
    Ok(LpSolution { x: FracSolution::new(sol.x, instance.costs()), report, pool })
}
