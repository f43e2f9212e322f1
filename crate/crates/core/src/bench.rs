//! Fixed seeded suites and the benchmark table.
//!
//! Each suite draws instance `j` from seed `base_seed + offset + j`, skipping
//! seeds whose parameters cannot be met (for example no pair reaches the
//! sampled threshold) or that exceed the suite's edge bound, until `count`
//! instances are collected.
//!
//! | suite       | base seed | count | thresholds | removal |
//! |-------------|-----------|-------|------------|---------|
//! | `sandwich`  | 1000      | 240   | 1..=3      | edge    |
//! | `two-route` | 2000      | 120   | 2          | edge    |
//! | `tradeoff`  | 3000      | 60    | 2..=4      | edge    |
//! | `multicut`  | 4000      | 100   | 1          | edge    |
//! | `vertex`    | 5000      | 120   | 1..=3      | vertex  |

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generate::{generate_instance, GenConfig, GenerateError, Model};
use crate::instance::{Instance, Removal, Semantics};
use crate::pipeline::{run_pipeline, RunReport, RunStatus, SolveOptions};
use crate::rounding::Mode;

#[derive(Debug, Clone, Copy)]
pub struct Suite {
    pub name: &'static str,
    pub base_seed: u64,
    pub count: usize,
    pub max_edges: Option<usize>,
    pub config: fn(seed: u64, j: usize) -> GenConfig,
}

#[derive(Debug, Clone)]
pub struct SuiteInstance {
    pub seed: u64,
    pub config: GenConfig,
    pub instance: Instance,
}

fn base(model: Model, seed: u64, demands: usize, k_min: u32, k_max: u32) -> GenConfig {
    GenConfig { demands, k_min, k_max, ..GenConfig::new(model, seed) }
}

pub const SANDWICH: Suite = Suite {
    name: "sandwich",
    base_seed: 1000,
    count: 240,
    max_edges: Some(12),
    config: |seed, j| {
        let model = match j % 4 {
            0 => {
                let n = 4 + j % 7;
                Model::Multigraph { n, m: 12.min(n + 1 + j % 4) }
            }
            1 => {
                let (rows, cols) = [(2, 3), (2, 4), (3, 3), (3, 2)][j / 4 % 4];
                Model::Grid { rows, cols }
            }
            2 => Model::Gnp { n: 5 + j % 4, p: 0.45 },
            _ => Model::Multigraph { n: 5, m: 10 + j % 3 },
        };
        base(model, seed, 1 + j % 3, 1, 3)
    },
};

pub const TWO_ROUTE: Suite = Suite {
    name: "two-route",
    base_seed: 2000,
    count: 120,
    max_edges: None,
    config: |seed, j| {
        let model = match j % 3 {
            0 => {
                let n = 6 + j % 8;
                Model::Multigraph { n, m: 2 * n + j % 5 }
            }
            1 => Model::Grid { rows: 3 + j % 2, cols: 3 + j % 3 },
            _ => Model::Gnp { n: 8 + j % 5, p: 0.35 },
        };
        base(model, seed, 1 + j % 4, 2, 2)
    },
};

pub const TRADEOFF: Suite = Suite {
    name: "tradeoff",
    base_seed: 3000,
    count: 60,
    max_edges: None,
    config: |seed, j| {
        let model = if j % 2 == 0 {
            let n = 6 + j % 5;
            Model::Multigraph { n, m: 3 * n }
        } else {
            Model::Gnp { n: 7 + j % 3, p: 0.7 }
        };
        base(model, seed, 1 + j % 3, 2, 4)
    },
};

pub const MULTICUT: Suite = Suite {
    name: "multicut",
    base_seed: 4000,
    count: 100,
    max_edges: None,
    config: |seed, j| {
        let model = match j % 3 {
            0 => {
                let n = 6 + j % 9;
                Model::Multigraph { n, m: 2 * n }
            }
            1 => Model::Grid { rows: 2 + j % 3, cols: 3 + j % 3 },
            _ => Model::Gnp { n: 8 + j % 6, p: 0.3 },
        };
        base(model, seed, 2 + j % 4, 1, 1)
    },
};

pub const VERTEX: Suite = Suite {
    name: "vertex",
    base_seed: 5000,
    count: 120,
    max_edges: None,
    config: |seed, j| {
        let n = 4 + j % 4;
        let model = if j % 3 == 0 { Model::Multigraph { n, m: n + j % 5 } } else { Model::Gnp { n, p: 0.5 } };
        let semantics = if j % 2 == 0 { Semantics::VertexDisjoint } else { Semantics::EdgeDisjoint };
        GenConfig { removal: Removal::Vertex, semantics, ..base(model, seed, 1 + j % 2, 1, 3) }
    },
};

pub const ALL_SUITES: [Suite; 5] = [SANDWICH, TWO_ROUTE, TRADEOFF, MULTICUT, VERTEX];

pub fn suite_by_name(name: &str) -> Option<Suite> {
    ALL_SUITES.into_iter().find(|s| s.name == name)
}

pub fn build_suite(suite: &Suite, offset: u64) -> Vec<SuiteInstance> {
    let mut out = Vec::with_capacity(suite.count);
    let mut j = 0;
    while out.len() < suite.count && j < suite.count * 50 {
        let seed = suite.base_seed + offset + j as u64;
        let config = (suite.config)(seed, j);
        j += 1;
        let instance = match generate_instance(&config) {
            Ok(instance) => instance,
            Err(GenerateError::NoPairs { .. }) => continue,
            Err(e) => panic!("suite {} seed {seed}: {e}", suite.name),
        };
        if suite.max_edges.is_some_and(|cap| instance.graph().edge_count() > cap) {
            continue;
        }
        out.push(SuiteInstance { seed, config, instance });
    }
    out
}

/// Solves every instance in parallel; results keep suite order.
pub fn run_suite(instances: &[SuiteInstance], options: &SolveOptions) -> Vec<RunReport> {
    instances.par_iter().map(|s| run_pipeline(&s.instance, options).expect("suite options are valid")).collect()
}

/// Ratio ceiling `2 ln(p + 1) + 1` for `p` demand pairs.
pub fn log_bound(pairs: usize) -> f64 {
    2.0 * ((pairs as f64) + 1.0).ln() + 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub suite: String,
    pub beta: f64,
    pub instances: usize,
    pub verified: usize,
    /// Runs correctly reported infeasible (no cut exists).
    pub infeasible: usize,
    pub mean_cost: f64,
    pub mean_lp: f64,
    pub ratio_min: f64,
    pub ratio_median: f64,
    pub ratio_p95: f64,
    pub ratio_max: f64,
    /// Runs whose LP objective vanished while the cut cost did not.
    pub ratio_undefined: usize,
    /// Runs whose ratio exceeds `2 ln(p + 1) + 1`.
    pub over_log_bound: usize,
    /// Runs where the oracle ran and matched the cut cost.
    pub oracle_matches: usize,
    pub oracle_runs: usize,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

pub fn summarize(suite: &str, beta: f64, reports: &[RunReport]) -> BenchRow {
    let cut: Vec<&RunReport> = reports.iter().filter(|r| r.cut.is_some()).collect();
    let n = cut.len().max(1) as f64;
    let mut ratios: Vec<f64> = cut.iter().filter_map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let over = cut.iter().filter(|r| r.ratio.is_none_or(|x| x > log_bound(r.instance.demands) + 1e-9)).count();
    let oracle: Vec<(f64, f64)> =
        reports.iter().filter_map(|r| Some((r.oracle.as_ref()?.cost()?, r.cost()?))).collect();
    BenchRow {
        suite: suite.to_string(),
        beta,
        instances: reports.len(),
        verified: reports.iter().filter(|r| r.status == RunStatus::Ok).count(),
        infeasible: reports.iter().filter(|r| r.status == RunStatus::Infeasible).count(),
        mean_cost: cut.iter().filter_map(|r| r.cost()).sum::<f64>() / n,
        mean_lp: cut.iter().filter_map(|r| r.lp.as_ref().map(|l| l.objective)).sum::<f64>() / n,
        ratio_min: quantile(&ratios, 0.0),
        ratio_median: quantile(&ratios, 0.5),
        ratio_p95: quantile(&ratios, 0.95),
        ratio_max: quantile(&ratios, 1.0),
        ratio_undefined: cut.len() - ratios.len(),
        over_log_bound: over,
        oracle_matches: oracle.iter().filter(|(opt, cost)| (opt - cost).abs() <= 1e-9).count(),
        oracle_runs: oracle.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub seed_offset: u64,
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    pub fn to_markdown(&self) -> String {
        let mut s = String::from(
            "| suite | beta | n | verified | infeasible | mean cost | mean LP | ratio min | median | p95 | max | undefined | over 2ln(p+1)+1 | oracle = cost |\n\
             |---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n",
        );
        for r in &self.rows {
            s += &format!(
                "| {} | {} | {} | {} | {} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} | {} | {} | {}/{} |\n",
                r.suite,
                r.beta,
                r.instances,
                r.verified,
                r.infeasible,
                r.mean_cost,
                r.mean_lp,
                r.ratio_min,
                r.ratio_median,
                r.ratio_p95,
                r.ratio_max,
                r.ratio_undefined,
                r.over_log_bound,
                r.oracle_matches,
                r.oracle_runs
            );
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "suite,beta,instances,verified,infeasible,mean_cost,mean_lp,ratio_min,ratio_median,ratio_p95,ratio_max,\
             ratio_undefined,over_log_bound,oracle_matches,oracle_runs\n",
        );
        for r in &self.rows {
            s += &format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.suite,
                r.beta,
                r.instances,
                r.verified,
                r.infeasible,
                r.mean_cost,
                r.mean_lp,
                r.ratio_min,
                r.ratio_median,
                r.ratio_p95,
                r.ratio_max,
                r.ratio_undefined,
                r.over_log_bound,
                r.oracle_matches,
                r.oracle_runs
            );
        }
        s
    }
}

pub const TRADEOFF_BETAS: [f64; 3] = [1.0, 1.5, 2.0];

/// The full benchmark: every suite in exact mode, plus the tradeoff suite at
/// each relaxation factor in [`TRADEOFF_BETAS`].
pub fn run_bench(seed_offset: u64, oracle_cap: usize) -> BenchTable {
    let mut rows = Vec::new();
    for suite in ALL_SUITES {
        let instances = build_suite(&suite, seed_offset);
        let betas: &[f64] = if suite.name == TRADEOFF.name { &TRADEOFF_BETAS } else { &[1.0] };
        for &beta in betas {
            let mode = if beta == 1.0 { Mode::Exact } else { Mode::Bicriteria { beta } };
            let options = SolveOptions { mode, oracle_cap, ..SolveOptions::default() };
            rows.push(summarize(suite.name, beta, &run_suite(&instances, &options)));
        }
    }
    BenchTable { seed_offset, rows }
}
