//! Seeded instance generator.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`. Only two
//! primitives draw from it, both on `next_u64`:
//!
//! * `below(n)`: rejection sampling; draws `x` until `x < 2^64 - (2^64 mod n)`
//!   and returns `x mod n`.
//! * `chance(p)`: `(x >> 11) * 2^-53 < p`.
//!
//! Any implementation of ChaCha8 with the same seeding reproduces the same
//! instances by following the draw order below.
//!
//! Draw order: graph first (G(n,p): pairs `u < v` in lexicographic order,
//! one `chance` each; multigraph: `m` times `u = below(n)`, then
//! `v = below(n - 1)` shifted past `u`; grid: no draws), then one cost per
//! item in id order (edges, or vertices for vertex removal;
//! `cost_min + below(cost_max - cost_min + 1)`), then per
//! demand a threshold (`k_min + below(k_max - k_min + 1)`) and a pair index
//! into the sorted list of unused eligible pairs.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectivity::connectivity;
use crate::graph::{Graph, VertexId};
use crate::instance::{Demand, Instance, InstanceError, Removal, Semantics};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Gnp { n: usize, p: f64 },
    Grid { rows: usize, cols: usize },
    Multigraph { n: usize, m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub model: Model,
    pub seed: u64,
    pub cost_min: u32,
    pub cost_max: u32,
    pub demands: usize,
    pub k_min: u32,
    pub k_max: u32,
    pub removal: Removal,
    pub semantics: Semantics,
    /// Allow pairs whose connectivity is already below the threshold.
    pub allow_vacuous: bool,
}

impl GenConfig {
    pub fn new(model: Model, seed: u64) -> Self {
        GenConfig {
            model,
            seed,
            cost_min: 1,
            cost_max: 10,
            demands: 2,
            k_min: 1,
            k_max: 2,
            removal: Removal::Edge,
            semantics: Semantics::EdgeDisjoint,
            allow_vacuous: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("invalid generator parameter: {0}")]
    Parameter(String),
    #[error("no unused vertex pair has connectivity at least {k} (demand {index})")]
    NoPairs { index: usize, k: u32 },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

struct Draw(ChaCha8Rng);

impl Draw {
    fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let x = self.0.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    fn chance(&mut self, p: f64) -> bool {
        ((self.0.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64) < p
    }
}

fn check(cond: bool, msg: &str) -> Result<(), GenerateError> {
    if cond {
        Ok(())
    } else {
        Err(GenerateError::Parameter(msg.to_string()))
    }
}

fn build_graph(model: Model, rng: &mut Draw) -> Result<Graph, GenerateError> {
    let (n, pairs) = match model {
        Model::Gnp { n, p } => {
            check(n >= 2, "G(n,p) needs n >= 2")?;
            check((0.0..=1.0).contains(&p), "edge probability must lie in [0, 1]")?;
            let mut pairs = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.chance(p) {
                        pairs.push((u, v));
                    }
                }
            }
            (n, pairs)
        }
        Model::Grid { rows, cols } => {
            check(rows >= 1 && cols >= 1 && rows * cols >= 2, "grid needs at least two cells")?;
            let id = |r: usize, c: usize| r * cols + c;
            let mut pairs = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        pairs.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        pairs.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            (rows * cols, pairs)
        }
        Model::Multigraph { n, m } => {
            check(n >= 2, "multigraph needs n >= 2")?;
            let pairs = (0..m)
                .map(|_| {
                    let u = rng.below(n as u64) as usize;
                    let mut v = rng.below(n as u64 - 1) as usize;
                    if v >= u {
                        v += 1;
                    }
                    (u.min(v), u.max(v))
                })
                .collect();
            (n, pairs)
        }
    };
    Graph::from_pairs(n, &pairs).map_err(|e| GenerateError::Instance(InstanceError::Graph(e)))
}

/// Builds the instance described by `config`; the same config always yields
/// the same instance.
pub fn generate_instance(config: &GenConfig) -> Result<Instance, GenerateError> {
    check(config.cost_min <= config.cost_max, "cost_min exceeds cost_max")?;
    check(config.k_min >= 1 && config.k_min <= config.k_max, "thresholds need 1 <= k_min <= k_max")?;
    let mut rng = Draw(ChaCha8Rng::seed_from_u64(config.seed));
    let graph = build_graph(config.model, &mut rng)?;
    let spread = (config.cost_max - config.cost_min) as u64 + 1;
    let items = match config.removal {
        Removal::Edge => graph.edge_count(),
        Removal::Vertex => graph.vertex_count(),
    };
    let costs: Vec<f64> = (0..items).map(|_| (config.cost_min as u64 + rng.below(spread)) as f64).collect();

    let n = graph.vertex_count();
    let view = graph.view();
    let mut lambda = vec![vec![0u32; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            lambda[u][v] = connectivity(&view, config.semantics, u, v).expect("valid pair");
        }
    }
    let mut used: Vec<(VertexId, VertexId)> = Vec::new();
    let mut demands = Vec::with_capacity(config.demands);
    for index in 0..config.demands {
        let k = config.k_min + rng.below((config.k_max - config.k_min) as u64 + 1) as u32;
        let eligible: Vec<(VertexId, VertexId)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|p| !used.contains(p) && (config.allow_vacuous || lambda[p.0][p.1] >= k))
            .collect();
        if eligible.is_empty() {
            return Err(GenerateError::NoPairs { index, k });
        }
        let (u, v) = eligible[rng.below(eligible.len() as u64) as usize];
        used.push((u, v));
        demands.push(Demand::new(u, v, k));
    }
    Ok(Instance::new(graph, costs, demands, config.removal, config.semantics)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::edge_connectivity;
    use crate::format::serialize_instance;

    #[test]
    fn same_seed_same_text() {
        let cfg = GenConfig::new(Model::Gnp { n: 8, p: 0.5 }, 42);
        let a = serialize_instance(&generate_instance(&cfg).unwrap()).unwrap();
        let b = serialize_instance(&generate_instance(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        let other = GenConfig { seed: 43, ..cfg };
        assert_ne!(a, serialize_instance(&generate_instance(&other).unwrap()).unwrap());
    }

    #[test]
    fn grid_pairs_meet_threshold() {
        for seed in 0..20 {
            let cfg =
                GenConfig { demands: 3, k_min: 2, k_max: 2, ..GenConfig::new(Model::Grid { rows: 3, cols: 3 }, seed) };
            let inst = generate_instance(&cfg).unwrap();
            assert_eq!(inst.graph().edge_count(), 12);
            for d in inst.demands() {
                assert!(edge_connectivity(&inst.graph().view(), d.u, d.v).unwrap() >= 2);
            }
        }
    }

    #[test]
    fn empty_random_graph_has_no_pairs() {
        let cfg = GenConfig::new(Model::Gnp { n: 6, p: 0.0 }, 1);
        assert!(matches!(generate_instance(&cfg), Err(GenerateError::NoPairs { index: 0, .. })));
    }

    #[test]
    fn too_many_demands() {
        let cfg = GenConfig { demands: 2, k_min: 1, k_max: 1, ..GenConfig::new(Model::Grid { rows: 1, cols: 2 }, 0) };
        assert!(matches!(generate_instance(&cfg), Err(GenerateError::NoPairs { index: 1, .. })));
    }

    #[test]
    fn multigraph_shape_and_costs() {
        let cfg = GenConfig { cost_min: 3, cost_max: 4, ..GenConfig::new(Model::Multigraph { n: 5, m: 15 }, 7) };
        let inst = generate_instance(&cfg).unwrap();
        assert_eq!(inst.graph().edge_count(), 15);
        assert!(inst.costs().iter().all(|&c| c == 3.0 || c == 4.0));
    }

    #[test]
    fn vertex_removal_costs_per_vertex() {
        let cfg = GenConfig {
            removal: Removal::Vertex,
            semantics: Semantics::VertexDisjoint,
            ..GenConfig::new(Model::Gnp { n: 7, p: 0.6 }, 5)
        };
        let inst = generate_instance(&cfg).unwrap();
        assert_eq!(inst.costs().len(), 7);
        assert_eq!(inst.item_count(), 7);
    }

    #[test]
    fn bad_parameters() {
        let mut cfg = GenConfig::new(Model::Gnp { n: 5, p: 1.5 }, 0);
        assert!(matches!(generate_instance(&cfg), Err(GenerateError::Parameter(_))));
        cfg.model = Model::Gnp { n: 5, p: 0.5 };
        cfg.k_min = 0;
        assert!(matches!(generate_instance(&cfg), Err(GenerateError::Parameter(_))));
    }

    #[test]
    fn below_is_uniform_enough() {
        let mut rng = Draw(ChaCha8Rng::seed_from_u64(9));
        let mut counts = [0u32; 3];
        for _ in 0..30_000 {
            counts[rng.below(3) as usize] += 1;
        }
        assert!(counts.iter().all(|&c| (9_000..11_000).contains(&c)), "{counts:?}");
    }
}
