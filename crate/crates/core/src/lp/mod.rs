//! Cutting-plane LP relaxation of the multi-route cut problem.
//!
//! For every demand `(u, v, k)` and every set of `k` disjoint `u`–`v` paths,
//! some path must be hit, so `sum_{e in union} x_e >= 1`. The rows are
//! generated lazily: a min-cost `k`-flow under lengths `x` finds the
//! cheapest union, which is violated exactly when its length is below one.

mod engine;
mod simplex;

pub use engine::{
    separate, solve_lp, CutConstraint, FracSolution, LpConfig, LpError, LpReport, LpSolution, LpStatus, Separation,
};
pub use simplex::{solve_restricted_master, MasterError, MasterLp, MasterSolution};
