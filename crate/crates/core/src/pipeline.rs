//! End-to-end solve: validate, split vertex variants, LP, round, prune,
//! verify, and optionally compare against the exhaustive oracle.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::connectivity::{is_feasible, verify_cut, VerificationReport};
use crate::format::{parse_instance, serialize_instance, FormatError};
use crate::instance::{vertex_split_transform, Instance, Removal, Semantics};
use crate::lp::{solve_lp, LpConfig, LpReport, LpStatus};
use crate::oracle::{brute_force_opt, OracleError, OracleOutcome, DEFAULT_SIZE_CAP};
use crate::rounding::{prune_items, relaxed_thresholds, round_exact, Mode, RegionStep, RoundingError};

pub const SCHEMA: &str = "mrc-report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_LP: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub mode: Mode,
    pub lp: LpConfig,
    /// Largest item count the oracle is run on; 0 disables it.
    pub oracle_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { mode: Mode::Exact, lp: LpConfig::default(), oracle_cap: DEFAULT_SIZE_CAP }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Parse(#[from] FormatError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INPUT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Infeasible,
    VerificationFailed,
    LpNonConverged,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Ok => EXIT_OK,
            RunStatus::Infeasible | RunStatus::VerificationFailed => EXIT_INFEASIBLE,
            RunStatus::LpNonConverged => EXIT_LP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    /// SHA-256 of the canonical text form.
    pub digest: Option<String>,
    pub vertices: usize,
    pub edges: usize,
    pub demands: usize,
    pub removal: Removal,
    pub semantics: Semantics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutSummary {
    /// Edge ids, or vertex ids for vertex removal.
    pub removed: Vec<usize>,
    pub cost: f64,
    pub thresholds: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleSummary {
    Optimal { cost: f64, set: Vec<usize>, optimal_count: usize, explored: usize },
    Infeasible { explored: usize },
    Skipped { items: usize, cap: usize },
}

impl OracleSummary {
    pub fn cost(&self) -> Option<f64> {
        match self {
            OracleSummary::Optimal { cost, .. } => Some(*cost),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub lp_ms: f64,
    pub round_ms: f64,
    pub verify_ms: f64,
    pub oracle_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub status: RunStatus,
    pub exit_code: i32,
    pub instance: InstanceSummary,
    pub mode: Mode,
    pub lp: Option<LpReport>,
    pub cut: Option<CutSummary>,
    /// Cut cost over LP objective; 1 when both vanish, absent when only the
    /// LP does.
    pub ratio: Option<f64>,
    pub verification: Option<VerificationReport>,
    pub oracle: Option<OracleSummary>,
    /// Region-growing steps. For vertex removal, edge ids refer to the
    /// split instance.
    pub trace: Vec<RegionStep>,
    pub error: Option<ErrorInfo>,
    pub timings: Timings,
}

impl RunReport {
    /// Pretty JSON; without timings the output depends only on the inputs.
    pub fn to_json(&self, with_timings: bool) -> String {
        let mut value = serde_json::to_value(self).expect("report is serializable");
        if !with_timings {
            value.as_object_mut().expect("report is an object").remove("timings");
        }
        serde_json::to_string_pretty(&value).expect("report is serializable")
    }

    pub fn cost(&self) -> Option<f64> {
        self.cut.as_ref().map(|c| c.cost)
    }
}

pub fn instance_digest(instance: &Instance) -> Option<String> {
    let text = serialize_instance(instance).ok()?;
    Some(Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect())
}

pub fn ratio(cost: f64, lp: f64) -> Option<f64> {
    if lp > 1e-12 {
        Some(cost / lp)
    } else if cost <= 1e-12 {
        Some(1.0)
    } else {
        None
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Runs the exhaustive oracle at the original thresholds when the instance
/// is within `cap`.
pub fn oracle_summary(instance: &Instance, cap: usize) -> OracleSummary {
    match brute_force_opt(instance, cap) {
        Ok(OracleOutcome::Optimal(r)) => {
            OracleSummary::Optimal { cost: r.cost, set: r.set, optimal_count: r.optimal_count, explored: r.explored }
        }
        Ok(OracleOutcome::Infeasible { explored }) => OracleSummary::Infeasible { explored },
        Err(OracleError::TooLarge { items, cap }) => OracleSummary::Skipped { items, cap },
    }
}

pub fn run_pipeline(instance: &Instance, options: &SolveOptions) -> Result<RunReport, PipelineError> {
    let beta = options.mode.beta();
    if !(beta.is_finite() && beta >= 1.0) {
        return Err(PipelineError::Config(format!("beta must be finite and at least 1, got {beta}")));
    }
    if !(options.lp.eps_sep >= 0.0 && options.lp.eps_sep < 1.0) {
        return Err(PipelineError::Config("separation tolerance must lie in [0, 1)".into()));
    }
    let start = Instant::now();
    let thresholds = relaxed_thresholds(instance, beta);
    let mut report = RunReport {
        schema: SCHEMA.to_string(),
        status: RunStatus::Ok,
        exit_code: EXIT_OK,
        instance: InstanceSummary {
            digest: instance_digest(instance),
            vertices: instance.graph().vertex_count(),
            edges: instance.graph().edge_count(),
            demands: instance.demands().len(),
            removal: instance.removal(),
            semantics: instance.semantics(),
        },
        mode: options.mode,
        lp: None,
        cut: None,
        ratio: None,
        verification: None,
        oracle: None,
        trace: Vec::new(),
        error: None,
        timings: Timings::default(),
    };
    let finish = |mut report: RunReport, status: RunStatus, error: Option<ErrorInfo>| {
        report.status = status;
        report.exit_code = status.exit_code();
        report.error = error;
        report.timings.total_ms = ms(start);
        Ok(report)
    };

    // Removing every removable item is the strongest possible cut.
    let everything: Vec<usize> = (0..instance.item_count()).filter(|&i| instance.is_removable(i)).collect();
    if !is_feasible(instance, &everything, &thresholds) {
        let full = verify_cut(instance, &everything, &thresholds).expect("removable items are valid");
        let demand = full.pairs.iter().position(|p| !p.satisfied).unwrap_or(0);
        let error = ErrorInfo {
            code: "infeasible".into(),
            message: format!("demand {demand} stays at threshold even with every removable item removed"),
        };
        return finish(report, RunStatus::Infeasible, Some(error));
    }

    let split = match instance.removal() {
        Removal::Vertex => Some(vertex_split_transform(instance).expect("validated instance splits")),
        Removal::Edge => None,
    };
    let work = split.as_ref().map_or(instance, |(w, _)| w);

    let t = Instant::now();
    let lp = match solve_lp(work, &options.lp) {
        Ok(lp) => lp,
        Err(e) => {
            report.timings.lp_ms = ms(t);
            let error = ErrorInfo { code: "lp_numerical".into(), message: e.to_string() };
            return finish(report, RunStatus::LpNonConverged, Some(error));
        }
    };
    report.timings.lp_ms = ms(t);
    let lp_status = lp.report.status;
    let lp_objective = lp.report.objective;
    report.lp = Some(lp.report);

    let t = Instant::now();
    let rounded = match round_exact(work, &lp.x, options.mode) {
        Ok(cut) => cut,
        Err(RoundingError::Infeasible { demand }) => {
            report.timings.round_ms = ms(t);
            let error = ErrorInfo {
                code: "infeasible".into(),
                message: format!("demand {demand} cannot be cut without removing a terminal"),
            };
            return finish(report, RunStatus::Infeasible, Some(error));
        }
        Err(e) => unreachable!("rounding rejected a validated run: {e}"),
    };
    let removed = match &split {
        Some((_, map)) => {
            let vertices = map.vertices_of(&rounded.removed).expect("rounding removes only vertex arcs");
            prune_items(instance, &vertices, &thresholds).expect("split cut is feasible")
        }
        None => rounded.removed.clone(),
    };
    report.timings.round_ms = ms(t);
    let cost = instance.cut_cost(&removed);
    report.ratio = ratio(cost, lp_objective);
    report.trace = rounded.trace;
    report.cut = Some(CutSummary { removed: removed.clone(), cost, thresholds: thresholds.clone() });

    let t = Instant::now();
    let verification = verify_cut(instance, &removed, &thresholds).expect("cut items are valid");
    report.timings.verify_ms = ms(t);
    let feasible = verification.feasible;
    report.verification = Some(verification);

    if options.oracle_cap > 0 {
        let t = Instant::now();
        report.oracle = Some(oracle_summary(instance, options.oracle_cap));
        report.timings.oracle_ms = ms(t);
    }

    if !feasible {
        let error =
            ErrorInfo { code: "verification_failed".into(), message: "cut leaves a demand at threshold".into() };
        return finish(report, RunStatus::VerificationFailed, Some(error));
    }
    if lp_status == LpStatus::NonConverged {
        let error = ErrorInfo {
            code: "lp_non_converged".into(),
            message: format!("row cap {} reached before separation converged", options.lp.row_cap),
        };
        return finish(report, RunStatus::LpNonConverged, Some(error));
    }
    finish(report, RunStatus::Ok, None)
}

pub fn solve_text(text: &str, options: &SolveOptions) -> Result<RunReport, PipelineError> {
    run_pipeline(&parse_instance(text)?, options)
}
