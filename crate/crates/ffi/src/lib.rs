//! C ABI for the multi-route cut solver.
//!
//! Instances and reports are opaque handles created and destroyed through
//! this API. Every fallible call returns an [`MrcStatus`]; on failure a
//! message is available from [`mrc_last_error`] on the same thread until the
//! next failing call. Status values 0, 2, 3 and 4 match the `mrc` CLI exit
//! codes.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mrc::lp::LpConfig;
use mrc::pipeline::{oracle_summary, run_pipeline, OracleSummary, RunReport, RunStatus, SolveOptions};
use mrc::rounding::Mode;
use mrc::{parse_instance, serialize_instance, Instance};

/// Parsed problem instance.
pub struct MrcInstance {
    inner: Instance,
}

/// Result of one solver run, with its JSON rendering cached.
pub struct MrcReport {
    inner: RunReport,
    json: CString,
    json_timed: CString,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MrcStatus {
    Ok = 0,
    /// No cut exists, or the produced cut failed verification.
    Infeasible = 2,
    /// Unparseable text or invalid parameters.
    InputError = 3,
    /// The LP hit its row cap or failed numerically.
    LpNonConverged = 4,
    NullArgument = 10,
    InvalidUtf8 = 11,
    /// A caller buffer was too small; the needed length was still written.
    BufferTooSmall = 12,
    /// Internal panic caught at the boundary.
    Internal = 13,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: MrcStatus, msg: impl Into<String>) -> MrcStatus {
    set_error(msg);
    status
}

fn guard(body: impl FnOnce() -> MrcStatus) -> MrcStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| fail(MrcStatus::Internal, "internal panic"))
}

fn report_status(status: RunStatus) -> MrcStatus {
    match status {
        RunStatus::Ok => MrcStatus::Ok,
        RunStatus::Infeasible | RunStatus::VerificationFailed => MrcStatus::Infeasible,
        RunStatus::LpNonConverged => MrcStatus::LpNonConverged,
    }
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mrc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mrc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses an instance from NUL-terminated text.
///
/// # Safety
/// `text` must be NULL or a valid NUL-terminated string; `out` must be NULL
/// or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mrc_instance_parse(text: *const c_char, out: *mut *mut MrcInstance) -> MrcStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(MrcStatus::NullArgument, "text and out must be non-null");
        }
        // SAFETY: non-null and NUL-terminated per the contract above.
        let Ok(text) = (unsafe { CStr::from_ptr(text) }).to_str() else {
            return fail(MrcStatus::InvalidUtf8, "instance text is not UTF-8");
        };
        match parse_instance(text) {
            Ok(inner) => {
                // SAFETY: `out` is non-null and writable per the contract.
                unsafe { *out = Box::into_raw(Box::new(MrcInstance { inner })) };
                MrcStatus::Ok
            }
            Err(e) => fail(MrcStatus::InputError, e.to_string()),
        }
    })
}

/// Releases an instance. NULL is ignored.
///
/// # Safety
/// `instance` must be NULL or a handle from [`mrc_instance_parse`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn mrc_instance_free(instance: *mut MrcInstance) {
    if !instance.is_null() {
        // SAFETY: allocated by Box::into_raw in mrc_instance_parse.
        drop(unsafe { Box::from_raw(instance) });
    }
}

/// Vertex count, or 0 for NULL.
///
/// # Safety
/// `instance` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_instance_vertex_count(instance: *const MrcInstance) -> usize {
    // SAFETY: live handle or NULL per the contract.
    unsafe { instance.as_ref() }.map_or(0, |i| i.inner.graph().vertex_count())
}

/// Edge count, or 0 for NULL.
///
/// # Safety
/// `instance` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_instance_edge_count(instance: *const MrcInstance) -> usize {
    // SAFETY: live handle or NULL per the contract.
    unsafe { instance.as_ref() }.map_or(0, |i| i.inner.graph().edge_count())
}

/// Demand count, or 0 for NULL.
///
/// # Safety
/// `instance` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_instance_demand_count(instance: *const MrcInstance) -> usize {
    // SAFETY: live handle or NULL per the contract.
    unsafe { instance.as_ref() }.map_or(0, |i| i.inner.demands().len())
}

/// Writes the canonical text form to `*out`; free it with [`mrc_string_free`].
///
/// # Safety
/// `instance` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mrc_instance_serialize(instance: *const MrcInstance, out: *mut *mut c_char) -> MrcStatus {
    guard(|| {
        // SAFETY: live handle or NULL per the contract.
        let Some(instance) = (unsafe { instance.as_ref() }) else {
            return fail(MrcStatus::NullArgument, "instance must be non-null");
        };
        if out.is_null() {
            return fail(MrcStatus::NullArgument, "out must be non-null");
        }
        match serialize_instance(&instance.inner) {
            Ok(text) => {
                let s = CString::new(text).expect("instance text has no NUL");
                // SAFETY: `out` is non-null and writable.
                unsafe { *out = s.into_raw() };
                MrcStatus::Ok
            }
            Err(e) => fail(MrcStatus::InputError, e.to_string()),
        }
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from [`mrc_instance_serialize`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrc_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by CString::into_raw in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Runs the full pipeline. `beta <= 1` selects exact mode; larger values
/// solve at thresholds `ceil(beta * k)`. `oracle_cap` bounds the exhaustive
/// comparison (0 disables it). `row_cap` of 0 keeps the default.
///
/// A report is written to `*out` whenever the run got that far, including
/// infeasible and non-converged runs; the return value is the run status.
///
/// # Safety
/// `instance` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mrc_solve(
    instance: *const MrcInstance,
    beta: f64,
    oracle_cap: usize,
    row_cap: usize,
    out: *mut *mut MrcReport,
) -> MrcStatus {
    guard(|| {
        // SAFETY: live handle or NULL per the contract.
        let Some(instance) = (unsafe { instance.as_ref() }) else {
            return fail(MrcStatus::NullArgument, "instance must be non-null");
        };
        if out.is_null() {
            return fail(MrcStatus::NullArgument, "out must be non-null");
        }
        if beta.is_nan() {
            return fail(MrcStatus::InputError, "beta is NaN");
        }
        let mode = if beta <= 1.0 { Mode::Exact } else { Mode::Bicriteria { beta } };
        let mut lp = LpConfig::default();
        if row_cap > 0 {
            lp.row_cap = row_cap;
        }
        let report = match run_pipeline(&instance.inner, &SolveOptions { mode, lp, oracle_cap }) {
            Ok(r) => r,
            Err(e) => return fail(MrcStatus::InputError, e.to_string()),
        };
        let status = report_status(report.status);
        if let Some(err) = &report.error {
            set_error(format!("{}: {}", err.code, err.message));
        }
        let json = CString::new(report.to_json(false)).expect("JSON has no NUL");
        let json_timed = CString::new(report.to_json(true)).expect("JSON has no NUL");
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = Box::into_raw(Box::new(MrcReport { inner: report, json, json_timed })) };
        status
    })
}

/// Releases a report. NULL is ignored.
///
/// # Safety
/// `report` must be NULL or a handle from [`mrc_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrc_report_free(report: *mut MrcReport) {
    if !report.is_null() {
        // SAFETY: allocated by Box::into_raw in mrc_solve.
        drop(unsafe { Box::from_raw(report) });
    }
}

/// Status of the run that produced `report`.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_report_status(report: *const MrcReport) -> MrcStatus {
    // SAFETY: live handle or NULL per the contract.
    match unsafe { report.as_ref() } {
        Some(r) => report_status(r.inner.status),
        None => fail(MrcStatus::NullArgument, "report must be non-null"),
    }
}

/// Report JSON owned by the handle. Without timings the text depends only
/// on the instance and options. NULL for a NULL handle.
///
/// # Safety
/// `report` must be NULL or a live handle; the result lives as long as it.
#[no_mangle]
pub unsafe extern "C" fn mrc_report_json(report: *const MrcReport, with_timings: bool) -> *const c_char {
    // SAFETY: live handle or NULL per the contract.
    unsafe { report.as_ref() }.map_or(ptr::null(), |r| if with_timings { &r.json_timed } else { &r.json }.as_ptr())
}

/// Writes the cut cost. Fails with `Infeasible` when the run produced no cut.
///
/// # Safety
/// `report` must be NULL or a live handle; `cost` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mrc_report_cost(report: *const MrcReport, cost: *mut f64) -> MrcStatus {
    // SAFETY: live handle or NULL per the contract.
    let Some(r) = (unsafe { report.as_ref() }) else {
        return fail(MrcStatus::NullArgument, "report must be non-null");
    };
    if cost.is_null() {
        return fail(MrcStatus::NullArgument, "cost must be non-null");
    }
    match r.inner.cost() {
        Some(c) => {
            // SAFETY: non-null and writable.
            unsafe { *cost = c };
            MrcStatus::Ok
        }
        None => fail(MrcStatus::Infeasible, "run produced no cut"),
    }
}

/// Writes the LP objective. Fails with `Infeasible` when the LP never ran.
///
/// # Safety
/// `report` must be NULL or a live handle; `objective` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mrc_report_lp_objective(report: *const MrcReport, objective: *mut f64) -> MrcStatus {
    // SAFETY: live handle or NULL per the contract.
    let Some(r) = (unsafe { report.as_ref() }) else {
        return fail(MrcStatus::NullArgument, "report must be non-null");
    };
    if objective.is_null() {
        return fail(MrcStatus::NullArgument, "objective must be non-null");
    }
    match &r.inner.lp {
        Some(lp) => {
            // SAFETY: non-null and writable.
            unsafe { *objective = lp.objective };
            MrcStatus::Ok
        }
        None => fail(MrcStatus::Infeasible, "LP was not solved"),
    }
}

/// Whether the cut passed verification; false for NULL or cut-less runs.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_report_feasible(report: *const MrcReport) -> bool {
    // SAFETY: live handle or NULL per the contract.
    unsafe { report.as_ref() }.and_then(|r| r.inner.verification.as_ref()).is_some_and(|v| v.feasible)
}

/// Copies removed item ids (edges, or vertices for vertex removal) into
/// `buf`. `*len` receives the number of ids; if it exceeds `cap`, nothing
/// is copied and `BufferTooSmall` is returned. `buf` may be NULL when `cap`
/// is 0.
///
/// # Safety
/// `report` must be NULL or a live handle; `buf` must hold `cap` elements;
/// `len` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mrc_report_removed(
    report: *const MrcReport,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> MrcStatus {
    // SAFETY: live handle or NULL per the contract.
    let Some(r) = (unsafe { report.as_ref() }) else {
        return fail(MrcStatus::NullArgument, "report must be non-null");
    };
    if len.is_null() {
        return fail(MrcStatus::NullArgument, "len must be non-null");
    }
    let Some(cut) = &r.inner.cut else {
        return fail(MrcStatus::Infeasible, "run produced no cut");
    };
    // SAFETY: `len` is non-null and writable.
    unsafe { *len = cut.removed.len() };
    if cut.removed.len() > cap {
        return fail(MrcStatus::BufferTooSmall, format!("need room for {} ids", cut.removed.len()));
    }
    if !cut.removed.is_empty() {
        if buf.is_null() {
            return fail(MrcStatus::NullArgument, "buf must be non-null");
        }
        // SAFETY: `buf` holds at least `cap >= removed.len()` elements.
        unsafe { ptr::copy_nonoverlapping(cut.removed.as_ptr(), buf, cut.removed.len()) };
    }
    MrcStatus::Ok
}

/// Exact optimum by exhaustive search over at most `cap` items. Returns
/// `Infeasible` when no cut exists and `InputError` when the instance is
/// over the cap.
///
/// # Safety
/// `instance` must be NULL or a live handle; `cost` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mrc_oracle(instance: *const MrcInstance, cap: usize, cost: *mut f64) -> MrcStatus {
    guard(|| {
        // SAFETY: live handle or NULL per the contract.
        let Some(instance) = (unsafe { instance.as_ref() }) else {
            return fail(MrcStatus::NullArgument, "instance must be non-null");
        };
        if cost.is_null() {
            return fail(MrcStatus::NullArgument, "cost must be non-null");
        }
        match oracle_summary(&instance.inner, cap) {
            OracleSummary::Optimal { cost: c, .. } => {
                // SAFETY: non-null and writable.
                unsafe { *cost = c };
                MrcStatus::Ok
            }
            OracleSummary::Infeasible { .. } => fail(MrcStatus::Infeasible, "no feasible cut exists"),
            OracleSummary::Skipped { items, cap } => {
                fail(MrcStatus::InputError, format!("{items} items exceed the oracle cap {cap}"))
            }
        }
    })
}
