//! C ABI over the probe machine solvers.
//!
//! Graphs and run reports are opaque handles created and released by this
//! library. Every entry point returns a [`PmStatus`]; on failure a message is
//! available from [`pm_last_error`] on the same thread. Panics never cross the
//! boundary and are reported as `PM_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use probe_machine::engine::Mode;
use probe_machine::graph::{GraphFormat, InputGraph};
use probe_machine::solve::{solve_coloring, solve_hamilton, SolveError, SolveOptions, TableChoice};

/// Result of every fallible call. Values match the `pm` exit codes where
/// those apply.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmStatus {
    Ok = 0,
    Parse = 2,
    Infeasible = 3,
    Null = 10,
    Utf8 = 11,
    InvalidArgument = 12,
    Internal = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmMode {
    Exhaustive = 0,
    Stochastic = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct PmSolveOptions {
    pub mode: PmMode,
    pub seed: u64,
    /// Copies of each data and probe type in stochastic mode.
    pub copies: u64,
    /// 0 means no limit.
    pub max_steps: u64,
}

/// An input graph.
pub struct PmGraph(InputGraph);

/// A finished run: its JSON report and solution count.
pub struct PmRun {
    json: String,
    solutions: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

type Failure = (PmStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PmStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal error: panic in probe machine");
            PmStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    (PmStatus::Null, format!("{what} is null"))
}

fn from_solve(e: SolveError) -> Failure {
    match e {
        SolveError::Encode(e) => (PmStatus::Infeasible, e.to_string()),
        other => (PmStatus::Internal, other.to_string()),
    }
}

unsafe fn options(opts: *const PmSolveOptions) -> SolveOptions {
    let Some(o) = opts.as_ref() else {
        return SolveOptions::default();
    };
    SolveOptions {
        mode: match o.mode {
            PmMode::Exhaustive => Mode::Exhaustive,
            PmMode::Stochastic => Mode::Stochastic,
        },
        seed: o.seed,
        copies: o.copies,
        max_steps: if o.max_steps == 0 { u64::MAX } else { o.max_steps },
    }
}

/// Default options: exhaustive mode, seed 0, 20 copies, no step limit.
#[no_mangle]
pub extern "C" fn pm_solve_options_default() -> PmSolveOptions {
    let d = SolveOptions::default();
    PmSolveOptions {
        mode: PmMode::Exhaustive,
        seed: d.seed,
        copies: d.copies,
        max_steps: 0,
    }
}

/// Parses an edge list, DIMACS `.col` text or a JSON graph. The format is
/// detected from the content.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_graph_parse(text: *const c_char, out: *mut *mut PmGraph) -> PmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| (PmStatus::Utf8, e.to_string()))?;
        let g = InputGraph::parse(text, GraphFormat::detect(None, text))
            .map_err(|e| (PmStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(PmGraph(g)));
        Ok(())
    })
}

/// # Safety
/// `graph` must come from [`pm_graph_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pm_graph_free(graph: *mut PmGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of vertices, or 0 for a null graph.
///
/// # Safety
/// `graph` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn pm_graph_vertex_count(graph: *const PmGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.n())
}

unsafe fn finish(out: *mut *mut PmRun, json: serde_json::Result<String>, solutions: usize) -> Result<(), Failure> {
    let json = json.map_err(|e| (PmStatus::Internal, e.to_string()))?;
    *out = Box::into_raw(Box::new(PmRun { json, solutions }));
    Ok(())
}

/// Finds every Hamilton cycle. `opts` may be null for defaults.
///
/// # Safety
/// `graph` must be a live graph handle, `opts` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pm_solve_hamilton(
    graph: *const PmGraph,
    opts: *const PmSolveOptions,
    out: *mut *mut PmRun,
) -> PmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let report = solve_hamilton(&g.0, None, &options(opts), &mut |_| {}).map_err(from_solve)?;
        finish(out, serde_json::to_string(&report), report.solutions.len())
    })
}

/// Finds the k-colorings. With `fix_classes`, colour classes shared by every
/// coloring are fixed first, which removes colour renamings.
///
/// # Safety
/// As for [`pm_solve_hamilton`].
#[no_mangle]
pub unsafe extern "C" fn pm_solve_coloring(
    graph: *const PmGraph,
    k: u32,
    fix_classes: bool,
    opts: *const PmSolveOptions,
    out: *mut *mut PmRun,
) -> PmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        if k == 0 {
            return Err((PmStatus::InvalidArgument, "k must be positive".into()));
        }
        let table = if fix_classes { TableChoice::FixClasses } else { TableChoice::Full };
        let report = solve_coloring(&g.0, k, &table, &options(opts), &mut |_| {}).map_err(from_solve)?;
        finish(out, serde_json::to_string(&report), report.solutions.len())
    })
}

/// Number of distinct decoded solutions, or 0 for a null run.
///
/// # Safety
/// `run` must be null or a live run handle.
#[no_mangle]
pub unsafe extern "C" fn pm_run_solution_count(run: *const PmRun) -> usize {
    run.as_ref().map_or(0, |r| r.solutions)
}

/// Copies the JSON report into a new string owned by the caller, released
/// with [`pm_string_free`].
///
/// # Safety
/// `run` must be a live run handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pm_run_to_json(run: *const PmRun, out: *mut *mut c_char) -> PmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        let s = CString::new(r.json.as_str()).map_err(|e| (PmStatus::Internal, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `run` must come from a solve call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pm_run_free(run: *mut PmRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn pm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
