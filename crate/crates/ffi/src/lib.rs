//! C interface to `dyneq`.
//!
//! Handles are opaque; every fallible call returns a [`DyneqStatus`] and
//! leaves a message for [`dyneq_last_error`] on failure. Strings returned by
//! the library must be released with [`dyneq_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dyneq::cli;
use dyneq::config::{parse_problem, ConfigError, ProblemConfig};
use dyneq::table::{Format, ResultTable};
use dyneq::Error;

/// Parsed problem configuration.
pub struct DyneqProblem {
    cfg: ProblemConfig,
}

/// Result table of a solve.
pub struct DyneqSolution {
    table: ResultTable,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DyneqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    NotRegressive = 5,
    ZeroDenominator = 6,
    SingularWronskian = 7,
    NumericError = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DyneqColumn {
    T = 0,
    Y = 1,
    Ydelta = 2,
    Yd = 3,
    Residual = 4,
    Norm = 5,
    Envelope = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DyneqFormat {
    Csv = 0,
    Json = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn lib_status(e: &Error) -> DyneqStatus {
    match e {
        Error::NotRegressive { .. } => DyneqStatus::NotRegressive,
        Error::ZeroDenominator { .. } => DyneqStatus::ZeroDenominator,
        Error::SingularWronskian { .. } => DyneqStatus::SingularWronskian,
        _ => DyneqStatus::NumericError,
    }
}

fn fail(status: DyneqStatus, msg: impl Into<String>) -> DyneqStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> DyneqStatus) -> DyneqStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(DyneqStatus::Panic, "internal panic"))
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dyneq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dyneq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a problem file held in `text`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dyneq_problem_parse(text: *const c_char, out: *mut *mut DyneqProblem) -> DyneqStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(DyneqStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(DyneqStatus::InvalidUtf8, "config text is not UTF-8");
        };
        match parse_problem(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(DyneqProblem { cfg }));
                DyneqStatus::Ok
            }
            Err(e @ ConfigError::Parse { .. }) => fail(DyneqStatus::ParseError, e.to_string()),
            Err(e @ ConfigError::Validation { .. }) => fail(DyneqStatus::ValidationError, e.to_string()),
        }
    })
}

/// # Safety
/// `problem` must come from [`dyneq_problem_parse`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn dyneq_problem_free(problem: *mut DyneqProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Number of grid points of the problem's time scale, 0 on error.
///
/// # Safety
/// `problem` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dyneq_problem_len(problem: *const DyneqProblem) -> usize {
    problem.as_ref().and_then(|p| p.cfg.timescale().ok()).map_or(0, |ts| ts.len())
}

/// Solves the initial value problem.
///
/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dyneq_solve(problem: *const DyneqProblem, out: *mut *mut DyneqSolution) -> DyneqStatus {
    guard(|| {
        let (Some(problem), false) = (problem.as_ref(), out.is_null()) else {
            return fail(DyneqStatus::NullPointer, "null argument");
        };
        *out = ptr::null_mut();
        match cli::cmd_solve(&problem.cfg) {
            Ok(table) => {
                *out = Box::into_raw(Box::new(DyneqSolution { table }));
                DyneqStatus::Ok
            }
            Err(e) => fail(lib_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `solution` must come from [`dyneq_solve`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn dyneq_solution_free(solution: *mut DyneqSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Number of rows, one per grid point.
///
/// # Safety
/// `solution` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dyneq_solution_len(solution: *const DyneqSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.table.rows.len())
}

/// Copies one column into `buf`. Entries that do not exist at a grid point
/// (the residual at the last two points, for example) are NaN.
///
/// # Safety
/// `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn dyneq_solution_column(
    solution: *const DyneqSolution,
    column: DyneqColumn,
    buf: *mut f64,
    cap: usize,
) -> DyneqStatus {
    guard(|| {
        let (Some(solution), false) = (solution.as_ref(), buf.is_null()) else {
            return fail(DyneqStatus::NullPointer, "null argument");
        };
        let rows = &solution.table.rows;
        if cap < rows.len() {
            return fail(DyneqStatus::BufferTooSmall, format!("need {} entries, got {cap}", rows.len()));
        }
        let out = std::slice::from_raw_parts_mut(buf, rows.len());
        for (slot, r) in out.iter_mut().zip(rows) {
            *slot = match column {
                DyneqColumn::T => r.t,
                DyneqColumn::Y => r.y,
                DyneqColumn::Ydelta => r.ydelta.unwrap_or(f64::NAN),
                DyneqColumn::Yd => r.yd,
                DyneqColumn::Residual => r.residual.unwrap_or(f64::NAN),
                DyneqColumn::Norm => r.norm.unwrap_or(f64::NAN),
                DyneqColumn::Envelope => r.envelope.unwrap_or(f64::NAN),
            };
        }
        DyneqStatus::Ok
    })
}

/// Constants `c1`, `c2` of the homogeneous part.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dyneq_solution_constants(
    solution: *const DyneqSolution,
    c1: *mut f64,
    c2: *mut f64,
) -> DyneqStatus {
    let Some(solution) = solution.as_ref() else {
        return fail(DyneqStatus::NullPointer, "null argument");
    };
    if c1.is_null() || c2.is_null() {
        return fail(DyneqStatus::NullPointer, "null argument");
    }
    *c1 = solution.table.metadata.c1;
    *c2 = solution.table.metadata.c2;
    DyneqStatus::Ok
}

/// Renders the table; free the result with [`dyneq_string_free`].
///
/// # Safety
/// `solution` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dyneq_solution_emit(
    solution: *const DyneqSolution,
    format: DyneqFormat,
    out: *mut *mut c_char,
) -> DyneqStatus {
    guard(|| {
        let (Some(solution), false) = (solution.as_ref(), out.is_null()) else {
            return fail(DyneqStatus::NullPointer, "null argument");
        };
        let fmt = match format {
            DyneqFormat::Csv => Format::Csv,
            DyneqFormat::Json => Format::Json,
        };
        let text = solution.table.emit(fmt);
        *out = CString::new(text).expect("emitted text has no NUL").into_raw();
        DyneqStatus::Ok
    })
}

/// Runs the verification checks. `passed` receives 1 when all pass, else 0;
/// `report`, if not NULL, receives the rendered report.
///
/// # Safety
/// `problem` must be a live handle; `passed` must be valid; `report` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn dyneq_verify(
    problem: *const DyneqProblem,
    passed: *mut c_int,
    report: *mut *mut c_char,
) -> DyneqStatus {
    guard(|| {
        let (Some(problem), false) = (problem.as_ref(), passed.is_null()) else {
            return fail(DyneqStatus::NullPointer, "null argument");
        };
        match cli::cmd_verify(&problem.cfg) {
            Ok(r) => {
                *passed = c_int::from(r.passed());
                if !report.is_null() {
                    *report = CString::new(r.render()).expect("report has no NUL").into_raw();
                }
                DyneqStatus::Ok
            }
            Err(e) => fail(lib_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn dyneq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
