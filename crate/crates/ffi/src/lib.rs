//! C interface to `lpopt-core`.
//!
//! Programs and reports are opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call
//! returns an [`LpoptStatus`]; on failure a description is available from
//! [`lpopt_last_error_message`] on the same thread until the next call.
//! Strings returned through `char **` are released with
//! [`lpopt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lpopt_core::decompose::{decompose_program, DecompositionReport, Options};
use lpopt_core::parser::{parse, render};
use lpopt_core::{oracle, Heuristic, Program};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpoptStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    DecomposeError = 4,
    OracleError = 5,
    InvalidArgument = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpoptHeuristic {
    Mcs = 0,
    Mf = 1,
    Miw = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LpoptOptions {
    /// One of the `LpoptHeuristic` values.
    pub heuristic: u32,
    pub seed: i64,
    pub include_head_clique: bool,
    /// When false the program is copied unchanged.
    pub enabled: bool,
}

/// Parsed program.
pub struct LpoptProgram(Program);

/// Per-rule statistics of a decomposition.
pub struct LpoptReport(DecompositionReport);

struct LastError {
    message: CString,
    line: u32,
    column: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>, location: Option<(usize, usize)>) {
    let message = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    let (line, column) = location.map_or((0, 0), |(l, c)| (l as u32, c as u32));
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(LastError { message, line, column }));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> Result<(), LpoptStatus>) -> LpoptStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LpoptStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic", None);
            LpoptStatus::Panic
        }
    }
}

fn null(what: &str) -> LpoptStatus {
    set_error(format!("{what} is null"), None);
    LpoptStatus::NullPointer
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, LpoptStatus> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| {
        set_error(format!("{what} is not UTF-8: {e}"), None);
        LpoptStatus::InvalidUtf8
    })
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, LpoptStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the last failed call on this thread, or null. The
/// pointer stays valid until the next call into the library.
#[no_mangle]
pub extern "C" fn lpopt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |e| e.message.as_ptr()))
}

/// Line and column (1-based) of the last parse error; false if the last
/// failure had no source location.
///
/// # Safety
/// `line` and `column` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lpopt_last_error_location(line: *mut u32, column: *mut u32) -> bool {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        Some(err) if err.line > 0 => {
            if !line.is_null() {
                *line = err.line;
            }
            if !column.is_null() {
                *column = err.column;
            }
            true
        }
        _ => false,
    })
}

#[no_mangle]
pub extern "C" fn lpopt_default_options() -> LpoptOptions {
    LpoptOptions {
        heuristic: LpoptHeuristic::Miw as u32,
        seed: 0,
        include_head_clique: true,
        enabled: true,
    }
}

/// Parses a NUL-terminated UTF-8 program.
///
/// # Safety
/// `source` must be null or a valid C string; `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lpopt_parse(source: *const c_char, out: *mut *mut LpoptProgram) -> LpoptStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let src = text(source, "source")?;
        let program = parse(src).map_err(|e| {
            set_error(e.to_string(), Some((e.location.line, e.location.column)));
            LpoptStatus::ParseError
        })?;
        *out = Box::into_raw(Box::new(LpoptProgram(program)));
        Ok(())
    })
}

/// # Safety
/// `program` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lpopt_program_free(program: *mut LpoptProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// # Safety
/// `program` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lpopt_program_rule_count(program: *const LpoptProgram) -> usize {
    program.as_ref().map_or(0, |p| p.0.rules.len())
}

/// Renders the program as text, one rule per line.
///
/// # Safety
/// `program` must be a live handle or null; `out` must be null or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn lpopt_program_render(program: *const LpoptProgram, out: *mut *mut c_char) -> LpoptStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = handle(program, "program")?;
        *out = to_c_string(render(&p.0));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lpopt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Decomposes `program` into a new program. `options` may be null for
/// the defaults and `report` may be null when not wanted.
///
/// # Safety
/// Pointers must be null or valid; `program` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lpopt_decompose(
    program: *const LpoptProgram,
    options: *const LpoptOptions,
    out: *mut *mut LpoptProgram,
    report: *mut *mut LpoptReport,
) -> LpoptStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if !report.is_null() {
            *report = ptr::null_mut();
        }
        let p = handle(program, "program")?;
        let o = options.as_ref().copied().unwrap_or_else(|| lpopt_default_options());
        let heuristic = match o.heuristic {
            h if h == LpoptHeuristic::Mcs as u32 => Heuristic::Mcs,
            h if h == LpoptHeuristic::Mf as u32 => Heuristic::Mf,
            h if h == LpoptHeuristic::Miw as u32 => Heuristic::Miw,
            other => {
                set_error(format!("unknown heuristic {other}"), None);
                return Err(LpoptStatus::InvalidArgument);
            }
        };
        let opts = Options {
            heuristic,
            seed: o.seed,
            include_head_clique: o.include_head_clique,
            enabled: o.enabled,
        };
        let (result, rep) = decompose_program(&p.0, &opts).map_err(|e| {
            set_error(e.to_string(), None);
            LpoptStatus::DecomposeError
        })?;
        *out = Box::into_raw(Box::new(LpoptProgram(result)));
        if !report.is_null() {
            *report = Box::into_raw(Box::new(LpoptReport(rep)));
        }
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lpopt_report_free(report: *mut LpoptReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Maximum width over all rules; -1 for programs without variables or
/// a null handle.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lpopt_report_max_width(report: *const LpoptReport) -> i64 {
    report.as_ref().map_or(-1, |r| r.0.max_width)
}

/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lpopt_report_rule_count(report: *const LpoptReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.rules.len())
}

/// Width of the decomposition of input rule `index`.
///
/// # Safety
/// `report` must be a live handle or null; `width` must be null or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn lpopt_report_rule_width(report: *const LpoptReport, index: usize, width: *mut i64) -> LpoptStatus {
    guard(|| {
        if width.is_null() {
            return Err(null("width"));
        }
        let r = handle(report, "report")?;
        let rule = r.0.rules.get(index).ok_or_else(|| {
            set_error(format!("rule index {index} out of range"), None);
            LpoptStatus::InvalidArgument
        })?;
        *width = rule.width;
        Ok(())
    })
}

/// Tab-separated statistics table.
///
/// # Safety
/// `report` must be a live handle or null; `out` must be null or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn lpopt_report_render(report: *const LpoptReport, out: *mut *mut c_char) -> LpoptStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let r = handle(report, "report")?;
        *out = to_c_string(r.0.to_string());
        Ok(())
    })
}

/// Checks with the reference solver whether `rewritten` has the answer
/// sets and costs of `original` once fresh predicates are dropped.
/// Only feasible for small programs.
///
/// # Safety
/// Handles must be live or null; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lpopt_equivalent(
    original: *const LpoptProgram,
    rewritten: *const LpoptProgram,
    out: *mut bool,
) -> LpoptStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let a = handle(original, "original")?;
        let b = handle(rewritten, "rewritten")?;
        *out = oracle::equivalent(&a.0, &b.0).map_err(oracle_error)?;
        Ok(())
    })
}

/// Number of ground instances of the non-fact rules.
///
/// # Safety
/// `program` must be live or null; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lpopt_grounding_size(program: *const LpoptProgram, out: *mut u64) -> LpoptStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = handle(program, "program")?;
        *out = oracle::grounding_size(&p.0).map_err(oracle_error)? as u64;
        Ok(())
    })
}

fn oracle_error(e: oracle::OracleError) -> LpoptStatus {
    set_error(e.to_string(), None);
    LpoptStatus::OracleError
}
