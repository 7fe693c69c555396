use std::ffi::{CStr, CString};
use std::ptr;

use lpopt_ffi::*;

const CYCLE_RULE: &str = "h(X,W) :- e(X,Y), e(Y,Z), not e(Z,W), e(W,X).";

fn parse(src: &str) -> *mut LpoptProgram {
    let c = CString::new(src).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { lpopt_parse(c.as_ptr(), &mut p) }, LpoptStatus::Ok);
    assert!(!p.is_null());
    p
}

fn render(p: *const LpoptProgram) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { lpopt_program_render(p, &mut s) }, LpoptStatus::Ok);
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { lpopt_string_free(s) };
    out
}

fn last_error() -> String {
    let m = lpopt_last_error_message();
    assert!(!m.is_null());
    unsafe { CStr::from_ptr(m) }.to_string_lossy().into_owned()
}

#[test]
fn decompose_cycle_rule() {
    let p = parse(CYCLE_RULE);
    let mut out = ptr::null_mut();
    let mut report = ptr::null_mut();
    let opts = lpopt_default_options();
    assert_eq!(unsafe { lpopt_decompose(p, &opts, &mut out, &mut report) }, LpoptStatus::Ok);
    assert_eq!(unsafe { lpopt_program_rule_count(out) }, 3);
    assert_eq!(unsafe { lpopt_report_max_width(report) }, 2);
    assert_eq!(unsafe { lpopt_report_rule_count(report) }, 1);
    let mut w = 0;
    assert_eq!(unsafe { lpopt_report_rule_width(report, 0, &mut w) }, LpoptStatus::Ok);
    assert_eq!(w, 2);
    assert_eq!(
        unsafe { lpopt_report_rule_width(report, 5, &mut w) },
        LpoptStatus::InvalidArgument
    );
    assert!(render(out).ends_with("h(X,W) :- e(X,Y), e(W,X), temp_0_0(Y,W).\n"));

    let mut eq = false;
    assert_eq!(unsafe { lpopt_equivalent(p, out, &mut eq) }, LpoptStatus::Ok);
    assert!(eq);

    let mut table = ptr::null_mut();
    assert_eq!(unsafe { lpopt_report_render(report, &mut table) }, LpoptStatus::Ok);
    assert!(unsafe { CStr::from_ptr(table) }.to_str().unwrap().starts_with("rule\twidth"));
    unsafe {
        lpopt_string_free(table);
        lpopt_report_free(report);
        lpopt_program_free(out);
        lpopt_program_free(p);
    }
}

#[test]
fn null_options_and_report_are_allowed() {
    let p = parse("p(X,Y) :- q(X,Y).");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { lpopt_decompose(p, ptr::null(), &mut out, ptr::null_mut()) }, LpoptStatus::Ok);
    assert_eq!(render(out), "p(X,Y) :- q(X,Y).\n");
    unsafe {
        lpopt_program_free(out);
        lpopt_program_free(p);
    }
}

#[test]
fn parse_error_reports_location() {
    let src = CString::new("p.\nq(X) :- not r(X).").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { lpopt_parse(src.as_ptr(), &mut p) }, LpoptStatus::ParseError);
    assert!(p.is_null());
    let (mut line, mut col) = (0, 0);
    assert!(unsafe { lpopt_last_error_location(&mut line, &mut col) });
    assert_eq!((line, col), (2, 1));
    assert!(last_error().contains("unsupported"));
}

#[test]
fn invalid_arguments() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { lpopt_parse(ptr::null(), &mut p) }, LpoptStatus::NullPointer);
    let bad = [0xffu8, 0];
    assert_eq!(unsafe { lpopt_parse(bad.as_ptr().cast(), &mut p) }, LpoptStatus::InvalidUtf8);
    assert!(!unsafe { lpopt_last_error_location(ptr::null_mut(), ptr::null_mut()) });

    let prog = parse("p(X) :- q(X).");
    let mut opts = lpopt_default_options();
    opts.heuristic = 9;
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { lpopt_decompose(prog, &opts, &mut out, ptr::null_mut()) },
        LpoptStatus::InvalidArgument
    );
    assert!(out.is_null());
    assert!(last_error().contains("heuristic"));

    assert_eq!(unsafe { lpopt_program_rule_count(ptr::null()) }, 0);
    assert_eq!(unsafe { lpopt_report_max_width(ptr::null()) }, -1);
    unsafe {
        lpopt_program_free(ptr::null_mut());
        lpopt_report_free(ptr::null_mut());
        lpopt_string_free(ptr::null_mut());
        lpopt_program_free(prog);
    }
}

#[test]
fn grounding_size_and_oracle_errors() {
    let p = parse("e(1,2). e(2,3). p(X,Z) :- e(X,Y), e(Y,Z).");
    let mut n = 0u64;
    assert_eq!(unsafe { lpopt_grounding_size(p, &mut n) }, LpoptStatus::Ok);
    assert_eq!(n, 1);
    let q = parse("a(1). a(2) :- #count{X : a(X)} >= 1.");
    assert_eq!(unsafe { lpopt_grounding_size(q, &mut n) }, LpoptStatus::OracleError);
    unsafe {
        lpopt_program_free(p);
        lpopt_program_free(q);
    }
}

#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/lpopt.h");
    for name in [
        "lpopt_parse",
        "lpopt_program_free",
        "lpopt_program_render",
        "lpopt_string_free",
        "lpopt_decompose",
        "lpopt_report_max_width",
        "lpopt_equivalent",
        "lpopt_grounding_size",
        "lpopt_last_error_message",
        "typedef struct LpoptProgram LpoptProgram;",
        "LPOPT_STATUS_PARSE_ERROR = 3",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
