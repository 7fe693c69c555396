//! Command-line front end.
//!
//! ```text
//! Usage: lpopt [-idbt] [-s seed] [-f file] [-h alg] [-l file]
//! ```
//!
//! Reads a program from `-f file` or standard input and writes the
//! decomposed program to standard output.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use crate::decompose::{decompose_program, DecompositionReport, Options};
use crate::parser::{parse, render};
use crate::treedecomp::Heuristic;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Parser)]
#[command(
    name = "lpopt",
    disable_help_flag = true,
    disable_version_flag = true,
    override_usage = "lpopt [-idbt] [-s seed] [-f file] [-h alg] [-l file]"
)]
pub struct CliOptions {
    /// dumb: do not perform optimization
    #[arg(short = 'd')]
    pub dumb: bool,
    /// print per-rule statistics and timing to standard error
    #[arg(short = 'b')]
    pub benchmark: bool,
    /// only compute tree decompositions and print their bags
    #[arg(short = 't')]
    pub td_only: bool,
    /// ignore head variables when decomposing
    #[arg(short = 'i')]
    pub ignore_head: bool,
    /// decomposition algorithm, one of {mcs, mf, miw (def)}
    #[arg(short = 'h', value_name = "alg", default_value = "miw", value_parser = parse_heuristic)]
    pub heuristic: Heuristic,
    /// seed for tie-breaking
    #[arg(short = 's', value_name = "seed", default_value_t = 0, allow_negative_numbers = true)]
    pub seed: i64,
    /// read the program from file instead of standard input
    #[arg(short = 'f', value_name = "file")]
    pub input_path: Option<PathBuf>,
    /// write the maximal treewidth to file and exit
    #[arg(short = 'l', value_name = "file")]
    pub info_path: Option<PathBuf>,
}

fn parse_heuristic(s: &str) -> Result<Heuristic, String> {
    s.parse()
}

impl CliOptions {
    pub fn decompose_options(&self) -> Options {
        Options {
            heuristic: self.heuristic,
            seed: self.seed,
            include_head_clique: !self.ignore_head,
            enabled: !self.dumb,
        }
    }
}

/// Runs the tool; `args` excludes the program name. Returns the exit
/// status.
pub fn run<S: AsRef<str>>(args: &[S], stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let argv = std::iter::once("lpopt").chain(args.iter().map(AsRef::as_ref));
    let opts = match CliOptions::try_parse_from(argv) {
        Ok(o) => o,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    match execute(&opts, stdin, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            let _ = writeln!(stderr, "lpopt: {msg}");
            EXIT_FAILURE
        }
    }
}

fn execute(opts: &CliOptions, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), String> {
    let (source, text) = match &opts.input_path {
        Some(p) => (
            p.display().to_string(),
            fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?,
        ),
        None => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| format!("cannot read standard input: {e}"))?;
            ("<stdin>".to_string(), s)
        }
    };
    let program = parse(&text).map_err(|e| format!("{source}:{e}"))?;

    let start = Instant::now();
    let (out, report) = decompose_program(&program, &opts.decompose_options()).map_err(|e| format!("{source}: {e}"))?;
    let elapsed = start.elapsed();

    if opts.benchmark {
        let _ = writeln!(stderr, "{report}");
        let _ = writeln!(stderr, "time\t{:.6}", elapsed.as_secs_f64());
    }
    if let Some(path) = &opts.info_path {
        fs::write(path, format!("{}\n", report.max_width)).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        return Ok(());
    }
    let text = if opts.td_only { bag_listing(&report) } else { render(&out) };
    stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| format!("cannot write output: {e}"))
}

/// One line per rule: `rule <idx>: width <w>; bags: {X,Y} {Y,Z}`.
pub fn bag_listing(report: &DecompositionReport) -> String {
    let mut s = String::new();
    for r in &report.rules {
        let bags = r.tree.as_ref().map_or_else(|| "{}".to_string(), |t| t.to_string());
        s.push_str(&format!("rule {}: width {}; bags: {}\n", r.index, r.width, bags));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], input: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args, &mut input.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bundled_flags() {
        let o = CliOptions::try_parse_from(["lpopt", "-idbt", "-s", "-3", "-h", "mf"]).unwrap();
        assert!(o.dumb && o.benchmark && o.td_only && o.ignore_head);
        assert_eq!(o.seed, -3);
        assert_eq!(o.heuristic, Heuristic::Mf);
    }

    #[test]
    fn defaults() {
        let o = CliOptions::try_parse_from(["lpopt"]).unwrap();
        assert_eq!(o.heuristic, Heuristic::Miw);
        assert_eq!(o.seed, 0);
        assert_eq!(o.decompose_options(), Options::default());
    }

    #[test]
    fn cycle_rule_filter() {
        let (code, out, _) = call(&[], "h(X,W) :- e(X,Y), e(Y,Z), not e(Z,W), e(W,X).");
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 3);
    }

    #[test]
    fn td_only_listing() {
        let (code, out, _) = call(&["-t"], "h(X,W) :- e(X,Y), e(Y,Z), not e(Z,W), e(W,X).\ne(1,2).");
        assert_eq!(code, 0);
        assert_eq!(out, "rule 0: width 2; bags: {W,X,Y} {W,Y,Z}\nrule 1: width -1; bags: {}\n");
    }

    #[test]
    fn errors_and_statuses() {
        assert_eq!(call(&["-x"], "").0, EXIT_USAGE);
        assert_eq!(call(&["-h", "best"], "").0, EXIT_USAGE);
        let (code, _, err) = call(&[], "p(X) :- not q(X).");
        assert_eq!(code, EXIT_FAILURE);
        assert!(err.contains("<stdin>:1:1"), "{err}");
        let (code, _, err) = call(&["-f", "/nonexistent/prog.lp"], "");
        assert_eq!(code, EXIT_FAILURE);
        assert!(err.contains("cannot read"));
    }

    #[test]
    fn benchmark_goes_to_stderr() {
        let (code, out, err) = call(&["-b"], "p(X) :- q(X).");
        assert_eq!(code, 0);
        assert_eq!(out, "p(X) :- q(X).\n");
        assert!(err.starts_with("rule\twidth"));
        assert!(err.contains("\ntime\t"));
    }
}
