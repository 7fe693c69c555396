//! Decomposes large answer set programming rules into sets of smaller,
//! equivalent rules along tree decompositions of their variable graphs.
//!
//! The pipeline is `parser::parse` → `decompose::decompose_program` →
//! `parser::render`. The `oracle` module is a small reference grounder and
//! stable-model enumerator used to check that a rewriting preserves the
//! answer sets of a program.

pub mod ast;
pub mod cli;
pub mod decompose;
pub mod oracle;
pub mod parser;
pub mod rulegraph;
pub mod treedecomp;

pub use ast::{Program, Rule};
pub use decompose::{decompose_program, DecomposeError, DecompositionReport, Options};
pub use parser::{parse, render, ParseError};
pub use treedecomp::Heuristic;
