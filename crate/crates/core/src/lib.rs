//! Workbench for the parallel lambda calculus and its scalar extension.

pub mod equivalence;
pub mod harness;
pub mod rewrite;
pub mod semantics;
pub mod syntax;
pub mod typing;

pub use syntax::{parse_prop, parse_term, BiMagma, Mode, Path, Prop, Term};
