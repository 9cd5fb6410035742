//! A small CDCL SAT solver.
//!
//! Self-contained on purpose: the instances this crate produces are
//! desk-scale, and carrying no external solver keeps every result
//! reproducible from the clause level up. Supports incremental clause
//! addition, solving under assumptions, per-variable default polarity and a
//! decision cap.

mod solver;

pub use solver::{Lit, SolveResult, Solver, Var};
