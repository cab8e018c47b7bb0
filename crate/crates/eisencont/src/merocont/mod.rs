//! Meromorphic continuation of the unique solution of an analytic family of
//! linear systems `mu_i(s) v = c_i(s)`.
//!
//! Numeric mode: a finite-type witness `lambda_s: L -> E` (usually built by
//! Fredholm reduction) confines all solutions to `Im lambda_s`; choosing
//! `k = rank` witness directions and `k` equations turns the system into a
//! `k x k` one whose Cramer numerator and determinant are analytic, giving
//! `v(s) = N(s) / d(s)`.
//!
//! Exact mode ([`exact`]): fraction-free elimination over `Q[s]`.

mod engine;
pub mod exact;
mod family;
mod witness;

pub use engine::{
    continue_unique_solution, EngineOptions, MeromorphicSolution, PoleReport, SolutionDump, SolutionSample,
};
pub use family::{AnalyticLinearFamily, LinearFamily};
pub use witness::{
    fredholm_split_witness, fredholm_witness, FiniteTypeWitness, FredholmOptions, FredholmWitness, SplitOperator,
    SplitWitness,
    Witness,
};

use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("no splitting identity-minus-low-rank found: {0}")]
    NotFredholm(String),
    #[error("no point of the uniqueness region gives a uniquely solvable reduced system")]
    NoUniqueSolution,
    #[error("witness violation at s = {s}: full-system residual {residual:e} with |d| = {denominator:e}")]
    WitnessViolation { s: C64, residual: f64, denominator: f64 },
    #[error("empty sample set: {0}")]
    EmptySamples(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
