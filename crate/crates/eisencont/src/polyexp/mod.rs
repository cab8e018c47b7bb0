//! Polynomial-exponential functions `sum_mu e^{<mu, v>} p_mu(v)` on `V = R^d`,
//! their difference operators, and interpolation sections that are analytic
//! in the exponents.

mod func;
mod poly;
mod section;
mod tuple;

pub use func::{diff_op, DiffOp, PolyExpFn};
pub use poly::Poly;
pub use section::{section_1d, section_product, Section, Section1d};
pub use tuple::{concat, dim_space, ExpTuple};

/// Exponents closer than this are treated as one exponent of higher multiplicity.
pub const CONFLUENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyExpError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("node scale R = {r} must exceed max |lambda| = {max}")]
    NodeScale { r: f64, max: f64 },
    #[error("confluent Vandermonde system is ill-conditioned (normalised determinant {0:e})")]
    IllConditioned(f64),
    #[error("tuple does not split along the given factors")]
    SplitMismatch,
    #[error("term with exponent {0:?} exceeds the degree allowed by its multiplicity")]
    DegreeCap(Vec<num_complex::Complex64>),
}

pub(crate) fn close(a: &[crate::C64], b: &[crate::C64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= CONFLUENCE_TOL)
}
