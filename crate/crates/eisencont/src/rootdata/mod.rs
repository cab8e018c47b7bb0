//! Type A root data: compositions as standard parabolics of `GL_n`, simple
//! roots and their projections, Weyl double cosets and `Omega(P; Q)`.
//!
//! Indices are 0-based throughout: `e_0, ..., e_{n-1}` and a permutation `w`
//! sends `e_i` to `e_{w(i)}`.

mod composition;
mod roots;
mod separation;
mod weyl;

pub use composition::Composition;
pub use roots::{delta_p, simple_roots, DeltaPElement, RootVector};
pub use separation::chamber_separation;
pub use weyl::{
    double_coset_reps, double_cosets_brute_force, omega, omega_semi, subordinate_parabolics, WeylElem,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootDataError {
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("compositions of different sizes: {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("{0} is not a minimal double coset representative")]
    InvalidRepresentative(String),
    #[error("the maximal parabolic has no roots to separate")]
    MaximalParabolic,
    #[error("no separating constant up to {0} validated")]
    SearchFailure(f64),
}
