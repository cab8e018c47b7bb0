//! Meromorphic continuation of the unique solution of an analytic family of
//! linear systems, worked end to end for the SL2(Z) Eisenstein series.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfn`]: complex gamma and zeta, the closed-form scattering
//!   coefficient, radial kernels and their Selberg transforms.
//! * [`rootdata`]: type A roots, parabolics, Weyl double cosets.
//! * [`polyexp`]: polynomial-exponential functions and analytic
//!   interpolation sections.
//! * [`merocont`]: the continuation engine (numeric and exact rational).
//! * [`sl2`]: strip grids, discretised operators and the Eisenstein pipeline.
//!
//! Data-parallel loops go through [`par`], which switches between rayon and a
//! plain sequential loop at run time (and at compile time via the `parallel`
//! feature).

pub mod linalg;
pub mod merocont;
pub mod par;
pub mod polyexp;
pub mod rootdata;
pub mod sl2;
pub mod specfn;

pub use num_complex::Complex64 as C64;
