//! The modular group acting on the upper half-plane: reduction, the
//! Eisenstein series, strip grids and discretised convolution operators,
//! and the numerical continuation of `E(z; s)` and its scattering
//! coefficient `m(s)`.
//!
//! Pipeline: [`assemble_auxiliary_system`] builds the linear family on strip
//! samples; the cuspidal part of `h^(s)^{-1} iota pi delta(h)` is identity
//! minus a numerically finite-rank operator, which gives a witness through
//! [`crate::merocont::fredholm_split_witness`] with the constant-term block
//! spanned by `y^s` and `(y^s - y^{1-s}) / (2s - 1)`.

mod continuation;
mod eisenstein;
mod grid;
mod point;
mod system;
mod xmaps;

pub use continuation::{
    continue_eisenstein, difference_residual, fit_constant_term, hs_compactness_report, Continuation,
    ContinuationResult, GridMeta, HsReport, ScanRow,
};
pub use eisenstein::eisenstein_series;
pub use grid::{build_conv_op, constant_term, cusp_projection_ops, DiscretizedOp, StripGrid};
pub use point::{height, reduce_to_fundamental, sl2_mul, HPoint, Sl2Z, IDENTITY};
pub use system::{alpha1, alpha2, assemble_auxiliary_system, hhat, AuxiliarySystem, Sl2Config};
pub use xmaps::{lagrange_weights, strip_x_maps, trig_weights, XMaps};

use crate::merocont::EngineError;
use crate::specfn::SpecFnError;
use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Sl2Error {
    #[error("({x}, {y}) is not in the upper half-plane")]
    NotInUpperHalfPlane { x: f64, y: f64 },
    #[error("the series diverges at s = {0} (needs Re s > 1)")]
    Divergent(C64),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("kernel support of radius {radius} around y = {y} leaves the strip [{c}, {y_max}]")]
    SupportViolation { y: f64, radius: f64, c: f64, y_max: f64 },
    #[error("reduced point at height {y} is outside the grid [{c}, {y_max}]")]
    InterpolationRange { y: f64, c: f64, y_max: f64 },
    #[error("h^(s) vanishes at s = {0}")]
    HhatVanishes(C64),
    #[error("weight exponent N = {n_weight} does not cover the band {band:?} (needs N >= 1 + sup |Re s|)")]
    BandTooWide { n_weight: u32, band: [f64; 2] },
    #[error("s = {s} is outside the configured band {band:?}")]
    OutOfBand { s: C64, band: [f64; 2] },
    #[error("s = {s} is too close to a pole: |d(s)| = {denominator:e}")]
    PoleProximity { s: C64, denominator: f64 },
    #[error("residual {residual:e} at s = {s} exceeds tolerance")]
    ResidualFailure { s: C64, residual: f64 },
    #[error("constant term at s = {s} is not in the two-dimensional span (misfit {residual:e})")]
    FitFailure { s: C64, residual: f64 },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    SpecFn(#[from] SpecFnError),
}

impl Sl2Error {
    /// Short machine-readable tag.
    pub fn status(&self) -> &'static str {
        match self {
            Sl2Error::PoleProximity { .. } => "pole-proximity",
            Sl2Error::ResidualFailure { .. } => "residual-failure",
            Sl2Error::FitFailure { .. } => "fit-failure",
            Sl2Error::OutOfBand { .. } => "out-of-band",
            Sl2Error::HhatVanishes(_) => "hhat-vanishes",
            Sl2Error::Divergent(_) => "divergent",
            Sl2Error::Engine(_) => "engine-failure",
            _ => "invalid",
        }
    }
}
