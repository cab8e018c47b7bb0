//! Complex special functions and the Selberg transform of radial kernels.

mod gamma;
mod kernel;
mod quad;
mod scattering;
mod selberg;
mod zeta;

pub use gamma::gamma;
pub use kernel::{KernelShape, RadialKernel};
pub use quad::gauss_legendre;
pub use scattering::m_closed;
pub use selberg::{selberg_transform, selberg_transform_at, SelbergOptions};
pub use zeta::{zeta, zeta_direct, zeta_reflected};

use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecFnError {
    #[error("gamma has a pole at {0}")]
    GammaPole(f64),
    #[error("zeta has a pole at s = 1")]
    ZetaPole,
    #[error("scattering coefficient has a pole at s = 1 (pole of zeta(2s-1))")]
    ScatteringPole,
    #[error("scattering coefficient is singular at s = {0}: zeta(2s) vanishes")]
    ZetaZero(C64),
    #[error("quadrature did not reach tolerance {tol:e} (last change {change:e})")]
    Quadrature { tol: f64, change: f64 },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
}
