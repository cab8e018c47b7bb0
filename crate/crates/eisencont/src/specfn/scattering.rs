use std::f64::consts::PI;

use super::{gamma, zeta, SpecFnError};
use crate::C64;

/// `m(s) = sqrt(pi) Gamma(s - 1/2) zeta(2s - 1) / (Gamma(s) zeta(2s))`.
///
/// Evaluated directly for `Re s >= 1/2` (no uncancelled singularity there
/// besides `s = 1`; `s = 1/2` is the removable point with value `-1`) and
/// through `m(s) m(1 - s) = 1` to the left of the critical line.
pub fn m_closed(s: C64) -> Result<C64, SpecFnError> {
    if s == C64::new(1.0, 0.0) {
        return Err(SpecFnError::ScatteringPole);
    }
    if s == C64::new(0.5, 0.0) {
        return Ok(C64::new(-1.0, 0.0));
    }
    if s.re >= 0.5 {
        let num = PI.sqrt() * gamma(s - 0.5)? * zeta(2.0 * s - 1.0)?;
        let den = gamma(s)? * zeta(2.0 * s)?;
        return Ok(num / den);
    }
    let trivial = s.im == 0.0 && s.re == s.re.round();
    if !trivial && zeta(2.0 * s)?.norm() < 1e-12 {
        return Err(SpecFnError::ZetaZero(s));
    }
    Ok(1.0 / m_closed(1.0 - s)?)
}
