use std::f64::consts::PI;

use super::{gauss_legendre, RadialKernel, SpecFnError};
use crate::C64;

/// Controls for the geodesic-polar quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelbergOptions {
    /// Relative tolerance, checked by panel doubling.
    pub tol: f64,
    /// Gauss-Legendre nodes per radial panel.
    pub order: usize,
    pub max_panels: usize,
    /// Angular trapezoid points (doubled until converged).
    pub angular: usize,
}

impl Default for SelbergOptions {
    fn default() -> Self {
        SelbergOptions { tol: 1e-10, order: 16, max_panels: 512, angular: 32 }
    }
}

/// `Im(w) / Im(z0)` for `w` at distance `u` from `z0` in direction `theta`.
///
/// `w` is built as `z0.x + z0.y * k_theta(i e^u)` with `k_theta` the
/// rotation about `i`.
fn height_ratio(z0: (f64, f64), u: f64, theta: f64) -> f64 {
    let (x0, y0) = z0;
    let p = C64::new(0.0, u.exp());
    let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let w = (c * p + s) / (-s * p + c);
    let w = C64::new(x0, 0.0) + y0 * w;
    w.im / y0
}

fn angular_mean(z0: (f64, f64), u: f64, s: C64, opts: &SelbergOptions) -> Result<C64, SpecFnError> {
    let eval = |n: usize| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n {
            let th = 2.0 * PI * k as f64 / n as f64;
            acc += (s * height_ratio(z0, u, th).ln()).exp();
        }
        acc / n as f64
    };
    let mut n = opts.angular.max(4);
    let mut prev = eval(n);
    while n < 1 << 14 {
        n *= 2;
        let cur = eval(n);
        if (cur - prev).norm() <= opts.tol * 1e-2 * cur.norm().max(1e-300) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(SpecFnError::Quadrature { tol: opts.tol, change: f64::NAN })
}

/// `h^(s)` at base point `z0 = (x0, y0)`:
/// `int profile(d(z0, w)) (Im w / Im z0)^s dmu(w)`.
pub fn selberg_transform_at(kernel: &RadialKernel, s: C64, z0: (f64, f64), opts: &SelbergOptions) -> Result<C64, SpecFnError> {
    let (gx, gw) = gauss_legendre(opts.order);
    let r = kernel.radius;
    let integrate = |panels: usize| -> Result<C64, SpecFnError> {
        let h = r / panels as f64;
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..panels {
            let a = p as f64 * h;
            for (x, w) in gx.iter().zip(&gw) {
                let u = a + 0.5 * h * (x + 1.0);
                let f = kernel.profile(u) * u.sinh();
                if f == 0.0 {
                    continue;
                }
                acc += 0.5 * h * w * f * angular_mean(z0, u, s, opts)?;
            }
        }
        Ok(2.0 * PI * acc)
    };
    let mut panels = 1;
    let mut prev = integrate(panels)?;
    let mut change = f64::INFINITY;
    while panels < opts.max_panels {
        panels *= 2;
        let cur = integrate(panels)?;
        change = (cur - prev).norm();
        if change <= opts.tol * cur.norm().max(1e-300) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(SpecFnError::Quadrature { tol: opts.tol, change })
}

/// Selberg transform with base point `i` and default quadrature.
pub fn selberg_transform(kernel: &RadialKernel, s: C64) -> Result<C64, SpecFnError> {
    selberg_transform_at(kernel, s, (0.0, 1.0), &SelbergOptions::default())
}
