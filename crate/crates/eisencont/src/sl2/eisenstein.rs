use num_integer::Integer;

use super::{reduce_to_fundamental, HPoint, Sl2Error};
use crate::par::Parallelism;
use crate::C64;

/// Reduced coordinates are rounded to this dyadic grid so that every point
/// of an orbit feeds bit-identical input to the sum.
const SNAP: f64 = (1u64 << 36) as f64;

fn snap(v: f64) -> f64 {
    (v * SNAP).round() / SNAP
}

/// `E(z; s) = (1/2) sum_{gcd(m,n)=1} y^s / |m z + n|^{2s}` truncated to
/// `max(|m|, |n|) <= M`, normalised so that its constant term is
/// `y^s + m(s) y^{1-s}`.
///
/// The tail bound is `4 y^sigma kappa^{-sigma} M^{2-2 sigma} / (2 sigma - 2)`
/// where `kappa` is the smallest eigenvalue of the form `|m z + n|^2`
/// (evaluated at the reduced point).
pub fn eisenstein_series(z: HPoint, s: C64, m_max: u32, par: Parallelism) -> Result<(C64, f64), Sl2Error> {
    let sigma = s.re;
    if sigma <= 1.0 {
        return Err(Sl2Error::Divergent(s));
    }
    let (w, _) = reduce_to_fundamental(z);
    let (x, y) = (snap(w.x), snap(w.y));
    let mm = m_max as i64;
    // pairs with m > 0, plus (0, 1)
    let rows = par.map(m_max as usize, |i| {
        let m = i as i64 + 1;
        let mut acc = C64::new(0.0, 0.0);
        let mx = m as f64 * x;
        let my2 = (m as f64 * y).powi(2);
        for n in -mm..=mm {
            if m.gcd(&n) != 1 {
                continue;
            }
            let re = mx + n as f64;
            let q = re * re + my2;
            acc += (-s * q.ln()).exp();
        }
        acc
    });
    let sum: C64 = rows.iter().sum::<C64>() + C64::new(1.0, 0.0);
    let value = sum * (s * y.ln()).exp();
    let a2 = x * x + y * y;
    let t = a2 + 1.0;
    let kappa = 0.5 * (t - (t * t - 4.0 * y * y).max(0.0).sqrt());
    let tail = 4.0 * y.powf(sigma) * kappa.powf(-sigma) * (m_max as f64).powf(2.0 - 2.0 * sigma) / (2.0 * sigma - 2.0);
    Ok((value, tail))
}
