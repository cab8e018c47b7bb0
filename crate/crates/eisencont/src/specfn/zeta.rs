use std::f64::consts::PI;

use super::{gamma, SpecFnError};
use crate::C64;

// B_{2k} / (2k)!
const BERN: [f64; 20] = [
    8.333_333_333_333_333e-2,
    -1.388_888_888_888_889e-3,
    3.306_878_306_878_307e-5,
    -8.267_195_767_195_767e-7,
    2.087_675_698_786_81e-8,
    -5.284_190_138_687_493e-10,
    1.338_253_653_068_467_9e-11,
    -3.389_680_296_322_583e-13,
    8.586_062_056_277_845e-15,
    -2.174_868_698_558_062e-16,
    5.509_002_828_360_23e-18,
    -1.395_446_468_581_252_3e-19,
    3.534_707_039_629_467e-21,
    -8.953_517_427_037_547e-23,
    2.267_952_452_337_683e-24,
    -5.744_790_668_872_202e-26,
    1.455_172_475_614_865e-27,
    -3.685_994_940_665_31e-29,
    9.336_734_257_095_045e-31,
    -2.365_022_415_700_63e-32,
];

/// Euler-Maclaurin summation, accurate for `Re s > -1` and moderate `|Im s|`.
pub fn zeta_direct(s: C64) -> Result<C64, SpecFnError> {
    if s == C64::new(1.0, 0.0) {
        return Err(SpecFnError::ZetaPole);
    }
    let n = 20 + (s.norm() / 2.0).ceil() as usize;
    let nf = n as f64;
    let mut sum = C64::new(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let n_pow = (-s * nf.ln()).exp();
    sum += n_pow * nf / (s - 1.0) + 0.5 * n_pow;
    // rising factorial s (s+1) ... (s+2k-2) times N^{-s-2k+1}
    let mut fac = s * n_pow / nf;
    for (k, b) in BERN.iter().enumerate() {
        let term = *b * fac;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
        let m = 2.0 * k as f64 + 1.0;
        fac *= (s + m) * (s + m + 1.0) / (nf * nf);
    }
    Ok(sum)
}

/// Functional equation `zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s) zeta(1-s)`.
pub fn zeta_reflected(s: C64) -> Result<C64, SpecFnError> {
    if s == C64::new(1.0, 0.0) {
        return Err(SpecFnError::ZetaPole);
    }
    let one_minus = 1.0 - s;
    let pref = (s * 2f64.ln() + (s - 1.0) * PI.ln()).exp() * (0.5 * PI * s).sin();
    Ok(pref * gamma(one_minus)? * zeta_direct(one_minus)?)
}

/// Riemann zeta on `C \ {1}`.
pub fn zeta(s: C64) -> Result<C64, SpecFnError> {
    if s.re > -1.0 {
        zeta_direct(s)
    } else {
        zeta_reflected(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basel() {
        let z = zeta(C64::new(2.0, 0.0)).unwrap();
        assert!((z.re - PI * PI / 6.0).abs() < 1e-14);
    }

    #[test]
    fn zero_and_pole() {
        assert!((zeta(C64::new(0.0, 0.0)).unwrap().re + 0.5).abs() < 1e-14);
        assert_eq!(zeta(C64::new(1.0, 0.0)), Err(SpecFnError::ZetaPole));
    }

    #[test]
    fn trivial_zero() {
        assert!(zeta(C64::new(-2.0, 0.0)).unwrap().norm() < 1e-14);
    }
}
