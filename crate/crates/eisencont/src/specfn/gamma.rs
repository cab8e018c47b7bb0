use std::f64::consts::PI;

use super::SpecFnError;
use crate::C64;

// Lanczos g = 7, n = 9.
const G: f64 = 7.0;
const COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(z)` for `Re z >= 0.5` (some branch; only its exponential is used).
fn lanczos_ln(z: C64) -> C64 {
    let z = z - 1.0;
    let mut a = C64::new(COEF[0], 0.0);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// Complex Gamma function: Lanczos approximation, reflected for `Re s < 1/2`.
pub fn gamma(s: C64) -> Result<C64, SpecFnError> {
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round() {
        return Err(SpecFnError::GammaPole(s.re));
    }
    if s.re < 0.5 {
        let g = lanczos_ln(1.0 - s).exp();
        Ok(PI / ((PI * s).sin() * g))
    } else {
        Ok(lanczos_ln(s).exp())
    }
}
