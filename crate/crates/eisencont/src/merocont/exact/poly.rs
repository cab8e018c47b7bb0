use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::C64;

/// Polynomial in `s` with rational coefficients, lowest degree first, no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        QPoly::constant(q(1))
    }

    pub fn constant(c: BigRational) -> Self {
        QPoly::new(vec![c])
    }

    /// The polynomial `s`.
    pub fn s() -> Self {
        QPoly::new(vec![q(0), q(1)])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        QPoly::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        QPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(BigRational::one() / self.lead()))
    }

    pub fn derivative(&self) -> Self {
        QPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect())
    }

    pub fn eval(&self, s: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * s + c)
    }

    pub fn eval_c64(&self, s: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * s + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Euclidean division: `(quotient, remainder)`.
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let mut quo = vec![BigRational::zero(); r.len() - dd];
        let lead = d.lead();
        for i in (dd..r.len()).rev() {
            let c = &r[i] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i - dd + j] -= &c * dc;
            }
            quo[i - dd] = c;
        }
        r.truncate(dd);
        (QPoly::new(quo), QPoly::new(r))
    }

    /// Quotient of an exact division; panics if the remainder is non-zero.
    pub fn exact_div(&self, d: &QPoly) -> QPoly {
        let (quo, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        quo
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn lcm(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        (self * other).exact_div(&self.gcd(other)).monic()
    }

    /// Yun's square-free factorisation of the monic part: `(factor, multiplicity)`
    /// with pairwise coprime, square-free, non-constant factors.
    pub fn square_free(&self) -> Vec<(QPoly, u32)> {
        let f = self.monic();
        if f.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.exact_div(&a0);
        let mut c = df.exact_div(&a0);
        let mut d = &c - &b.derivative();
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a);
            c = d.exact_div(&a);
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// Complex roots by Durand-Kerner iteration plus Newton polish.
    pub fn roots(&self) -> Vec<C64> {
        let Some(n) = self.degree() else { return Vec::new() };
        if n == 0 {
            return Vec::new();
        }
        let m = self.monic();
        let c: Vec<C64> = m.coeffs.iter().map(|x| C64::new(x.to_f64().unwrap_or(f64::NAN), 0.0)).collect();
        let p = |z: C64| c.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * z + a);
        let dp = |z: C64| {
            c.iter().enumerate().skip(1).rev().fold(C64::new(0.0, 0.0), |acc, (i, a)| acc * z + a * i as f64)
        };
        let radius = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
        let seed = C64::new(0.4, 0.9);
        let mut z: Vec<C64> = (0..n).map(|k| seed.powu(k as u32) * radius.min(2.0)).collect();
        for _ in 0..500 {
            let mut delta = 0.0f64;
            for i in 0..n {
                let mut den = C64::new(1.0, 0.0);
                for j in 0..n {
                    if j != i {
                        den *= z[i] - z[j];
                    }
                }
                let step = p(z[i]) / den;
                z[i] -= step;
                delta = delta.max(step.norm());
            }
            if delta < 1e-15 * radius {
                break;
            }
        }
        for zi in z.iter_mut() {
            for _ in 0..3 {
                let d = dp(*zi);
                if d.norm() == 0.0 {
                    break;
                }
                *zi -= p(*zi) / d;
            }
            if zi.im.abs() < 1e-13 * (1.0 + zi.norm()) {
                zi.im = 0.0;
            }
        }
        z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        z
    }

    /// Splits off linear factors `s - r` for rational roots `r` with
    /// denominator at most 64, found near the real numeric roots and
    /// confirmed exactly. Returns `(roots with multiplicity, cofactor)`.
    pub fn split_rational_roots(&self) -> (Vec<BigRational>, QPoly) {
        let mut rest = self.clone();
        let mut found = Vec::new();
        for z in self.roots() {
            if z.im != 0.0 || !z.re.is_finite() {
                continue;
            }
            let hit = (1..=64i64).find_map(|den| {
                let r = BigRational::new(BigInt::from((z.re * den as f64).round() as i64), BigInt::from(den));
                rest.eval(&r).is_zero().then_some(r)
            });
            if let Some(r) = hit {
                rest = rest.exact_div(&QPoly::new(vec![-r.clone(), BigRational::one()]));
                found.push(r);
            }
        }
        (found, rest)
    }

    /// Coefficients as strings `"p/q"`, lowest degree first.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                    match o.coeffs.get(i) {
                        Some(b) => a + b,
                        None => a,
                    }
                })
                .collect(),
        )
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &QPoly {
    type Output = QPoly;
    fn sub(self, o: &QPoly) -> QPoly {
        self + &(-o)
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        QPoly::new(c)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = a.is_one() && i > 0;
            if !unit {
                if a.is_integer() {
                    write!(f, "{}", a)?;
                } else {
                    write!(f, "({})", a)?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "s")?,
                _ => write!(f, "s^{}", i)?,
            }
        }
        Ok(())
    }
}
