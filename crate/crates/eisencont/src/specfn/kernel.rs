use serde::{Deserialize, Serialize};

use super::SpecFnError;

/// Shape of a compactly supported radial profile on `[0, radius)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelShape {
    /// `(1 - (u/r)^2)^power`; C^{power-1} at the edge of the support.
    Poly { power: u32 },
    /// `exp(-1 / (1 - (u/r)^2))`; smooth but its quadrature converges slowly.
    Bump,
}

/// Point-pair invariant `k(z, w) = profile(d(z, w))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialKernel {
    pub radius: f64,
    pub shape: KernelShape,
}

impl Default for RadialKernel {
    fn default() -> Self {
        RadialKernel { radius: 0.5, shape: KernelShape::Poly { power: 8 } }
    }
}

impl RadialKernel {
    pub fn new(radius: f64, shape: KernelShape) -> Result<Self, SpecFnError> {
        let k = RadialKernel { radius, shape };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<(), SpecFnError> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(SpecFnError::InvalidKernel(format!("radius must be positive, got {}", self.radius)));
        }
        if let KernelShape::Poly { power } = self.shape {
            if power < 3 {
                return Err(SpecFnError::InvalidKernel(format!("power {power} is not C^2 at the support edge")));
            }
        }
        Ok(())
    }

    /// Profile as a function of hyperbolic distance.
    #[inline]
    pub fn profile(&self, u: f64) -> f64 {
        let u = u.abs();
        if u >= self.radius {
            return 0.0;
        }
        let x = u / self.radius;
        let q = 1.0 - x * x;
        match self.shape {
            KernelShape::Poly { power } => q.powi(power as i32),
            KernelShape::Bump => (-1.0 / q).exp(),
        }
    }

    /// Profile evaluated from `cosh` of the distance, skipping the `acosh`
    /// when the point is out of range.
    #[inline]
    pub fn profile_cosh(&self, ch: f64) -> f64 {
        if ch >= self.radius.cosh() {
            return 0.0;
        }
        self.profile(ch.max(1.0).acosh())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_positivity() {
        for k in [RadialKernel::default(), RadialKernel { radius: 0.8, shape: KernelShape::Bump }] {
            assert!(k.profile(0.0) > 0.0);
            assert_eq!(k.profile(k.radius), 0.0);
            assert_eq!(k.profile(2.0 * k.radius), 0.0);
            for i in 0..100 {
                assert!(k.profile(i as f64 * k.radius / 100.0) >= 0.0);
            }
        }
    }

    #[test]
    fn rejects_rough_profiles() {
        assert!(RadialKernel::new(0.5, KernelShape::Poly { power: 2 }).is_err());
        assert!(RadialKernel::new(-1.0, KernelShape::Bump).is_err());
    }
}
