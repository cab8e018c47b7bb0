use serde::{Deserialize, Serialize};

use super::Sl2Error;

/// Point `x + iy` of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

/// Integer matrix `[[a, b], [c, d]]` of determinant one.
pub type Sl2Z = [[i64; 2]; 2];

pub const IDENTITY: Sl2Z = [[1, 0], [0, 1]];

pub fn sl2_mul(g: &Sl2Z, h: &Sl2Z) -> Sl2Z {
    [
        [g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]],
        [g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]],
    ]
}

const TIE: f64 = 1e-14;

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<Self, Sl2Error> {
        if !(y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(Sl2Error::NotInUpperHalfPlane { x, y });
        }
        Ok(HPoint { x, y })
    }

    /// Moebius action `(a z + b) / (c z + d)`.
    pub fn act(self, g: &Sl2Z) -> HPoint {
        let [[a, b], [c, d]] = *g;
        let (a, b, c, d) = (a as f64, b as f64, c as f64, d as f64);
        let (nr, ni) = (a * self.x + b, a * self.y);
        let (dr, di) = (c * self.x + d, c * self.y);
        let den = dr * dr + di * di;
        HPoint { x: (nr * dr + ni * di) / den, y: (ni * dr - nr * di) / den }
    }

    pub fn abs2(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// `cosh` of the hyperbolic distance.
    pub fn cosh_dist(self, o: HPoint) -> f64 {
        let dx = self.x - o.x;
        let dy = self.y - o.y;
        1.0 + (dx * dx + dy * dy) / (2.0 * self.y * o.y)
    }
}

/// Standard representative: `|x| <= 1/2`, `|z| >= 1`, with `x = -1/2` moved
/// to `+1/2` and the left half of the unit arc moved to the right half.
/// Returns the point and `gamma` with `gamma . z = z_reduced`.
pub fn reduce_to_fundamental(z: HPoint) -> (HPoint, Sl2Z) {
    let mut g = IDENTITY;
    let mut w = z;
    loop {
        let n = (w.x + 0.5).floor();
        if n != 0.0 {
            w.x -= n;
            g = sl2_mul(&[[1, -(n as i64)], [0, 1]], &g);
        }
        let r2 = w.abs2();
        if r2 < 1.0 - TIE {
            w = HPoint { x: -w.x / r2, y: w.y / r2 };
            g = sl2_mul(&[[0, -1], [1, 0]], &g);
        } else {
            break;
        }
    }
    if (w.x + 0.5).abs() < TIE {
        w.x += 1.0;
        g = sl2_mul(&[[1, 1], [0, 1]], &g);
    }
    if (w.abs2() - 1.0).abs() < TIE && w.x < 0.0 {
        w = HPoint { x: -w.x / w.abs2(), y: w.y / w.abs2() };
        g = sl2_mul(&[[0, -1], [1, 0]], &g);
    }
    (w, g)
}

/// `max_gamma Im(gamma z)`, the height of the reduced point.
pub fn height(z: HPoint) -> f64 {
    reduce_to_fundamental(z).0.y
}
