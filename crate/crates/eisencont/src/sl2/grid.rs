use std::ops::Range;

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::{HPoint, Sl2Error};
use crate::linalg::solve;
use crate::par::Parallelism;
use crate::specfn::RadialKernel;
use crate::C64;

/// Tensor grid on the strip `[-1/2, 1/2) x [c, y_max]`: `nx` periodic
/// midpoints in `x`, `ny` geometric levels in `y` (uniform in `t = log y`).
/// Node `(j, k)` has index `j * nx + k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripGrid {
    pub nx: usize,
    pub ny: usize,
    /// Weight exponent `N` of `y^{-2N} mu`.
    pub n_weight: u32,
    pub ys: Vec<f64>,
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
    pub dt: f64,
    /// Per-node weights for `mu = dx dy / y^2`, endpoint corrected in `t`.
    pub quad_weights: Vec<f64>,
    /// `quad_weights * y^{-2N}`.
    pub weighted: Vec<f64>,
}

/// Endpoint corrections (in units of `dt`) for the first `q` nodes of a
/// uniform rule, exact on polynomials of degree `< q`.
fn end_corrections(q: usize) -> Vec<f64> {
    // Bernoulli numbers B_2, B_4, ... B_16
    const B: [f64; 8] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0];
    let a = Mat::from_fn(q, q, |p, j| C64::new((j as f64).powi(p as i32), 0.0));
    let b = Mat::from_fn(q, 1, |p, _| {
        let v = match p {
            0 => -0.5,
            p if p % 2 == 1 => B[p / 2] / (p as f64 + 1.0),
            _ => 0.0,
        };
        C64::new(v, 0.0)
    });
    let x = solve(a.as_ref(), b.as_ref());
    (0..q).map(|j| x[(j, 0)].re).collect()
}

impl StripGrid {
    pub fn new(c: f64, y_max: f64, nx: usize, ny: usize, n_weight: u32) -> Result<Self, Sl2Error> {
        if !(c > 0.0 && y_max > c && nx >= 2 && ny >= 4) {
            return Err(Sl2Error::Grid(format!("need 0 < c < y_max, nx >= 2, ny >= 4; got c={c}, y_max={y_max}, nx={nx}, ny={ny}")));
        }
        let t0 = c.ln();
        let dt = (y_max.ln() - t0) / (ny - 1) as f64;
        let ts: Vec<f64> = (0..ny).map(|j| t0 + j as f64 * dt).collect();
        Ok(StripGrid::from_levels(ts, dt, nx, n_weight))
    }

    fn from_levels(ts: Vec<f64>, dt: f64, nx: usize, n_weight: u32) -> Self {
        let ny = ts.len();
        let ys: Vec<f64> = ts.iter().map(|t| t.exp()).collect();
        let xs = (0..nx).map(|k| -0.5 + (k as f64 + 0.5) / nx as f64).collect();
        let q = (ny / 2).min(8);
        let corr = end_corrections(q);
        let mut tw = vec![1.0; ny];
        for j in 0..q {
            tw[j] += corr[j];
            tw[ny - 1 - j] += corr[j];
        }
        let mut quad_weights = Vec::with_capacity(nx * ny);
        let mut weighted = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            // dy / y^2 = dt / y
            let w = tw[j] * dt / (nx as f64 * ys[j]);
            let ww = w * ys[j].powi(-2 * n_weight as i32);
            for _ in 0..nx {
                quad_weights.push(w);
                weighted.push(ww);
            }
        }
        StripGrid { nx, ny, n_weight, ys, ts, xs, dt, quad_weights, weighted }
    }

    /// Grid made of the levels in `range` (same spacing and `x` nodes).
    pub fn levels(&self, range: Range<usize>) -> StripGrid {
        StripGrid::from_levels(self.ts[range].to_vec(), self.dt, self.nx, self.n_weight)
    }

    pub fn c(&self) -> f64 {
        self.ys[0]
    }

    pub fn y_max(&self) -> f64 {
        self.ys[self.ny - 1]
    }

    pub fn n_nodes(&self) -> usize {
        self.nx * self.ny
    }

    pub fn node(&self, i: usize) -> HPoint {
        HPoint { x: self.xs[i % self.nx], y: self.ys[i / self.nx] }
    }

    /// Uninterrupted-rule weight `dt / (nx y_j)` of level `j`.
    pub fn uniform_weight(&self, j: usize) -> f64 {
        self.dt / (self.nx as f64 * self.ys[j])
    }

    /// `mu`-volume of the truncated strip, `1/c - 1/y_max`.
    pub fn volume(&self) -> f64 {
        1.0 / self.c() - 1.0 / self.y_max()
    }

    /// Grid function `g(x, y)` sampled at the nodes.
    pub fn sample(&self, g: impl Fn(HPoint) -> C64) -> Vec<C64> {
        (0..self.n_nodes()).map(|i| g(self.node(i))).collect()
    }

    /// `y^s` at the nodes.
    pub fn power(&self, s: C64) -> Vec<C64> {
        self.sample(|z| (s * z.y.ln()).exp())
    }
}

/// Mean over `x` of each level: the constant term `C f(y_j)`.
pub fn constant_term(grid: &StripGrid, f: &[C64]) -> Vec<C64> {
    assert_eq!(f.len(), grid.n_nodes());
    f.chunks(grid.nx).map(|row| row.iter().sum::<C64>() / grid.nx as f64).collect()
}

/// `(C, I - C)` as dense matrices on the grid.
pub fn cusp_projection_ops(grid: &StripGrid) -> (Mat<f64>, Mat<f64>) {
    let n = grid.n_nodes();
    let nx = grid.nx;
    let cm = Mat::from_fn(n, n, |i, j| if i / nx == j / nx { 1.0 / nx as f64 } else { 0.0 });
    let cc = Mat::from_fn(n, n, |i, j| (i == j) as u8 as f64 - cm[(i, j)]);
    (cm, cc)
}

/// Dense operator between two strip grids.
#[derive(Clone, Debug)]
pub struct DiscretizedOp {
    pub matrix: Mat<f64>,
    pub src: StripGrid,
    pub dst: StripGrid,
}

impl DiscretizedOp {
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let m = &self.matrix;
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f[j] * m[(i, j)]).sum()).collect()
    }

    /// Largest change of an entry under the shift `x -> x + 1/nx` on both sides.
    pub fn shift_defect(&self) -> f64 {
        let (nxd, nxs) = (self.dst.nx, self.src.nx);
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            let ii = (i / nxd) * nxd + (i % nxd + 1) % nxd;
            for j in 0..m.ncols() {
                let jj = (j / nxs) * nxs + (j % nxs + 1) % nxs;
                worst = worst.max((m[(ii, jj)] - m[(i, j)]).abs());
            }
        }
        worst
    }
}

/// Gamma_infinity-periodised point-pair kernel from `src` to `dst`:
/// `[K]_{ij} = sum_n profile(d(z_i, z_j + n)) dt / (nx y_j)`.
pub fn build_conv_op(kernel: &RadialKernel, src: &StripGrid, dst: &StripGrid, par: Parallelism) -> Result<DiscretizedOp, Sl2Error> {
    if src.nx != dst.nx {
        return Err(Sl2Error::Grid(format!("x resolutions differ: {} vs {}", src.nx, dst.nx)));
    }
    let r = kernel.radius;
    let (lo, hi) = (src.c() * (1.0 - 1e-12), src.y_max() * (1.0 + 1e-12));
    for &y in &dst.ys {
        if y * (-r).exp() < lo || y * r.exp() > hi {
            return Err(Sl2Error::SupportViolation { y, radius: r, c: src.c(), y_max: src.y_max() });
        }
    }
    let nx = src.nx;
    let ch_max = r.cosh();
    let mut data = vec![0.0; dst.n_nodes() * src.n_nodes()];
    let row_len = nx * src.n_nodes();
    par.for_each_chunk(&mut data, row_len, |i, block| {
        let yi = dst.ys[i];
        let nmax = (2.0 * yi * r.sinh() + 2.0).ceil() as i64;
        for (j, &yj) in src.ys.iter().enumerate() {
            if (src.ts[j] - dst.ts[i]).abs() >= r {
                continue;
            }
            let w = src.uniform_weight(j);
            let dy2 = (yi - yj) * (yi - yj);
            let den = 2.0 * yi * yj;
            // value depends only on the x offset (l - k) mod nx
            let tab: Vec<f64> = (0..nx)
                .map(|d| {
                    let dx0 = d as f64 / nx as f64;
                    (-nmax..=nmax)
                        .map(|n| {
                            let dx = dx0 + n as f64;
                            let ch = 1.0 + (dx * dx + dy2) / den;
                            if ch >= ch_max {
                                0.0
                            } else {
                                kernel.profile_cosh(ch)
                            }
                        })
                        .sum::<f64>()
                        * w
                })
                .collect();
            for k in 0..nx {
                let row = &mut block[k * src.n_nodes()..(k + 1) * src.n_nodes()];
                for l in 0..nx {
                    row[j * nx + l] = tab[(l + nx - k) % nx];
                }
            }
        }
    });
    let ns = src.n_nodes();
    let matrix = Mat::from_fn(dst.n_nodes(), ns, |i, j| data[i * ns + j]);
    Ok(DiscretizedOp { matrix, src: src.clone(), dst: dst.clone() })
}
