use std::ops::Range;

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{build_conv_op, strip_x_maps, DiscretizedOp, Sl2Error, StripGrid, XMaps};
use crate::linalg::CMat;
use crate::merocont::{LinearFamily, SplitOperator};
use crate::par::Parallelism;
use crate::specfn::{selberg_transform, RadialKernel};
use crate::C64;

/// Grid, kernel and continuation parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sl2Config {
    pub c: f64,
    pub c0: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    /// Weight exponent `N`.
    pub n_weight: u32,
    pub kernel: RadialKernel,
    /// Lagrange order of the `y` interpolation in `iota`.
    pub lagrange_order: usize,
    /// Number of random test covectors for the constant-term block.
    pub n_test: usize,
    pub seed: u64,
    /// Range of `Re s` the weight exponent must cover.
    pub band: [f64; 2],
    /// Anchor of the Fredholm splitting.
    pub s0: C64,
    /// Points of `Re s > 1` where the solution is known to be unique.
    pub unq_points: Vec<C64>,
    pub rank_tol: f64,
    pub cond_cap: f64,
    pub residual_tol: f64,
    pub denominator_floor: f64,
    /// Largest accepted relative misfit of the constant term in `{y^s, y^{1-s}}`.
    pub fit_tol: f64,
    pub parallelism: Parallelism,
}

impl Default for Sl2Config {
    fn default() -> Self {
        Sl2Config {
            c: 0.45,
            c0: 3f64.sqrt() / 2.0,
            y_max: 12.0,
            nx: 24,
            ny: 48,
            n_weight: 4,
            kernel: RadialKernel::default(),
            lagrange_order: 6,
            n_test: 64,
            seed: 1,
            band: [-2.0, 3.0],
            s0: C64::new(1.5, 0.0),
            unq_points: vec![C64::new(1.5, 0.0), C64::new(2.0, 0.5), C64::new(2.5, 0.0)],
            rank_tol: 1e-10,
            cond_cap: 1e10,
            residual_tol: 1e-6,
            denominator_floor: 1e-12,
            fit_tol: 1e-3,
            parallelism: Parallelism::default(),
        }
    }
}

impl Sl2Config {
    pub fn validate(&self) -> Result<(), Sl2Error> {
        let bad = |m: String| Err(Sl2Error::Config(m));
        if !(self.c > 0.0 && self.c < self.c0 && self.c0 < self.y_max) {
            return bad(format!("need 0 < c < c0 < y_max, got {} {} {}", self.c, self.c0, self.y_max));
        }
        if self.nx < 4 || self.nx % 2 != 0 {
            return bad(format!("nx must be even and >= 4, got {}", self.nx));
        }
        if self.ny < 2 * self.lagrange_order.max(4) {
            return bad(format!("ny = {} too small for order {}", self.ny, self.lagrange_order));
        }
        if self.lagrange_order < 2 {
            return bad("lagrange_order must be >= 2".into());
        }
        if self.n_test < 3 {
            return bad("n_test must be >= 3".into());
        }
        if !(self.band[0] < self.band[1]) {
            return bad(format!("empty band {:?}", self.band));
        }
        let need = 1.0 + self.band[0].abs().max(self.band[1].abs());
        if (self.n_weight as f64) < need {
            return Err(Sl2Error::BandTooWide { n_weight: self.n_weight, band: self.band });
        }
        if self.unq_points.is_empty() || self.unq_points.iter().any(|s| s.re <= 1.0) {
            return bad("unq_points must be non-empty and lie in Re s > 1".into());
        }
        if !(self.rank_tol > 0.0 && self.residual_tol > 0.0 && self.denominator_floor >= 0.0 && self.fit_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        self.kernel.validate().map_err(Sl2Error::SpecFn)
    }

    pub fn grid(&self) -> Result<StripGrid, Sl2Error> {
        StripGrid::new(self.c, self.y_max, self.nx, self.ny, self.n_weight)
    }

    /// Source and destination grids of the convolution operator.
    pub fn operator_grids(&self) -> Result<(StripGrid, StripGrid), Sl2Error> {
        let grid = self.grid()?;
        let j0 = c0_level(&grid, self.c0)?;
        let (dst, _) = operator_levels(&grid, j0, self.kernel.radius)?;
        let dst = grid.levels(dst);
        Ok((grid, dst))
    }
}

/// Highest level at or below `c0`.
pub(crate) fn c0_level(grid: &StripGrid, c0: f64) -> Result<usize, Sl2Error> {
    (0..grid.ny)
        .rev()
        .find(|&j| grid.ys[j] <= c0 * (1.0 + 1e-12))
        .ok_or(Sl2Error::Grid(format!("no level at or below c0 = {c0} (c = {})", grid.c())))
}

/// Destination levels (from `j0` while the kernel support stays below the
/// top) and the levels above them.
fn operator_levels(grid: &StripGrid, j0: usize, r: f64) -> Result<(Range<usize>, Range<usize>), Sl2Error> {
    let t_top = grid.ts[grid.ny - 1];
    let last = (j0..grid.ny).take_while(|&i| grid.ts[i] + r <= t_top + 1e-12).last();
    let Some(last) = last else {
        return Err(Sl2Error::SupportViolation { y: grid.ys[j0], radius: r, c: grid.c(), y_max: grid.y_max() });
    };
    Ok((j0..last + 1, last + 1..grid.ny))
}

/// `y^{1/2} log y * sinh(e log y) / (e log y)` with `e = s - 1/2`, i.e.
/// `(y^s - y^{1-s}) / (2s - 1)`, analytic through `s = 1/2`.
pub fn alpha2(y: f64, s: C64) -> C64 {
    let l = y.ln();
    let z = (s - 0.5) * l;
    let shc = if z.norm() < 1e-4 { 1.0 + z * z / 6.0 + z * z * z * z / 120.0 } else { z.sinh() / z };
    y.sqrt() * l * shc
}

pub fn alpha1(y: f64, s: C64) -> C64 {
    (s * y.ln()).exp()
}

/// `h^(s)` of the configured kernel (`NaN` if the quadrature fails).
pub fn hhat(kernel: &RadialKernel, s: C64) -> C64 {
    selberg_transform(kernel, s).unwrap_or(C64::new(f64::NAN, f64::NAN))
}

/// The auxiliary system on strip samples `f`:
///
/// * `a`: `(I - C)(delta(h) f - h^(s) f) = 0` on the destination levels,
/// * `b`: `f = iota pi (f restricted to the c0 strip)`,
/// * `c`: constant term in the span of `alpha_1(s), alpha_2(s)`, as 3x3 determinants
///   against random test covectors,
/// * `n`: normalisation of the `y^s` coefficient to 1,
/// * `d`: no cuspidal part on the levels above the last destination level.
pub struct AuxiliarySystem {
    pub config: Sl2Config,
    pub grid: StripGrid,
    pub xmaps: XMaps,
    pub conv: DiscretizedOp,
    pub dst_levels: Range<usize>,
    pub top_levels: Range<usize>,
    /// Convolution rows with the level mean removed.
    d_centered: Mat<f64>,
    /// Test covectors times `y^{-N}`, `n_test x ny`.
    xw: Mat<f64>,
    /// `iota pi`, `n x n_c0`.
    ip_mat: Mat<f64>,
    /// `(I - C) iota pi`.
    r_mat: Mat<f64>,
    /// `r_mat * D~`.
    p_mat: Mat<f64>,
    /// `p_mat (I - C)`.
    q_mat: Mat<f64>,
    blocks: Vec<(String, Range<usize>)>,
}

pub(crate) fn center_rows(m: &mut Mat<f64>, nx: usize) {
    for blk in 0..m.nrows() / nx {
        for j in 0..m.ncols() {
            let mean = (0..nx).map(|k| m[(blk * nx + k, j)]).sum::<f64>() / nx as f64;
            for k in 0..nx {
                m[(blk * nx + k, j)] -= mean;
            }
        }
    }
}

pub(crate) fn center_cols(m: &mut Mat<f64>, nx: usize) {
    for i in 0..m.nrows() {
        for blk in 0..m.ncols() / nx {
            let mean = (0..nx).map(|k| m[(i, blk * nx + k)]).sum::<f64>() / nx as f64;
            for k in 0..nx {
                m[(i, blk * nx + k)] -= mean;
            }
        }
    }
}

/// Build the operators and the fixed parts of the auxiliary system.
pub fn assemble_auxiliary_system(config: &Sl2Config) -> Result<AuxiliarySystem, Sl2Error> {
    config.validate()?;
    let par = config.parallelism;
    let grid = config.grid()?;
    let xmaps = strip_x_maps(&grid, config.c0, config.lagrange_order)?;
    let (dst_levels, top_levels) = operator_levels(&grid, xmaps.c0_level, config.kernel.radius)?;
    let conv = build_conv_op(&config.kernel, &grid, &grid.levels(dst_levels.clone()), par)?;
    // real-axis check that h^ does not vanish on the band
    for t in 0..=8 {
        let s = C64::new(config.band[0] + (config.band[1] - config.band[0]) * t as f64 / 8.0, 0.0);
        let g = hhat(&config.kernel, s);
        if !(g.norm() > 1e-12) {
            return Err(Sl2Error::HhatVanishes(s));
        }
    }
    let nx = grid.nx;
    let n = grid.n_nodes();

    let mut d_centered = conv.matrix.clone();
    center_rows(&mut d_centered, nx);

    let ip_mat = crate::linalg::matmul_real(xmaps.iota.as_ref(), xmaps.pi.as_ref(), par.faer());
    let mut r_mat = ip_mat.clone();
    center_rows(&mut r_mat, nx);
    // D~ is d_centered on the destination rows of the c0 strip and zero above
    let nd = d_centered.nrows();
    let r_dst = Mat::from_fn(n, nd, |i, j| r_mat[(i, j)]);
    let p_mat = crate::linalg::matmul_real(r_dst.as_ref(), d_centered.as_ref(), par.faer());
    let mut q_mat = p_mat.clone();
    center_cols(&mut q_mat, nx);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let xw = Mat::from_fn(config.n_test, grid.ny, |_, j| {
        let g: f64 = StandardNormal.sample(&mut rng);
        g * grid.ys[j].powi(-(config.n_weight as i32))
    });

    let na = nd;
    let ntop = top_levels.len() * nx;
    let nc = config.n_test - 2;
    let blocks = vec![
        ("a".to_string(), 0..na),
        ("b".to_string(), na..na + n),
        ("c".to_string(), na + n..na + n + nc),
        ("n".to_string(), na + n + nc..na + n + nc + 1),
        ("d".to_string(), na + n + nc + 1..na + n + nc + 1 + ntop),
    ];
    Ok(AuxiliarySystem {
        config: config.clone(),
        grid,
        xmaps,
        conv,
        dst_levels,
        top_levels,
        d_centered,
        xw,
        ip_mat,
        r_mat,
        p_mat,
        q_mat,
        blocks,
    })
}

impl AuxiliarySystem {
    pub fn hhat(&self, s: C64) -> C64 {
        hhat(&self.config.kernel, s)
    }

    pub fn n_nodes(&self) -> usize {
        self.grid.n_nodes()
    }

    /// `[alpha_1, alpha_2]` per level.
    pub fn alphas(&self, s: C64) -> (Vec<C64>, Vec<C64>) {
        (self.grid.ys.iter().map(|&y| alpha1(y, s)).collect(), self.grid.ys.iter().map(|&y| alpha2(y, s)).collect())
    }

    /// Rows of blocks `c` and `n` plus the normalisation right-hand side.
    fn ct_rows(&self, s: C64) -> (Vec<Vec<C64>>, Vec<C64>, C64) {
        let ny = self.grid.ny;
        let (a1, a2) = self.alphas(s);
        let nt = self.xw.nrows();
        let dot = |t: usize, a: &[C64]| -> C64 { (0..ny).map(|j| a[j] * self.xw[(t, j)]).sum() };
        let p1: Vec<C64> = (0..nt).map(|t| dot(t, &a1)).collect();
        let p2: Vec<C64> = (0..nt).map(|t| dot(t, &a2)).collect();
        // rows over levels; spread over x later
        let lev = |t: usize| -> Vec<C64> { (0..ny).map(|j| C64::new(self.xw[(t, j)], 0.0)).collect() };
        let (f0, f1) = (lev(0), lev(1));
        let mut rows = Vec::with_capacity(nt - 2);
        for t in 2..nt {
            let c0 = p1[1] * p2[t] - p2[1] * p1[t];
            let c1 = -(p1[0] * p2[t] - p2[0] * p1[t]);
            let c2 = p1[0] * p2[1] - p2[0] * p1[1];
            let ft = lev(t);
            rows.push((0..ny).map(|j| c0 * f0[j] + c1 * f1[j] + c2 * ft[j]).collect());
        }
        let tw = 2.0 * s - 1.0;
        let det = p1[0] * p2[1] - p2[0] * p1[1];
        // [2s-1, 1] adj(G), G = [[p1_0, p2_0], [p1_1, p2_1]]
        let v0 = tw * p2[1] - p1[1];
        let v1 = -tw * p2[0] + p1[0];
        let nrow = (0..ny).map(|j| v0 * f0[j] + v1 * f1[j]).collect();
        (rows, nrow, tw * det)
    }

    /// Solution candidate's residual per block.
    pub fn block_residuals(&self, s: C64, f: &[C64]) -> Vec<(String, f64)> {
        let (m, b) = self.eval(s);
        let fnorm = crate::linalg::vec_norm(f);
        let res: Vec<f64> = (0..m.nrows())
            .map(|i| {
                let r: C64 = (0..m.ncols()).map(|j| m[(i, j)] * f[j]).sum::<C64>() - b[i];
                r.norm() / (1.0 + crate::linalg::row_norm(m.as_ref(), i) * fnorm)
            })
            .collect();
        self.blocks.iter().map(|(nm, r)| (nm.clone(), res[r.clone()].iter().cloned().fold(0.0, f64::max))).collect()
    }
}

impl LinearFamily for AuxiliarySystem {
    fn dim(&self) -> usize {
        self.grid.n_nodes()
    }

    fn n_equations(&self) -> usize {
        self.blocks.last().unwrap().1.end
    }

    fn eval(&self, s: C64) -> (CMat, Vec<C64>) {
        let g = self.hhat(s);
        let nx = self.grid.nx;
        let n = self.grid.n_nodes();
        let off = self.xmaps.c0_level * nx;
        let dst_off = self.dst_levels.start * nx;
        let (rows_c, row_n, rhs_n) = self.ct_rows(s);
        let (na, ncr) = (self.blocks[0].1.end, self.blocks[2].1.start);
        let top_off = self.top_levels.start * nx;
        let ip = &self.ip_mat;
        let nrows = self.n_equations();
        let mut m = CMat::zeros(nrows, n);
        for i in 0..na {
            let lvl_start = dst_off + (i / nx) * nx;
            for j in 0..n {
                let mut v = C64::new(self.d_centered[(i, j)], 0.0);
                if j >= lvl_start && j < lvl_start + nx {
                    let e = if j - lvl_start == i % nx { 1.0 } else { 0.0 };
                    v -= g * (e - 1.0 / nx as f64);
                }
                m[(i, j)] = v;
            }
        }
        for i in 0..n {
            m[(na + i, i)] += C64::new(1.0, 0.0);
            for j in off..n {
                m[(na + i, j)] -= C64::new(ip[(i, j - off)], 0.0);
            }
        }
        for (t, row) in rows_c.iter().enumerate() {
            for j in 0..n {
                m[(ncr + t, j)] = row[j / nx] / nx as f64;
            }
        }
        let nrow_i = self.blocks[3].1.start;
        for j in 0..n {
            m[(nrow_i, j)] = row_n[j / nx] / nx as f64;
        }
        let d0 = self.blocks[4].1.start;
        for i in 0..self.top_levels.len() * nx {
            let lvl = top_off + (i / nx) * nx;
            for k in 0..nx {
                let e = if k == i % nx { 1.0 } else { 0.0 };
                m[(d0 + i, lvl + k)] = C64::new(e - 1.0 / nx as f64, 0.0);
            }
        }
        let mut b = vec![C64::new(0.0, 0.0); nrows];
        b[nrow_i] = rhs_n;
        (m, b)
    }

    fn blocks(&self) -> Vec<(String, Range<usize>)> {
        self.blocks.clone()
    }
}

impl SplitOperator for AuxiliarySystem {
    fn dim_e(&self) -> usize {
        self.grid.n_nodes()
    }

    fn dim_b2(&self) -> usize {
        2
    }

    fn blocks(&self, s: C64) -> (CMat, CMat) {
        let g = self.hhat(s);
        let n = self.grid.n_nodes();
        let nx = self.grid.nx;
        let off = self.xmaps.c0_level * nx;
        let k1 = CMat::from_fn(n, n, |i, j| self.q_mat[(i, j)] / g);
        let nu = self.nu(s);
        let k2 = CMat::from_fn(n, 2, |i, c| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.p_mat[(i, j)] * nu[(j, c)];
            }
            acc /= g;
            for j in off..n {
                acc += self.r_mat[(i, j - off)] * nu[(j, c)];
            }
            acc
        });
        (k1, k2)
    }

    fn nu(&self, s: C64) -> CMat {
        let nx = self.grid.nx;
        let (a1, a2) = self.alphas(s);
        CMat::from_fn(self.grid.n_nodes(), 2, |i, c| if c == 0 { a1[i / nx] } else { a2[i / nx] })
    }
}
