use faer::linalg::solvers::Solve;
use faer::Mat;

use super::{reduce_to_fundamental, Sl2Error, StripGrid};

/// Periodic trigonometric interpolation weights on the `x` nodes
/// (`nx` even: `sin(pi nx d) / (nx tan(pi d))`).
pub fn trig_weights(x: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len() as f64;
    xs.iter()
        .map(|&xk| {
            let d = x - xk;
            let sd = (std::f64::consts::PI * d).sin();
            if sd.abs() < 1e-15 {
                if (d - d.round()).abs() < 1e-15 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (std::f64::consts::PI * n * d).sin() / (n * (std::f64::consts::PI * d).tan())
            }
        })
        .collect()
}

/// Lagrange weights on `p` consecutive levels around `t`: `(first level, weights)`.
pub fn lagrange_weights(t: f64, ts: &[f64], p: usize) -> (usize, Vec<f64>) {
    let pos = ts.partition_point(|&v| v < t) as isize;
    let j = (pos - (p / 2) as isize).clamp(0, (ts.len() - p) as isize) as usize;
    let w = (0..p)
        .map(|a| {
            (0..p)
                .filter(|&b| b != a)
                .map(|b| (t - ts[j + b]) / (ts[j + a] - ts[j + b]))
                .product()
        })
        .collect();
    (j, w)
}

/// Embedding of functions on the reduced-representative grid into strip
/// functions, and the weighted projection back.
#[derive(Clone, Debug)]
pub struct XMaps {
    /// Strip nodes that are their own reduced representative.
    pub x_nodes: Vec<usize>,
    /// First level of the `c0` sub-strip.
    pub c0_level: usize,
    /// `n_nodes x |x_nodes|`.
    pub iota: Mat<f64>,
    /// `|x_nodes| x (nodes at levels >= c0_level)`.
    pub pi: Mat<f64>,
    /// Weights defining `pi` (uniform rule times `y^{-2N}`) on the `c0` nodes.
    pub w_c0: Vec<f64>,
}

impl XMaps {
    /// `iota` restricted to the `c0` nodes.
    pub fn iota_c0(&self, grid: &StripGrid) -> Mat<f64> {
        let off = self.c0_level * grid.nx;
        Mat::from_fn(grid.n_nodes() - off, self.iota.ncols(), |i, j| self.iota[(off + i, j)])
    }
}

/// Build `iota` and `pi` on `grid` with the automorphy sub-strip starting
/// at the highest level `<= c0`; `order` is the Lagrange order in `y`.
///
/// A node `z` that is not reduced takes the value at its representative,
/// interpolated from the grid; nodes whose representatives depend on each
/// other are resolved by one linear solve.
pub fn strip_x_maps(grid: &StripGrid, c0: f64, order: usize) -> Result<XMaps, Sl2Error> {
    if grid.ny < order {
        return Err(Sl2Error::Grid(format!("{} levels cannot carry order-{order} interpolation", grid.ny)));
    }
    let c0_level = super::system::c0_level(grid, c0)?;
    let n = grid.n_nodes();
    let nx = grid.nx;
    let t_top = grid.ts[grid.ny - 1];
    let mut is_x = vec![false; n];
    // sparse rows of the interpolation stencil: (columns start, level weights, trig weights)
    let mut stencil: Vec<Option<(usize, Vec<f64>, Vec<f64>)>> = vec![None; n];
    for i in 0..n {
        let z = grid.node(i);
        let (w, _) = reduce_to_fundamental(z);
        if (w.x - z.x).abs() < 1e-12 && (w.y - z.y).abs() < 1e-12 {
            is_x[i] = true;
            continue;
        }
        let t = w.y.ln();
        if t > t_top + 1e-12 || t < grid.ts[0] - 1e-12 {
            return Err(Sl2Error::InterpolationRange { y: w.y, c: grid.c(), y_max: grid.y_max() });
        }
        let (j0, lw) = lagrange_weights(t, &grid.ts, order);
        stencil[i] = Some((j0, lw, trig_weights(w.x, &grid.xs)));
    }
    let x_nodes: Vec<usize> = (0..n).filter(|&i| is_x[i]).collect();
    let others: Vec<usize> = (0..n).filter(|&i| !is_x[i]).collect();
    let mut pos = vec![usize::MAX; n];
    for (a, &i) in x_nodes.iter().enumerate() {
        pos[i] = a;
    }
    for (a, &i) in others.iter().enumerate() {
        pos[i] = a;
    }
    let (nf, nn) = (x_nodes.len(), others.len());
    // (I - S_NN) Y = S_NF
    let mut a = Mat::<f64>::identity(nn, nn);
    let mut b = Mat::<f64>::zeros(nn, nf);
    for (r, &i) in others.iter().enumerate() {
        let (j0, lw, tw) = stencil[i].as_ref().unwrap();
        for (da, &wl) in lw.iter().enumerate() {
            for (k, &wt) in tw.iter().enumerate() {
                let col = (j0 + da) * nx + k;
                let w = wl * wt;
                if is_x[col] {
                    b[(r, pos[col])] += w;
                } else {
                    a[(r, pos[col])] -= w;
                }
            }
        }
    }
    let y = if nn > 0 { a.partial_piv_lu().solve(&b) } else { b };
    let mut iota = Mat::<f64>::zeros(n, nf);
    for (a_, &i) in x_nodes.iter().enumerate() {
        iota[(i, a_)] = 1.0;
    }
    for (r, &i) in others.iter().enumerate() {
        for c in 0..nf {
            iota[(i, c)] = y[(r, c)];
        }
    }
    let off = c0_level * nx;
    let w_c0: Vec<f64> = (off..n)
        .map(|i| grid.uniform_weight(i / nx) * grid.ys[i / nx].powi(-2 * grid.n_weight as i32))
        .collect();
    let ic = Mat::from_fn(n - off, nf, |i, j| iota[(off + i, j)]);
    let wic = Mat::from_fn(n - off, nf, |i, j| ic[(i, j)] * w_c0[i]);
    let gram = ic.transpose() * &wic;
    let pi = gram.partial_piv_lu().solve(wic.transpose().to_owned());
    Ok(XMaps { x_nodes, c0_level, iota, pi, w_c0 })
}
