use std::sync::Arc;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EngineError, LinearFamily, Witness};
use crate::linalg::{log_det, pivot_order, row_norm, select_cols, select_rows, singular_values, solve, vec_norm, CMat, LogDet};
use crate::par::Parallelism;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineOptions {
    /// Relative singular-value cut for the rank of `lambda_s`.
    pub rank_tol: f64,
    /// Relative residual accepted on every supplied equation.
    pub residual_tol: f64,
    /// `|d(s)|` below this (with `d(s2) = 1`) counts as a zero of the denominator.
    pub denominator_floor: f64,
    /// Largest `k` for which the numerator is computed by cofactors.
    pub adjugate_max: usize,
    pub parallelism: Parallelism,
    /// Equations whose composed row is below this fraction of the largest are ignored in selection.
    pub drop_row_tol: f64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            rank_tol: 1e-10,
            residual_tol: 1e-9,
            denominator_floor: 1e-8,
            adjugate_max: 12,
            parallelism: Parallelism::default(),
            drop_row_tol: 1e-10,
        }
    }
}

/// One evaluation of the continued solution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionSample {
    pub s: C64,
    pub numerator: Vec<C64>,
    pub denominator: C64,
    /// `N / d`, absent where `|d|` is below the floor.
    pub value: Option<Vec<C64>>,
    /// Largest relative residual over all equations (0 where `value` is absent).
    pub max_residual: f64,
    pub block_residuals: Vec<(String, f64)>,
    /// `D1(s)` normalised to `D1(s1) = 1`.
    pub d1: C64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionDump {
    pub schema: String,
    pub k: usize,
    pub s1: C64,
    pub s2: C64,
    pub witness_columns: Vec<usize>,
    pub selected_equations: Vec<usize>,
    pub samples: Vec<SolutionSample>,
}

/// Zero of the denominator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoleReport {
    pub s: C64,
    /// `|d|` at the refined point.
    pub denominator_abs: f64,
    /// The numerator vanishes too: the representation may have a removable singularity.
    pub removable: bool,
    /// Contour mean of `(s - p) v(s)` on a small circle.
    pub residue: Vec<C64>,
}

/// `v(s) = N(s) / d(s)` built by [`continue_unique_solution`].
pub struct MeromorphicSolution {
    family: Arc<dyn LinearFamily>,
    witness: Arc<dyn Witness>,
    opts: EngineOptions,
    k: usize,
    s1: C64,
    s2: C64,
    cols: Vec<usize>,
    nu_rows: Vec<usize>,
    eqs: Vec<usize>,
    eq_scale: Vec<f64>,
    d1_ref: LogDet,
    d2_ref: LogDet,
}

fn probe_quality(lam: &CMat, rank_tol: f64) -> (usize, f64) {
    let sv = singular_values(lam.as_ref());
    let k = crate::linalg::numerical_rank(&sv, rank_tol);
    let c = if k == 0 { 1.0 } else { sv[0] / sv[k - 1] };
    (k, c)
}

/// Rows of `a` (already scaled) chosen by column-pivoted QR on `a^T`, after
/// `forced` rows have been taken and projected out.
fn select_equations(a: &CMat, forced: &[usize], k: usize, tol: f64) -> Option<Vec<usize>> {
    let n = a.nrows();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    // orthonormal basis of the span of chosen rows (as row vectors)
    let mut q: Vec<Vec<C64>> = Vec::new();
    let row = |i: usize| -> Vec<C64> { (0..a.ncols()).map(|j| a[(i, j)]).collect() };
    let add = |v: Vec<C64>, q: &mut Vec<Vec<C64>>| -> f64 {
        let mut w = v;
        for _ in 0..2 {
            for b in q.iter() {
                let dot: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= dot * bi;
                }
            }
        }
        let nrm = vec_norm(&w);
        if nrm > 0.0 {
            q.push(w.into_iter().map(|x| x / nrm).collect());
        }
        nrm
    };
    for &i in forced {
        if chosen.len() == k {
            break;
        }
        if add(row(i), &mut q) > tol {
            chosen.push(i);
        } else {
            q.pop();
        }
    }
    if chosen.len() < k {
        let rest: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
        // project the remaining rows onto the complement of the chosen span
        let proj = Mat::from_fn(a.ncols(), rest.len(), |j, c| {
            let mut w = row(rest[c]);
            for b in &q {
                let dot: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= dot * bi;
                }
            }
            w[j]
        });
        let (fwd, diag) = pivot_order(proj.as_ref());
        let need = k - chosen.len();
        let dmax = diag.first().copied().unwrap_or(0.0);
        if diag.len() < need || diag[need - 1] <= tol * dmax.max(1.0) || diag[need - 1] == 0.0 {
            return None;
        }
        chosen.extend(fwd[..need].iter().map(|&c| rest[c]));
    }
    Some(chosen)
}

/// Determinant of `a` with column `j` replaced by `b`, via LU.
fn cramer(a: &CMat, b: &[C64]) -> Vec<LogDet> {
    let k = a.nrows();
    (0..k)
        .map(|j| {
            let aj = Mat::from_fn(k, k, |r, c| if c == j { b[r] } else { a[(r, c)] });
            log_det(aj.as_ref())
        })
        .collect()
}

/// Continue the unique solution of `family` off `unq_region`.
///
/// `probe_grid` is searched for the point of maximal witness rank; the
/// reduced equations are fixed at the best-conditioned point of `unq_region`.
pub fn continue_unique_solution(
    family: Arc<dyn LinearFamily>,
    witness: Arc<dyn Witness>,
    unq_region: &[C64],
    probe_grid: &[C64],
    opts: &EngineOptions,
) -> Result<MeromorphicSolution, EngineError> {
    if unq_region.is_empty() {
        return Err(EngineError::EmptySamples("unq_region"));
    }
    if probe_grid.is_empty() {
        return Err(EngineError::EmptySamples("probe_grid"));
    }
    if witness.dim_e() != family.dim() {
        return Err(EngineError::Dimension(format!(
            "witness maps into dimension {}, family has {}",
            witness.dim_e(),
            family.dim()
        )));
    }
    let par = opts.parallelism;

    // (i) probe point of maximal rank
    let probes = par.map(probe_grid.len(), |i| {
        let lam = witness.eval(probe_grid[i]);
        let (k, c) = probe_quality(&lam, opts.rank_tol);
        (k, c, lam)
    });
    let (best, _) = probes
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)))
        .expect("probe grid is non-empty");
    let (k, _, lam1) = &probes[best];
    let k = *k;
    let s1 = probe_grid[best];

    // (ii) witness directions L0 and dual functionals nu_j
    let (cols, nu_rows) = if k == 0 {
        (Vec::new(), Vec::new())
    } else {
        let (cfwd, _) = pivot_order(lam1.as_ref());
        let cols: Vec<usize> = cfwd[..k].to_vec();
        let l1 = select_cols(lam1.as_ref(), &cols);
        let (rfwd, _) = pivot_order(l1.transpose());
        (cols, rfwd[..k].to_vec())
    };

    // (iii) D1 reference value
    let d1_of = |lam: &CMat| -> LogDet {
        let sq = Mat::from_fn(k, k, |i, j| lam[(nu_rows[i], cols[j])]);
        log_det(sq.as_ref())
    };
    let d1_ref = d1_of(lam1);

    // (iv) reduced equations at the best point of the uniqueness region
    let candidates = par.map(unq_region.len(), |i| {
        let s = unq_region[i];
        let lam = witness.eval(s);
        let d1 = d1_of(&lam);
        if d1.is_zero() || d1.ratio(&d1_ref).norm() < opts.rank_tol {
            return None;
        }
        let lk = select_cols(lam.as_ref(), &cols);
        let (m, b) = family.eval(s);
        let a = &m * &lk;
        let nr: Vec<f64> = (0..a.nrows()).map(|r| row_norm(a.as_ref(), r)).collect();
        let nmax = nr.iter().cloned().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..a.nrows()).filter(|&r| nr[r] > opts.drop_row_tol * nmax).collect();
        let scaled = Mat::from_fn(keep.len(), k, |r, j| a[(keep[r], j)] / nr[keep[r]]);
        let bmax = keep.iter().map(|&r| b[r].norm() / nr[r]).fold(0.0, f64::max);
        let mut forced: Vec<usize> = (0..keep.len()).filter(|&r| b[keep[r]].norm() / nr[keep[r]] > 1e-12 * bmax && bmax > 0.0).collect();
        forced.sort_by(|&x, &y| (b[keep[y]].norm() / nr[keep[y]]).total_cmp(&(b[keep[x]].norm() / nr[keep[x]])));
        forced.truncate(1);
        let sel = select_equations(&scaled, &forced, k, opts.rank_tol)?;
        let eqs: Vec<usize> = sel.iter().map(|&r| keep[r]).collect();
        let scale: Vec<f64> = eqs.iter().map(|&r| nr[r]).collect();
        let red = Mat::from_fn(k, k, |r, j| a[(eqs[r], j)] / scale[r]);
        let sv = singular_values(red.as_ref());
        let c = if k == 0 { 1.0 } else { sv[0] / sv[k - 1] };
        if !(c.is_finite() && c < 1.0 / opts.rank_tol) {
            return None;
        }
        Some((c, eqs, scale, log_det(red.as_ref())))
    });
    let (i2, (_, eqs, eq_scale, d2_ref)) = candidates
        .into_iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|c| (i, c)))
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .ok_or(EngineError::NoUniqueSolution)?;
    let s2 = unq_region[i2];

    let sol = MeromorphicSolution {
        family,
        witness,
        opts: *opts,
        k,
        s1,
        s2,
        cols,
        nu_rows,
        eqs,
        eq_scale,
        d1_ref,
        d2_ref,
    };

    // witness audit: the full system must hold wherever d is safely non-zero
    let audits = par.map(unq_region.len(), |i| sol.eval(unq_region[i]));
    for smp in audits {
        if smp.value.is_some() && smp.max_residual > opts.residual_tol {
            return Err(EngineError::WitnessViolation {
                s: smp.s,
                residual: smp.max_residual,
                denominator: smp.denominator.norm(),
            });
        }
    }
    Ok(sol)
}

impl MeromorphicSolution {
    /// Rank of the witness at the probe point.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s1(&self) -> C64 {
        self.s1
    }

    pub fn s2(&self) -> C64 {
        self.s2
    }

    pub fn selected_equations(&self) -> &[usize] {
        &self.eqs
    }

    pub fn witness_columns(&self) -> &[usize] {
        &self.cols
    }

    pub fn options(&self) -> &EngineOptions {
        &self.opts
    }

    fn reduced(&self, s: C64) -> (CMat, CMat, Vec<C64>) {
        let lam = self.witness.eval(s);
        let lk = select_cols(lam.as_ref(), &self.cols);
        let (m, b) = self.family.eval(s);
        let msel = select_rows(m.as_ref(), &self.eqs);
        let a0 = &msel * &lk;
        let a = Mat::from_fn(self.k, self.k, |r, j| a0[(r, j)] / self.eq_scale[r]);
        let bs = (0..self.k).map(|r| b[self.eqs[r]] / self.eq_scale[r]).collect();
        (lam, a, bs)
    }

    /// `D1(s) / D1(s1)`.
    pub fn d1(&self, s: C64) -> C64 {
        let lam = self.witness.eval(s);
        let sq = Mat::from_fn(self.k, self.k, |i, j| lam[(self.nu_rows[i], self.cols[j])]);
        log_det(sq.as_ref()).ratio(&self.d1_ref)
    }

    /// `(N(s), d(s))` with `d(s2) = 1`.
    pub fn numerator_denominator(&self, s: C64) -> (Vec<C64>, C64) {
        let dim = self.family.dim();
        if self.k == 0 {
            return (vec![C64::new(0.0, 0.0); dim], C64::new(1.0, 0.0));
        }
        let (lam, a, b) = self.reduced(s);
        let det = log_det(a.as_ref());
        let d = det.ratio(&self.d2_ref);
        // coordinates in L0, multiplied by d
        let w: Vec<C64> = if self.k <= self.opts.adjugate_max || det.is_zero() {
            cramer(&a, &b).iter().map(|x| x.ratio(&self.d2_ref)).collect()
        } else {
            let x = solve(a.as_ref(), crate::linalg::col_from(&b).as_ref());
            (0..self.k).map(|j| x[(j, 0)] * d).collect()
        };
        let n = (0..dim)
            .map(|i| (0..self.k).map(|j| lam[(i, self.cols[j])] * w[j]).sum())
            .collect();
        (n, d)
    }

    /// `v(s)`, or `None` on the denominator floor.
    pub fn value(&self, s: C64) -> Option<Vec<C64>> {
        let (n, d) = self.numerator_denominator(s);
        (d.norm() >= self.opts.denominator_floor).then(|| n.iter().map(|x| x / d).collect())
    }

    /// Relative residual `|mu_i v - c_i| / (1 + |mu_i| |v|)` of every equation.
    pub fn residuals(&self, s: C64, v: &[C64]) -> Vec<f64> {
        let (m, b) = self.family.eval(s);
        let vn = vec_norm(v);
        (0..m.nrows())
            .map(|i| {
                let r: C64 = (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum::<C64>() - b[i];
                r.norm() / (1.0 + row_norm(m.as_ref(), i) * vn)
            })
            .collect()
    }

    pub fn eval(&self, s: C64) -> SolutionSample {
        let (numerator, denominator) = self.numerator_denominator(s);
        let d1 = if self.k == 0 { C64::new(1.0, 0.0) } else { self.d1(s) };
        let value: Option<Vec<C64>> =
            (denominator.norm() >= self.opts.denominator_floor).then(|| numerator.iter().map(|x| x / denominator).collect());
        let (max_residual, block_residuals) = match &value {
            Some(v) => {
                let res = self.residuals(s, v);
                let blocks = self
                    .family
                    .blocks()
                    .into_iter()
                    .map(|(name, r)| {
                        let m = res[r].iter().cloned().fold(0.0, f64::max);
                        (name, m)
                    })
                    .collect();
                (res.iter().cloned().fold(0.0, f64::max), blocks)
            }
            None => (0.0, Vec::new()),
        };
        SolutionSample { s, numerator, denominator, value, max_residual, block_residuals, d1 }
    }

    pub fn sample(&self, grid: &[C64]) -> Vec<SolutionSample> {
        self.opts.parallelism.map(grid.len(), |i| self.eval(grid[i]))
    }

    pub fn dump(&self, grid: &[C64]) -> SolutionDump {
        SolutionDump {
            schema: "eisencont.solution.v1".to_string(),
            k: self.k,
            s1: self.s1,
            s2: self.s2,
            witness_columns: self.cols.clone(),
            selected_equations: self.eqs.clone(),
            samples: self.sample(grid),
        }
    }

    /// At `s`, moving `v(s)` along random directions of `Im lambda_s` must
    /// strictly increase the full-system residual.
    pub fn uniqueness_certificate(&self, s: C64, trials: usize, seed: u64) -> bool {
        let Some(v) = self.value(s) else { return false };
        let (m, b) = self.family.eval(s);
        let lam = self.witness.eval(s);
        let resid = |x: &[C64]| -> f64 {
            let r: Vec<C64> = (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum::<C64>() - b[i])
                .collect();
            vec_norm(&r)
        };
        let base = resid(&v);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vn = vec_norm(&v).max(1.0);
        (0..trials).all(|_| {
            let w: Vec<C64> = (0..self.k).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let mut dir: Vec<C64> =
                (0..v.len()).map(|i| (0..self.k).map(|j| lam[(i, self.cols[j])] * w[j]).sum()).collect();
            let dn = vec_norm(&dir);
            if dn == 0.0 {
                return false;
            }
            for x in dir.iter_mut() {
                *x *= 1e-3 * vn / dn;
            }
            let pert: Vec<C64> = v.iter().zip(&dir).map(|(a, b)| a + b).collect();
            resid(&pert) > base
        })
    }

    /// Zeros of `d` on the segment `[a, b]`, located from `n` samples and
    /// refined by secant steps.
    pub fn poles_on_segment(&self, a: C64, b: C64, n: usize) -> Vec<PoleReport> {
        let n = n.max(3);
        let pts: Vec<C64> = (0..n).map(|i| a + (b - a) * (i as f64 / (n - 1) as f64)).collect();
        let ds = self.opts.parallelism.map(n, |i| self.numerator_denominator(pts[i]).1);
        let h = (b - a).norm() / (n - 1) as f64;
        let mut out: Vec<PoleReport> = Vec::new();
        for i in 0..n {
            let here = ds[i].norm();
            let left = if i > 0 { ds[i - 1].norm() } else { f64::INFINITY };
            let right = if i + 1 < n { ds[i + 1].norm() } else { f64::INFINITY };
            // sign change of a (phase-aligned) real part, or a local minimum
            let crossing = i + 1 < n && {
                let ph = if ds[i].norm() > 0.0 { ds[i].conj() / ds[i].norm() } else { C64::new(1.0, 0.0) };
                (ds[i] * ph).re * (ds[i + 1] * ph).re < 0.0
            };
            if !(crossing || (here <= left && here < right)) {
                continue;
            }
            let start = if crossing { (pts[i], pts[i + 1]) } else { (pts[i], pts[i] + (b - a) / (n - 1) as f64 * 0.5) };
            if let Some(p) = self.secant(start.0, start.1, h) {
                if p.norm_sqr().is_finite() && out.iter().all(|q| (q.s - p).norm() > 1e-6 * (1.0 + p.norm())) {
                    out.push(self.pole_report(p, (0.05f64).min(0.25 * h.max(1e-3) * 10.0)));
                }
            }
        }
        out.sort_by(|x, y| x.s.re.total_cmp(&y.s.re));
        out
    }

    fn secant(&self, mut x0: C64, mut x1: C64, h: f64) -> Option<C64> {
        let d = |s: C64| self.numerator_denominator(s).1;
        let (mut f0, mut f1) = (d(x0), d(x1));
        let anchor = x0;
        for _ in 0..60 {
            if f1 == f0 {
                break;
            }
            let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
            if !x2.re.is_finite() || (x2 - anchor).norm() > 4.0 * h {
                return None;
            }
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = d(x1);
            if (x1 - x0).norm() < 1e-14 * (1.0 + x1.norm()) {
                break;
            }
        }
        (f1.norm() < self.opts.denominator_floor).then_some(x1)
    }

    /// Report at a known zero `p` of `d`, residue from a circle of radius `rho`.
    pub fn pole_report(&self, p: C64, rho: f64) -> PoleReport {
        let (n, d) = self.numerator_denominator(p);
        let m = 32;
        let circle = self.opts.parallelism.map(m, |j| {
            let e = C64::from_polar(rho, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
            let (nn, dd) = self.numerator_denominator(p + e);
            nn.into_iter().map(|x| x * e / dd).collect::<Vec<_>>()
        });
        let dim = n.len();
        let residue: Vec<C64> = (0..dim).map(|i| circle.iter().map(|c| c[i]).sum::<C64>() / m as f64).collect();
        let nscale = circle.iter().flat_map(|c| c.iter()).map(|x| x.norm()).fold(0.0, f64::max) / rho;
        let removable = vec_norm(&n) <= 1e-6 * nscale.max(1e-300) || vec_norm(&residue) <= 1e-8 * nscale.max(1e-300) * rho;
        PoleReport { s: p, denominator_abs: d.norm(), removable, residue }
    }
}
