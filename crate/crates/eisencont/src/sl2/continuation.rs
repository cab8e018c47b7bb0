use std::sync::Arc;

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::system::{center_cols, center_rows};
use super::{assemble_auxiliary_system, build_conv_op, constant_term, AuxiliarySystem, Sl2Config, Sl2Error, StripGrid};
use crate::linalg::{lstsq, singular_values, vec_norm, CMat};
use crate::merocont::{
    continue_unique_solution, fredholm_split_witness, EngineOptions, FredholmOptions, LinearFamily, MeromorphicSolution,
    Witness,
};
use crate::par::Parallelism;
use crate::specfn::{m_closed, RadialKernel};
use crate::C64;

/// Grid description recorded with every result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub config: Sl2Config,
    pub n_nodes: usize,
    pub x_nodes: usize,
    pub c0_level: usize,
    pub dst_levels: [usize; 2],
    pub witness_rank: usize,
    pub witness_cond: f64,
    pub selected_equations: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContinuationResult {
    pub s: C64,
    /// Values on the reduced-representative nodes.
    pub psi: Vec<C64>,
    /// Values on every strip node.
    pub strip_values: Vec<C64>,
    pub constant_term: Vec<C64>,
    pub m_estimate: C64,
    /// Fitted coefficient of `y^s` (1 up to discretisation error).
    pub ys_coefficient: C64,
    /// Relative misfit of the constant term in `{y^s, y^{1-s}}`.
    pub fit_residual: f64,
    pub residuals: Vec<(String, f64)>,
    pub max_residual: f64,
    pub denominator_value: C64,
    pub hhat: C64,
    /// Orthogonality to cusp forms is not imposed; contamination shows up in
    /// the residuals and the denominator instead.
    pub cusp_orthogonality_imposed: bool,
}

/// Least-squares fit of `ct` on the levels `1.1 < y < 0.8 y_max` against
/// `y^s, y^{1-s}`: `(coefficients, relative misfit)`.
pub fn fit_constant_term(ys: &[f64], ct: &[C64], s: C64, y_max: f64) -> ([C64; 2], f64) {
    let idx: Vec<usize> = (0..ys.len()).filter(|&j| ys[j] > 1.1 && ys[j] < 0.8 * y_max).collect();
    let a = Mat::from_fn(idx.len(), 2, |i, c| {
        let l = ys[idx[i]].ln();
        if c == 0 { (s * l).exp() } else { ((1.0 - s) * l).exp() }
    });
    let b = Mat::from_fn(idx.len(), 1, |i, _| ct[idx[i]]);
    let x = lstsq(a.as_ref(), b.as_ref());
    let coef = [x[(0, 0)], x[(1, 0)]];
    let res: Vec<C64> = (0..idx.len()).map(|i| a[(i, 0)] * coef[0] + a[(i, 1)] * coef[1] - b[(i, 0)]).collect();
    let bn: Vec<C64> = idx.iter().map(|&j| ct[j]).collect();
    (coef, vec_norm(&res) / vec_norm(&bn).max(1e-300))
}

/// `max |D_{a2}^{1-s} D_{a1}^s (ct)| / max |ct|` on the fit window, with
/// `a1, a2` the level ratios of `q1, q2` steps of the geometric grid.
pub fn difference_residual(ys: &[f64], ct: &[C64], s: C64, q1: usize, q2: usize, y_max: f64) -> f64 {
    let idx: Vec<usize> = (0..ys.len()).filter(|&j| ys[j] > 1.1 && ys[j] < 0.8 * y_max).collect();
    let (lo, hi) = (idx[0], *idx.last().unwrap());
    let a1 = ys[lo + q1] / ys[lo];
    let a2 = ys[lo + q2] / ys[lo];
    let p1 = (s * a1.ln()).exp();
    let p2 = ((1.0 - s) * a2.ln()).exp();
    let scale = idx.iter().map(|&j| ct[j].norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for j in lo..=hi {
        if j + q1 + q2 > hi {
            break;
        }
        let g = |j: usize| ct[j + q1] - p1 * ct[j];
        worst = worst.max((g(j + q2) - p2 * g(j)).norm());
    }
    worst / scale.max(1e-300)
}

/// Prepared pipeline: operators, witness and reduced equations are fixed
/// once; each [`Continuation::evaluate`] is one numerator/denominator solve.
pub struct Continuation {
    system: Arc<AuxiliarySystem>,
    solution: MeromorphicSolution,
    meta: GridMeta,
}

impl Continuation {
    pub fn prepare(config: &Sl2Config) -> Result<Self, Sl2Error> {
        let system = Arc::new(assemble_auxiliary_system(config)?);
        let fopts = FredholmOptions { rank_tol: config.rank_tol, cond_cap: config.cond_cap, rank_cap: usize::MAX };
        let witness = fredholm_split_witness(system.clone(), config.s0, &fopts)?;
        let witness_rank = witness.dim_l();
        let witness_cond = witness.inner().cond_s0;
        let eopts = EngineOptions {
            rank_tol: config.rank_tol,
            residual_tol: config.residual_tol,
            denominator_floor: config.denominator_floor,
            parallelism: config.parallelism,
            ..EngineOptions::default()
        };
        let fam: Arc<dyn LinearFamily> = system.clone();
        let wit: Arc<dyn Witness> = Arc::new(witness);
        let solution = continue_unique_solution(fam, wit, &config.unq_points, &[config.s0], &eopts)?;
        let meta = GridMeta {
            config: config.clone(),
            n_nodes: system.n_nodes(),
            x_nodes: system.xmaps.x_nodes.len(),
            c0_level: system.xmaps.c0_level,
            dst_levels: [system.dst_levels.start, system.dst_levels.end],
            witness_rank,
            witness_cond,
            selected_equations: solution.selected_equations().len(),
        };
        Ok(Continuation { system, solution, meta })
    }

    pub fn system(&self) -> &AuxiliarySystem {
        &self.system
    }

    pub fn solution(&self) -> &MeromorphicSolution {
        &self.solution
    }

    pub fn meta(&self) -> &GridMeta {
        &self.meta
    }

    fn check_s(&self, s: C64) -> Result<C64, Sl2Error> {
        let band = self.meta.config.band;
        if s.re < band[0] || s.re > band[1] {
            return Err(Sl2Error::OutOfBand { s, band });
        }
        let g = self.system.hhat(s);
        if !(g.norm() > 1e-12) {
            return Err(Sl2Error::HhatVanishes(s));
        }
        Ok(g)
    }

    /// `(m estimate, |d(s)|)` without residual audit.
    pub fn m_fast(&self, s: C64) -> Result<(C64, f64), Sl2Error> {
        self.check_s(s)?;
        let (n, d) = self.solution.numerator_denominator(s);
        if d.norm() < self.meta.config.denominator_floor {
            return Err(Sl2Error::PoleProximity { s, denominator: d.norm() });
        }
        let f: Vec<C64> = n.iter().map(|x| x / d).collect();
        let ct = constant_term(&self.system.grid, &f);
        let (coef, _) = fit_constant_term(&self.system.grid.ys, &ct, s, self.meta.config.y_max);
        Ok((coef[1], d.norm()))
    }

    pub fn evaluate(&self, s: C64) -> Result<ContinuationResult, Sl2Error> {
        let g = self.check_s(s)?;
        let smp = self.solution.eval(s);
        let Some(f) = smp.value else {
            return Err(Sl2Error::PoleProximity { s, denominator: smp.denominator.norm() });
        };
        if smp.max_residual > self.meta.config.residual_tol {
            return Err(Sl2Error::ResidualFailure { s, residual: smp.max_residual });
        }
        let ct = constant_term(&self.system.grid, &f);
        let (coef, fit_residual) = fit_constant_term(&self.system.grid.ys, &ct, s, self.meta.config.y_max);
        if !(fit_residual <= self.meta.config.fit_tol) {
            return Err(Sl2Error::FitFailure { s, residual: fit_residual });
        }
        Ok(ContinuationResult {
            s,
            psi: self.system.xmaps.x_nodes.iter().map(|&i| f[i]).collect(),
            strip_values: f,
            constant_term: ct,
            m_estimate: coef[1],
            ys_coefficient: coef[0],
            fit_residual,
            residuals: smp.block_residuals,
            max_residual: smp.max_residual,
            denominator_value: smp.denominator,
            hhat: g,
            cusp_orthogonality_imposed: false,
        })
    }

    /// Zeros of the denominator on the real segment `[a, b]`.
    pub fn poles_on_real_segment(&self, a: f64, b: f64, n: usize) -> Vec<C64> {
        self.solution
            .poles_on_segment(C64::new(a, 0.0), C64::new(b, 0.0), n)
            .into_iter()
            .filter(|p| !p.removable)
            .map(|p| p.s)
            .collect()
    }

    /// Residue of `m` at `p`: mean of `(s - p) m(s)` over `points` nodes of
    /// the circle of radius `rho`.
    pub fn m_residue(&self, p: C64, rho: f64, points: usize) -> Result<C64, Sl2Error> {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..points {
            let e = C64::from_polar(rho, 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / points as f64);
            acc += e * self.m_fast(p + e)?.0;
        }
        Ok(acc / points as f64)
    }

    /// One row per point; errors become a status string.
    pub fn scan(&self, points: &[C64]) -> Vec<ScanRow> {
        let mut rows: Vec<ScanRow> = points
            .iter()
            .map(|&s| {
                let oracle = m_closed(s).ok();
                let mut row = ScanRow::empty(s, oracle);
                match self.evaluate(s) {
                    Ok(r) => {
                        row.m_est = Some(r.m_estimate);
                        row.denom_abs = r.denominator_value.norm();
                        row.max_residual = r.max_residual;
                        row.abs_err = oracle.map(|m| (m - r.m_estimate).norm());
                        row.status = "ok".to_string();
                    }
                    Err(e) => {
                        row.denom_abs = self.solution.numerator_denominator(s).1.norm();
                        row.status = e.status().to_string();
                    }
                }
                row
            })
            .collect();
        // sign changes of the (real-normalised) denominator between neighbours flag a pole
        for i in 0..rows.len().saturating_sub(1) {
            let (a, b) = (rows[i].s, rows[i + 1].s);
            let (da, db) = (self.solution.numerator_denominator(a).1, self.solution.numerator_denominator(b).1);
            if (da * db.conj()).re < 0.0 {
                let poles = self.solution.poles_on_segment(a, b, 3);
                // the refinement may wander to a pole off the segment; only flag those between the rows
                let len = (b - a).norm();
                for p in poles.into_iter().filter(|p| {
                    let t = ((p.s - a) * (b - a).conj()).re / (len * len);
                    (a + (b - a) * t.clamp(0.0, 1.0) - p.s).norm() <= 1e-3 * len
                }) {
                    let k = if (p.s - a).norm() <= (p.s - b).norm() { i } else { i + 1 };
                    rows[k].status = "pole-proximity".to_string();
                }
            }
        }
        rows
    }
}

/// Row of an `m(s)` scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanRow {
    pub s: C64,
    pub m_est: Option<C64>,
    pub m_closed: Option<C64>,
    pub abs_err: Option<f64>,
    pub denom_abs: f64,
    pub max_residual: f64,
    pub status: String,
}

impl ScanRow {
    fn empty(s: C64, m_closed: Option<C64>) -> Self {
        ScanRow { s, m_est: None, m_closed, abs_err: None, denom_abs: f64::NAN, max_residual: f64::NAN, status: String::new() }
    }

    pub const CSV_HEADER: &'static str =
        "s_re,s_im,m_est_re,m_est_im,m_closed_re,m_closed_im,abs_err,denom_abs,max_residual,status";

    pub fn csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.12e}"));
        format!(
            "{},{},{},{},{},{},{},{:.6e},{:.6e},{}",
            self.s.re,
            self.s.im,
            opt(self.m_est.map(|m| m.re)),
            opt(self.m_est.map(|m| m.im)),
            opt(self.m_closed.map(|m| m.re)),
            opt(self.m_closed.map(|m| m.im)),
            opt(self.abs_err),
            self.denom_abs,
            self.max_residual,
            self.status
        )
    }
}

/// One-shot pipeline: prepare and evaluate at `s`.
pub fn continue_eisenstein(s: C64, config: &Sl2Config) -> Result<ContinuationResult, Sl2Error> {
    Continuation::prepare(config)?.evaluate(s)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HsReport {
    pub singular_values: Vec<f64>,
    pub frobenius: f64,
    /// First index with `sigma_k / sigma_1 <= 1e-3`.
    pub k0: Option<usize>,
}

/// Spectrum of the cuspidal block `(I - C) delta(h) (I - C)` from `src` to
/// `dst`, measured in the weighted norms: singular values of
/// `diag(w_dst^{1/2}) K diag(w_src^{-1/2})`.
pub fn hs_compactness_report(
    kernel: &RadialKernel,
    src: &StripGrid,
    dst: &StripGrid,
    par: Parallelism,
) -> Result<HsReport, Sl2Error> {
    let op = build_conv_op(kernel, src, dst, par)?;
    let mut m = op.matrix;
    center_rows(&mut m, dst.nx);
    center_cols(&mut m, src.nx);
    let mc = CMat::from_fn(m.nrows(), m.ncols(), |i, j| {
        C64::new(m[(i, j)] * dst.weighted[i].sqrt() / src.weighted[j].sqrt(), 0.0)
    });
    let singular_values = singular_values(mc.as_ref());
    let frobenius = singular_values.iter().map(|s| s * s).sum::<f64>().sqrt();
    let k0 = singular_values.first().and_then(|&s1| singular_values.iter().position(|&s| s <= 1e-3 * s1));
    Ok(HsReport { singular_values, frobenius, k0 })
}
