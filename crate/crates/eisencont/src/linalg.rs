//! Thin helpers over faer for the dense complex algebra used throughout.

use faer::linalg::solvers::{Solve, SolveLstsq};
use faer::{Accum, Mat, MatRef, Par};

use crate::C64;

pub type CMat = Mat<C64>;

/// `a * b` with an explicit parallelism choice.
pub fn matmul(a: MatRef<'_, C64>, b: MatRef<'_, C64>, par: Par) -> CMat {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    faer::linalg::matmul::matmul(out.as_mut(), Accum::Replace, a, b, C64::new(1.0, 0.0), par);
    out
}

/// Real `a * b`.
pub fn matmul_real(a: MatRef<'_, f64>, b: MatRef<'_, f64>, par: Par) -> Mat<f64> {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    faer::linalg::matmul::matmul(out.as_mut(), Accum::Replace, a, b, 1.0, par);
    out
}

pub fn to_complex(a: MatRef<'_, f64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| C64::new(a[(i, j)], 0.0))
}

pub fn col_from(v: &[C64]) -> CMat {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

pub fn col_to_vec(m: MatRef<'_, C64>) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, 0)]).collect()
}

/// Determinant kept as `phase * exp(log_abs)` so that products of hundreds of
/// pivots neither underflow nor overflow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    pub phase: C64,
}

impl LogDet {
    pub fn is_zero(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    /// `self / other` as an ordinary complex number.
    pub fn ratio(&self, other: &LogDet) -> C64 {
        if self.is_zero() {
            return C64::new(0.0, 0.0);
        }
        self.phase / other.phase * (self.log_abs - other.log_abs).exp()
    }

    pub fn value(&self) -> C64 {
        if self.is_zero() {
            C64::new(0.0, 0.0)
        } else {
            self.phase * self.log_abs.exp()
        }
    }
}

pub(crate) fn perm_sign(fwd: &[usize]) -> f64 {
    let mut seen = vec![false; fwd.len()];
    let mut sign = 1.0;
    for start in 0..fwd.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = fwd[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

pub fn log_det(a: MatRef<'_, C64>) -> LogDet {
    assert_eq!(a.nrows(), a.ncols(), "log_det of a non-square matrix");
    if a.nrows() == 0 {
        return LogDet { log_abs: 0.0, phase: C64::new(1.0, 0.0) };
    }
    let lu = a.partial_piv_lu();
    let u = lu.U();
    let (fwd, _) = lu.P().arrays();
    let mut log_abs = 0.0;
    let mut phase = C64::new(perm_sign(fwd), 0.0);
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        let r = d.norm();
        if r == 0.0 {
            return LogDet { log_abs: f64::NEG_INFINITY, phase: C64::new(0.0, 0.0) };
        }
        log_abs += r.ln();
        phase *= d / r;
    }
    LogDet { log_abs, phase }
}

/// Solve the square system `a x = b`.
pub fn solve(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> CMat {
    a.partial_piv_lu().solve(b)
}

/// Least-squares solution of `a x ≈ b` (full column rank assumed).
pub fn lstsq(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> CMat {
    a.col_piv_qr().solve_lstsq(b)
}

/// Singular values in descending order.
pub fn singular_values(a: MatRef<'_, C64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.singular_values().expect("svd failed to converge");
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values above `tol * sigma_max`.
pub fn numerical_rank(sv: &[f64], tol: f64) -> usize {
    match sv.first() {
        Some(&s0) if s0 > 0.0 => sv.iter().filter(|&&s| s > tol * s0).count(),
        _ => 0,
    }
}

/// 2-norm condition number, infinite for singular input.
pub fn cond(a: MatRef<'_, C64>) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

pub fn frobenius(a: MatRef<'_, C64>) -> f64 {
    a.norm_l2()
}

pub fn row_norm(a: MatRef<'_, C64>, i: usize) -> f64 {
    (0..a.ncols()).map(|j| a[(i, j)].norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Copy of selected rows.
pub fn select_rows(a: MatRef<'_, C64>, rows: &[usize]) -> CMat {
    Mat::from_fn(rows.len(), a.ncols(), |i, j| a[(rows[i], j)])
}

/// Copy of selected columns.
pub fn select_cols(a: MatRef<'_, C64>, cols: &[usize]) -> CMat {
    Mat::from_fn(a.nrows(), cols.len(), |i, j| a[(i, cols[j])])
}

/// Column order chosen by column-pivoted QR: position `i` holds original column `fwd[i]`.
pub fn pivot_order(a: MatRef<'_, C64>) -> (Vec<usize>, Vec<f64>) {
    let qr = a.col_piv_qr();
    let (fwd, _) = qr.P().arrays();
    let r = qr.thin_R();
    let diag = (0..r.nrows().min(r.ncols())).map(|i| r[(i, i)].norm()).collect();
    (fwd.to_vec(), diag)
}
