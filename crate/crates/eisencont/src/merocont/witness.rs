use std::sync::Arc;

use faer::Mat;

use super::EngineError;
use crate::linalg::{cond, solve, CMat};
use crate::C64;

/// Finite-type witness: an analytic map `lambda_s: C^{dim_l} -> C^{dim_e}`
/// whose image contains every solution of the system at `s`.
pub trait Witness: Send + Sync {
    fn dim_e(&self) -> usize;
    fn dim_l(&self) -> usize;
    /// `dim_e x dim_l` matrix of `lambda_s`.
    fn eval(&self, s: C64) -> CMat;
}

type MapFn = dyn Fn(C64) -> CMat + Send + Sync;

/// Witness given by a closure.
#[derive(Clone)]
pub struct FiniteTypeWitness {
    dim_e: usize,
    dim_l: usize,
    f: Arc<MapFn>,
}

impl FiniteTypeWitness {
    pub fn new(dim_e: usize, dim_l: usize, f: impl Fn(C64) -> CMat + Send + Sync + 'static) -> Self {
        FiniteTypeWitness { dim_e, dim_l, f: Arc::new(f) }
    }

    /// `lambda_s = identity` (the whole space).
    pub fn identity(dim: usize) -> Self {
        FiniteTypeWitness::new(dim, dim, move |_| Mat::identity(dim, dim))
    }
}

impl Witness for FiniteTypeWitness {
    fn dim_e(&self) -> usize {
        self.dim_e
    }

    fn dim_l(&self) -> usize {
        self.dim_l
    }

    fn eval(&self, s: C64) -> CMat {
        (self.f)(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FredholmOptions {
    /// Singular values of `I - M(s0)` above `rank_tol * sigma_max` go into `F`.
    pub rank_tol: f64,
    /// Largest acceptable `cond(M(s0) + F)`.
    pub cond_cap: f64,
    /// Largest acceptable rank of `F`.
    pub rank_cap: usize,
}

impl Default for FredholmOptions {
    fn default() -> Self {
        FredholmOptions { rank_tol: 1e-10, cond_cap: 1e8, rank_cap: usize::MAX }
    }
}

/// Witness from `M(s) = X_s - F` with `X_s` invertible near `s0` and `F`
/// of finite rank: `Ker M(s) ⊂ X_s^{-1} Im F`.
pub struct FredholmWitness {
    mu: Arc<MapFn>,
    f: CMat,
    basis: CMat,
    /// `cond(X_{s0})`.
    pub cond_s0: f64,
    /// Singular values of `I - M(s0)`, descending.
    pub spectrum: Vec<f64>,
}

impl FredholmWitness {
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis of `Im F`.
    pub fn image_basis(&self) -> &CMat {
        &self.basis
    }

    /// `X_s = M(s) + F`.
    pub fn x_matrix(&self, s: C64) -> CMat {
        let mut x = (self.mu)(s);
        x += &self.f;
        x
    }
}

impl Witness for FredholmWitness {
    fn dim_e(&self) -> usize {
        self.f.nrows()
    }

    fn dim_l(&self) -> usize {
        self.basis.ncols()
    }

    fn eval(&self, s: C64) -> CMat {
        if self.basis.ncols() == 0 {
            return Mat::zeros(self.f.nrows(), 0);
        }
        solve(self.x_matrix(s).as_ref(), self.basis.as_ref())
    }
}

/// Build the Fredholm witness of a square family `s -> M(s)` at `s0`.
pub fn fredholm_witness(
    mu: impl Fn(C64) -> CMat + Send + Sync + 'static,
    s0: C64,
    opts: &FredholmOptions,
) -> Result<FredholmWitness, EngineError> {
    let mu: Arc<MapFn> = Arc::new(mu);
    let m0 = mu(s0);
    let n = m0.nrows();
    if m0.ncols() != n {
        return Err(EngineError::Dimension(format!("M(s0) is {}x{}, expected square", n, m0.ncols())));
    }
    let k0 = Mat::<C64>::identity(n, n) - &m0;
    let svd = k0.svd().map_err(|e| EngineError::NotFredholm(format!("svd failed: {e:?}")))?;
    let sv: Vec<f64> = (0..n).map(|i| svd.S()[i].re).collect();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let r = if smax > 0.0 { sv.iter().filter(|&&x| x > opts.rank_tol * smax).count() } else { 0 };
    if r > opts.rank_cap {
        return Err(EngineError::NotFredholm(format!("rank {r} exceeds cap {}", opts.rank_cap)));
    }
    // faer returns singular values in descending order
    let u = svd.U();
    let v = svd.V();
    let basis = Mat::from_fn(n, r, |i, j| u[(i, j)]);
    let f = Mat::from_fn(n, n, |i, j| (0..r).map(|t| u[(i, t)] * sv[t] * v[(j, t)].conj()).sum());
    let mut x0 = m0.clone();
    x0 += &f;
    let c = cond(x0.as_ref());
    if !(c <= opts.cond_cap) {
        return Err(EngineError::NotFredholm(format!("cond(X) = {c:e} exceeds cap {:e}", opts.cond_cap)));
    }
    Ok(FredholmWitness { mu, f, basis, cond_s0: c, spectrum: sv })
}

/// Operator on `B1 ⊕ C^m` of the block form `[[K1(s), K2(s)], [0, I_m]]`
/// together with the parametrisation `nu_s: C^m -> E` of the second block.
/// `B1` is identified with `E` itself.
pub trait SplitOperator: Send + Sync {
    fn dim_e(&self) -> usize;
    fn dim_b2(&self) -> usize;
    /// `(K1(s), K2(s))`, shapes `dim_e x dim_e` and `dim_e x dim_b2`.
    fn blocks(&self, s: C64) -> (CMat, CMat);
    /// `nu_s` as a `dim_e x dim_b2` matrix.
    fn nu(&self, s: C64) -> CMat;
}

fn assemble_tilde(op: &dyn SplitOperator, s: C64) -> CMat {
    let (n, m) = (op.dim_e(), op.dim_b2());
    let (k1, k2) = op.blocks(s);
    Mat::from_fn(n + m, n + m, |i, j| {
        let k = match (i < n, j < n) {
            (true, true) => k1[(i, j)],
            (true, false) => k2[(i, j - n)],
            (false, false) if i == j => C64::new(1.0, 0.0),
            _ => C64::new(0.0, 0.0),
        };
        let id = if i == j { 1.0 } else { 0.0 };
        C64::new(id, 0.0) - k
    })
}

/// Witness `(Id ⊕ nu_s) ∘ lambda~_s` where `lambda~` is the Fredholm witness
/// of the block operator.
pub struct SplitWitness<O: SplitOperator> {
    op: Arc<O>,
    inner: FredholmWitness,
}

impl<O: SplitOperator> SplitWitness<O> {
    pub fn inner(&self) -> &FredholmWitness {
        &self.inner
    }

    pub fn operator(&self) -> &O {
        &self.op
    }
}

impl<O: SplitOperator> Witness for SplitWitness<O> {
    fn dim_e(&self) -> usize {
        self.op.dim_e()
    }

    fn dim_l(&self) -> usize {
        self.inner.rank()
    }

    fn eval(&self, s: C64) -> CMat {
        let y = self.inner.eval(s);
        let (n, m) = (self.op.dim_e(), self.op.dim_b2());
        let mut out = Mat::from_fn(n, y.ncols(), |i, j| y[(i, j)]);
        if m > 0 {
            let nu = self.op.nu(s);
            let tail = Mat::from_fn(m, y.ncols(), |i, j| y[(n + i, j)]);
            out += &nu * &tail;
        }
        out
    }
}

pub fn fredholm_split_witness<O: SplitOperator + 'static>(
    op: Arc<O>,
    s0: C64,
    opts: &FredholmOptions,
) -> Result<SplitWitness<O>, EngineError> {
    let op2 = op.clone();
    let inner = fredholm_witness(move |s| assemble_tilde(op2.as_ref(), s), s0, opts)?;
    Ok(SplitWitness { op, inner })
}
