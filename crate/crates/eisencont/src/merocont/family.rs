use std::ops::Range;
use std::sync::Arc;

use crate::linalg::CMat;
use crate::C64;

/// A family of linear systems `Xi(s)`: rows `mu_i(s)` over a coordinate space
/// of dimension `dim`, right-hand sides `c_i(s)`.
///
/// Evaluators must be pure in `s` and callable from several threads.
pub trait LinearFamily: Send + Sync {
    fn dim(&self) -> usize;
    fn n_equations(&self) -> usize;
    /// Equation matrix (`n_equations x dim`) and right-hand side at `s`.
    fn eval(&self, s: C64) -> (CMat, Vec<C64>);
    /// Named row ranges for residual reports.
    fn blocks(&self) -> Vec<(String, Range<usize>)> {
        vec![("all".to_string(), 0..self.n_equations())]
    }
}

type FamilyFn = dyn Fn(C64) -> (CMat, Vec<C64>) + Send + Sync;

/// Family given by a closure.
#[derive(Clone)]
pub struct AnalyticLinearFamily {
    dim: usize,
    n_eq: usize,
    f: Arc<FamilyFn>,
}

impl AnalyticLinearFamily {
    pub fn new(dim: usize, n_eq: usize, f: impl Fn(C64) -> (CMat, Vec<C64>) + Send + Sync + 'static) -> Self {
        AnalyticLinearFamily { dim, n_eq, f: Arc::new(f) }
    }
}

impl LinearFamily for AnalyticLinearFamily {
    fn dim(&self) -> usize {
        self.dim
    }

    fn n_equations(&self) -> usize {
        self.n_eq
    }

    fn eval(&self, s: C64) -> (CMat, Vec<C64>) {
        let (m, b) = (self.f)(s);
        debug_assert_eq!((m.nrows(), m.ncols(), b.len()), (self.n_eq, self.dim, self.n_eq));
        (m, b)
    }
}
