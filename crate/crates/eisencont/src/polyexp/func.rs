use rand::Rng;

use super::{close, ExpTuple, Poly, PolyExpError};
use crate::C64;

fn pairing(mu: &[C64], v: &[f64]) -> C64 {
    mu.iter().zip(v).map(|(m, x)| m * x).sum()
}

/// `f(v) = sum_mu e^{<mu, v>} p_mu(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyExpFn {
    d: usize,
    terms: Vec<(Vec<C64>, Poly)>,
}

impl PolyExpFn {
    pub fn zero(d: usize) -> Self {
        PolyExpFn { d, terms: Vec::new() }
    }

    /// Build from terms, merging exponents within the confluence tolerance.
    pub fn new(d: usize, terms: Vec<(Vec<C64>, Poly)>) -> Result<Self, PolyExpError> {
        let mut f = PolyExpFn::zero(d);
        for (mu, p) in terms {
            if mu.len() != d || p.dim() != d {
                return Err(PolyExpError::Dimension { expected: d, got: mu.len().max(p.dim()) });
            }
            f.push(mu, p);
        }
        Ok(f)
    }

    /// Build a member of the space of `tuple`, rejecting terms whose degree is too high.
    pub fn in_space(tuple: &ExpTuple, terms: Vec<(Vec<C64>, Poly)>) -> Result<Self, PolyExpError> {
        let f = PolyExpFn::new(tuple.dim(), terms)?;
        for (mu, p) in &f.terms {
            if let Some(deg) = p.degree() {
                if deg as usize >= tuple.multiplicity(mu) {
                    return Err(PolyExpError::DegreeCap(mu.clone()));
                }
            }
        }
        Ok(f)
    }

    /// `e^{<mu, v>}`.
    pub fn exp(mu: Vec<C64>) -> Self {
        let d = mu.len();
        PolyExpFn { d, terms: vec![(mu, Poly::constant(d, C64::new(1.0, 0.0)))] }
    }

    /// A random member of the space of `tuple`: for each distinct exponent of
    /// multiplicity `m`, a polynomial of total degree `< m` with
    /// coefficients uniform in the unit square.
    pub fn random_member<R: Rng>(tuple: &ExpTuple, rng: &mut R) -> Self {
        let d = tuple.dim();
        let mut f = PolyExpFn::zero(d);
        for (mu, m) in tuple.multiplicities() {
            let mut p = Poly::zero(d);
            for exps in monomials(d, m as u32 - 1) {
                p.add_term(exps, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
            f.push(mu, p);
        }
        f
    }

    fn push(&mut self, mu: Vec<C64>, p: Poly) {
        match self.terms.iter_mut().find(|(m, _)| close(m, &mu)) {
            Some((_, q)) => *q = q.add(&p),
            None => self.terms.push((mu, p)),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[(Vec<C64>, Poly)] {
        &self.terms
    }

    pub fn eval(&self, v: &[f64]) -> C64 {
        self.terms.iter().map(|(mu, p)| pairing(mu, v).exp() * p.eval(v)).sum()
    }

    pub fn add(&self, other: &PolyExpFn) -> PolyExpFn {
        let mut out = self.clone();
        for (mu, p) in &other.terms {
            out.push(mu.clone(), p.clone());
        }
        out
    }

    pub fn scale(&self, s: C64) -> PolyExpFn {
        PolyExpFn { d: self.d, terms: self.terms.iter().map(|(m, p)| (m.clone(), p.scale(s))).collect() }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.iter().map(|(_, p)| p.max_abs()).fold(0.0, f64::max)
    }

    /// Drop coefficients below `tol` and empty terms.
    pub fn pruned(&self, tol: f64) -> PolyExpFn {
        let terms = self
            .terms
            .iter()
            .map(|(m, p)| (m.clone(), p.pruned(tol)))
            .filter(|(_, p)| p.degree().is_some())
            .collect();
        PolyExpFn { d: self.d, terms }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// Every exponent occurs in `tuple` with multiplicity above the degree of its polynomial.
    pub fn is_member(&self, tuple: &ExpTuple) -> bool {
        self.d == tuple.dim()
            && self.terms.iter().all(|(mu, p)| match p.degree() {
                None => true,
                Some(deg) => (deg as usize) < tuple.multiplicity(mu),
            })
    }
}

/// All exponent vectors in `d` variables with total degree `<= max_deg`.
fn monomials(d: usize, max_deg: u32) -> Vec<Vec<u32>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for k in 0..=max_deg {
        for mut rest in monomials(d - 1, max_deg - k) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

/// Difference operator `D_v^lambda f(u) = f(u + v) - e^{<lambda, v>} f(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOp {
    pub v: Vec<f64>,
    pub lambda: Vec<C64>,
}

impl DiffOp {
    pub fn new(v: Vec<f64>, lambda: Vec<C64>) -> Self {
        assert_eq!(v.len(), lambda.len());
        DiffOp { v, lambda }
    }

    /// Exact action on a polynomial-exponential function.
    pub fn apply(&self, f: &PolyExpFn) -> PolyExpFn {
        assert_eq!(f.d, self.v.len());
        let mult = pairing(&self.lambda, &self.v).exp();
        let terms = f
            .terms
            .iter()
            .map(|(mu, p)| {
                let shifted = p.shift(&self.v).scale(pairing(mu, &self.v).exp());
                (mu.clone(), shifted.add(&p.scale(-mult)))
            })
            .collect();
        PolyExpFn { d: f.d, terms }
    }

    /// Pointwise action on an arbitrary function.
    pub fn apply_at(&self, f: &dyn Fn(&[f64]) -> C64, u: &[f64]) -> C64 {
        let shifted: Vec<f64> = u.iter().zip(&self.v).map(|(a, b)| a + b).collect();
        f(&shifted) - pairing(&self.lambda, &self.v).exp() * f(u)
    }
}

pub fn diff_op(f: &PolyExpFn, v: &[f64], lambda: &[C64]) -> PolyExpFn {
    DiffOp::new(v.to_vec(), lambda.to_vec()).apply(f)
}
