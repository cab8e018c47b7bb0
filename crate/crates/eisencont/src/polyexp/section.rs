use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;

use super::{ExpTuple, Poly, PolyExpError, PolyExpFn, CONFLUENCE_TOL};
use crate::linalg::{log_det, CMat};
use crate::C64;

/// First column of `exp(y J)`, `J` lower bidiagonal with `lams` on the
/// diagonal and ones below it. Entry `j` is the divided difference of
/// `lambda -> e^{lambda y}` over `lams[0..=j]`: entire in the exponents and
/// well defined through confluence.
fn newton_basis(lams: &[C64], y: f64) -> Vec<C64> {
    let n = lams.len();
    let a = Mat::from_fn(n, n, |i, j| {
        if i == j {
            lams[i] * y
        } else if i == j + 1 {
            C64::new(y, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let norm = (0..n).map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(squarings);
    let b = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);
    let mut e = Mat::<C64>::identity(n, n);
    let mut term = Mat::<C64>::identity(n, n);
    for k in 1..30 {
        let next = &term * &b;
        term = Mat::from_fn(n, n, |i, j| next[(i, j)] / k as f64);
        e += &term;
    }
    for _ in 0..squarings {
        e = &e * &e;
    }
    (0..n).map(|i| e[(i, 0)]).collect()
}

/// Groups `lams` into distinct values (first occurrence kept) with multiplicities.
fn groups(lams: &[C64]) -> Vec<(C64, usize)> {
    let mut out: Vec<(C64, usize)> = Vec::new();
    for &l in lams {
        match out.iter_mut().find(|(m, _)| (*m - l).norm() <= CONFLUENCE_TOL) {
            Some((_, k)) => *k += 1,
            None => out.push((l, 1)),
        }
    }
    out
}

/// Taylor coefficients (up to `order`) of `prod_b (mu + h - mu_b)^{-m_b}` at `h = 0`.
fn inverse_product_series(mu: C64, others: &[(C64, usize)], order: usize) -> Vec<C64> {
    let mut acc = vec![C64::new(0.0, 0.0); order + 1];
    acc[0] = C64::new(1.0, 0.0);
    for &(mb, m) in others {
        let delta = mu - mb;
        // (delta + h)^{-m} = delta^{-m} sum_t binom(-m, t) (h / delta)^t
        let mut series = vec![C64::new(0.0, 0.0); order + 1];
        let mut coef = delta.powi(-(m as i32));
        for (t, s) in series.iter_mut().enumerate() {
            *s = coef;
            coef *= -((m + t) as f64) / ((t + 1) as f64) / delta;
        }
        let mut next = vec![C64::new(0.0, 0.0); order + 1];
        for i in 0..=order {
            for j in 0..=order - i {
                next[i + j] += acc[i] * series[j];
            }
        }
        acc = next;
    }
    acc
}

/// The divided difference over `lams` written as `sum_mu e^{mu x} p_mu(x)`.
fn newton_terms(lams: &[C64]) -> Vec<(C64, Poly)> {
    let gs = groups(lams);
    gs.iter()
        .enumerate()
        .map(|(a, &(mu, m))| {
            let others: Vec<(C64, usize)> = gs.iter().enumerate().filter(|&(b, _)| b != a).map(|(_, g)| *g).collect();
            let g = inverse_product_series(mu, &others, m - 1);
            let mut p = Poly::zero(1);
            let mut fact = 1.0;
            for k in 0..m {
                if k > 0 {
                    fact *= k as f64;
                }
                p.add_term(vec![k as u32], g[m - 1 - k] / fact);
            }
            (mu, p)
        })
        .collect()
}

/// Interpolation section for a one-dimensional tuple on the nodes `k / R`.
#[derive(Clone, Debug)]
pub struct Section1d {
    lams: Vec<C64>,
    nodes: Vec<f64>,
    /// Newton-basis coefficients = `matrix * node values`.
    matrix: CMat,
}

impl Section1d {
    pub fn exponents(&self) -> &[C64] {
        &self.lams
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Weights `w_k(x)` with `section(values)(x) = sum_k w_k(x) values_k`.
    pub fn eval_row(&self, x: f64) -> Vec<C64> {
        let phi = newton_basis(&self.lams, x);
        let n = self.lams.len();
        (0..n).map(|k| (0..n).map(|j| phi[j] * self.matrix[(j, k)]).sum()).collect()
    }

    fn basis_terms(&self) -> Vec<Vec<(C64, Poly)>> {
        (1..=self.lams.len()).map(|j| newton_terms(&self.lams[..j])).collect()
    }
}

/// `section_1d` applied along each coordinate axis (tensor product).
#[derive(Clone, Debug)]
pub struct Section {
    axes: Vec<Section1d>,
}

/// Section of the restriction map to `Y = {k / R : k = 1..n}` for a
/// one-dimensional tuple.
pub fn section_1d(tuple: &ExpTuple, r: f64) -> Result<Section, PolyExpError> {
    if tuple.dim() != 1 {
        return Err(PolyExpError::Dimension { expected: 1, got: tuple.dim() });
    }
    if r <= tuple.max_abs() {
        return Err(PolyExpError::NodeScale { r, max: tuple.max_abs() });
    }
    let lams: Vec<C64> = tuple.exponents().iter().map(|e| e[0]).collect();
    let n = lams.len();
    let nodes: Vec<f64> = (1..=n).map(|k| k as f64 / r).collect();
    let rows: Vec<Vec<C64>> = nodes.iter().map(|&y| newton_basis(&lams, y)).collect();
    let v = Mat::from_fn(n, n, |k, j| rows[k][j]);
    let ld = log_det(v.as_ref());
    let col_norms: f64 = (0..n).map(|j| (0..n).map(|k| v[(k, j)].norm_sqr()).sum::<f64>().sqrt().ln()).sum();
    let normalised = (ld.log_abs - col_norms).exp();
    if !(normalised > 1e-13) {
        return Err(PolyExpError::IllConditioned(normalised));
    }
    let matrix = v.partial_piv_lu().inverse();
    Ok(Section { axes: vec![Section1d { lams, nodes, matrix }] })
}

/// Tensor-product section for `V = V_1 ⊕ V_2`; the tuple must project onto
/// the tuples of `a` and `b`.
pub fn section_product(tuple: &ExpTuple, a: &Section, b: &Section) -> Result<Section, PolyExpError> {
    let (da, db) = (a.dim(), b.dim());
    if tuple.dim() != da + db {
        return Err(PolyExpError::Dimension { expected: da + db, got: tuple.dim() });
    }
    let axes: Vec<Section1d> = a.axes.iter().chain(&b.axes).cloned().collect();
    for (k, ax) in axes.iter().enumerate() {
        let proj = tuple.project(k..k + 1);
        let mine = ExpTuple::scalar(&ax.lams);
        if proj.len() != mine.len() || proj.exponents().iter().zip(mine.exponents()).any(|(x, y)| (x[0] - y[0]).norm() > CONFLUENCE_TOL) {
            return Err(PolyExpError::SplitMismatch);
        }
    }
    Ok(Section { axes })
}

impl Section {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Section1d] {
        &self.axes
    }

    /// Tensor node set, first axis slowest.
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        let mut pts = vec![Vec::new()];
        for ax in &self.axes {
            pts = pts.into_iter().flat_map(|p| ax.nodes.iter().map(move |&y| [p.clone(), vec![y]].concat())).collect();
        }
        pts
    }

    pub fn restrict(&self, f: &PolyExpFn) -> Vec<C64> {
        self.nodes().iter().map(|p| f.eval(p)).collect()
    }

    fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.lams.len()).collect()
    }

    /// Weights `w_k(x)` with `section(values)(x) = sum_k w_k(x) values_k`.
    pub fn eval_row(&self, x: &[f64]) -> Vec<C64> {
        let mut row = vec![C64::new(1.0, 0.0)];
        for (ax, &xi) in self.axes.iter().zip(x) {
            let r = ax.eval_row(xi);
            row = row.iter().flat_map(|&a| r.iter().map(move |&b| a * b)).collect();
        }
        row
    }

    /// Evaluate the reconstructed function directly (no symbolic expansion).
    pub fn eval(&self, values: &[C64], x: &[f64]) -> C64 {
        self.eval_row(x).iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Newton-basis coefficients (Kronecker product of the axis matrices applied to `values`).
    pub fn coefficients(&self, values: &[C64]) -> Vec<C64> {
        let shape = self.shape();
        let total: usize = shape.iter().product();
        assert_eq!(values.len(), total);
        let mut cur = values.to_vec();
        for (a, ax) in self.axes.iter().enumerate() {
            let n = shape[a];
            let inner: usize = shape[a + 1..].iter().product();
            let outer = total / (n * inner);
            let mut next = vec![C64::new(0.0, 0.0); total];
            for o in 0..outer {
                for i in 0..inner {
                    for j in 0..n {
                        let mut acc = C64::new(0.0, 0.0);
                        for k in 0..n {
                            acc += ax.matrix[(j, k)] * cur[(o * n + k) * inner + i];
                        }
                        next[(o * n + j) * inner + i] = acc;
                    }
                }
            }
            cur = next;
        }
        cur
    }

    /// The reconstruction as a symbolic polynomial-exponential function.
    ///
    /// It always agrees with the input on the node set and reproduces every
    /// member of the tuple's space, though its symbolic form may lie in the
    /// larger tensor-product space.
    pub fn apply(&self, values: &[C64]) -> PolyExpFn {
        let coef = self.coefficients(values);
        let bases: Vec<Vec<Vec<(C64, Poly)>>> = self.axes.iter().map(|a| a.basis_terms()).collect();
        let shape = self.shape();
        let mut terms = Vec::new();
        for (flat, &c) in coef.iter().enumerate() {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            // multi-index of `flat`
            let mut idx = vec![0; shape.len()];
            let mut rem = flat;
            for a in (0..shape.len()).rev() {
                idx[a] = rem % shape[a];
                rem /= shape[a];
            }
            let mut partial: Vec<(Vec<C64>, Poly)> = vec![(Vec::new(), Poly::constant(0, c))];
            for (a, &j) in idx.iter().enumerate() {
                partial = partial
                    .iter()
                    .flat_map(|(mu, p)| {
                        bases[a][j].iter().map(move |(m, q)| ([mu.clone(), vec![*m]].concat(), p.tensor(q)))
                    })
                    .collect();
            }
            terms.extend(partial);
        }
        PolyExpFn::new(self.dim(), terms).expect("consistent dimensions")
    }
}
