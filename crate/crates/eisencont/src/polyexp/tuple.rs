use serde::{Deserialize, Serialize};

use super::{close, PolyExpError};
use crate::C64;

/// Tuple of exponents `lambda_1, .., lambda_n` in the complexified dual of `R^d`.
///
/// Only the multiset matters, so the list is kept sorted lexicographically
/// by (re, im) of each coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpTuple {
    d: usize,
    exps: Vec<Vec<C64>>,
}

fn lex(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o.is_ne() {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

impl ExpTuple {
    pub fn new(d: usize, mut exps: Vec<Vec<C64>>) -> Result<Self, PolyExpError> {
        if let Some(e) = exps.iter().find(|e| e.len() != d) {
            return Err(PolyExpError::Dimension { expected: d, got: e.len() });
        }
        exps.sort_by(|a, b| lex(a, b));
        Ok(ExpTuple { d, exps })
    }

    /// One-dimensional tuple from scalars.
    pub fn scalar(lams: &[C64]) -> Self {
        ExpTuple::new(1, lams.iter().map(|&l| vec![l]).collect()).unwrap()
    }

    pub fn empty(d: usize) -> Self {
        ExpTuple { d, exps: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<C64>] {
        &self.exps
    }

    /// Distinct exponents (merged within the confluence tolerance) with multiplicities.
    pub fn multiplicities(&self) -> Vec<(Vec<C64>, usize)> {
        let mut out: Vec<(Vec<C64>, usize)> = Vec::new();
        for e in &self.exps {
            match out.iter_mut().find(|(m, _)| close(m, e)) {
                Some((_, k)) => *k += 1,
                None => out.push((e.clone(), 1)),
            }
        }
        out
    }

    /// Multiplicity of `mu` in the tuple.
    pub fn multiplicity(&self, mu: &[C64]) -> usize {
        self.exps.iter().filter(|e| close(e, mu)).count()
    }

    /// Coordinates `range` of every exponent (the restriction to a factor of `V`).
    pub fn project(&self, range: std::ops::Range<usize>) -> ExpTuple {
        ExpTuple::new(range.len(), self.exps.iter().map(|e| e[range.clone()].to_vec()).collect()).unwrap()
    }

    pub fn max_abs(&self) -> f64 {
        self.exps.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Concatenation `a ∨ b`.
pub fn concat(a: &ExpTuple, b: &ExpTuple) -> Result<ExpTuple, PolyExpError> {
    if a.d != b.d {
        return Err(PolyExpError::Dimension { expected: a.d, got: b.d });
    }
    ExpTuple::new(a.d, a.exps.iter().chain(&b.exps).cloned().collect())
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of the space: sum over distinct exponents of the number of
/// monomials in `d` variables of degree below the multiplicity.
pub fn dim_space(t: &ExpTuple) -> usize {
    t.multiplicities().iter().map(|(_, m)| binom(m - 1 + t.d, t.d)).sum()
}
