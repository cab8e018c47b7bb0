//! Exact mode: families whose coefficients are polynomials in `s` over `Q`,
//! solved identically over `Q(s)` by fraction-free elimination.

mod poly;
mod ratfunc;

pub use poly::QPoly;
pub use ratfunc::RatFunc;

use std::mem;

use faer::Mat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::AnalyticLinearFamily;
use crate::C64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("the family has no solution over Q(s)")]
    Inconsistent,
    #[error("the family has rank {rank} < {dim} over Q(s)")]
    Underdetermined { rank: usize, dim: usize },
    #[error("malformed family: {0}")]
    Shape(String),
    #[error("solution failed exact verification at s = {0}")]
    Verification(String),
}

/// Matrix and right-hand side with entries in `Q[s]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFamily {
    dim: usize,
    rows: Vec<Vec<QPoly>>,
    rhs: Vec<QPoly>,
}

impl RationalFamily {
    pub fn new(rows: Vec<Vec<QPoly>>, rhs: Vec<QPoly>) -> Result<Self, ExactError> {
        let dim = rows.first().map_or(0, |r| r.len());
        if rows.len() != rhs.len() {
            return Err(ExactError::Shape(format!("{} rows but {} right-hand sides", rows.len(), rhs.len())));
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(ExactError::Shape("ragged rows".to_string()));
        }
        Ok(RationalFamily { dim, rows, rhs })
    }

    /// Entries given as integer coefficient lists, lowest degree first.
    pub fn from_ints(rows: &[Vec<Vec<i64>>], rhs: &[Vec<i64>]) -> Result<Self, ExactError> {
        RationalFamily::new(
            rows.iter().map(|r| r.iter().map(|c| QPoly::from_ints(c)).collect()).collect(),
            rhs.iter().map(|c| QPoly::from_ints(c)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_equations(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<QPoly>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[QPoly] {
        &self.rhs
    }

    /// Floating-point evaluation as an analytic family.
    pub fn to_analytic(&self) -> AnalyticLinearFamily {
        let me = self.clone();
        AnalyticLinearFamily::new(self.dim, self.rows.len(), move |s| {
            let m = Mat::from_fn(me.rows.len(), me.dim, |i, j| me.rows[i][j].eval_c64(s));
            (m, me.rhs.iter().map(|p| p.eval_c64(s)).collect())
        })
    }

    /// True iff `A(s) v = b(s)` holds exactly at the rational point `s`.
    fn check_at(&self, s: &BigRational, v: &[BigRational]) -> bool {
        self.rows.iter().zip(&self.rhs).all(|(row, b)| {
            let lhs = row.iter().zip(v).fold(BigRational::zero(), |acc, (p, x)| acc + p.eval(s) * x);
            lhs == b.eval(s)
        })
    }
}

/// The unique solution over `Q(s)` with a common denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub components: Vec<RatFunc>,
    /// Monic least common denominator.
    pub denominator: QPoly,
    /// `components[i] = numerators[i] / denominator`.
    pub numerators: Vec<QPoly>,
    /// Square-free factorisation of the denominator.
    pub pole_factors: Vec<(QPoly, u32)>,
}

/// Coefficient lists in exact decimal-fraction form, lowest degree first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactDump {
    pub schema: String,
    pub numerators: Vec<Vec<String>>,
    pub denominator: Vec<String>,
    pub pole_factors: Vec<(Vec<String>, u32)>,
    pub poles: Vec<C64>,
}

impl ExactSolution {
    pub fn eval(&self, s: C64) -> Vec<C64> {
        let d = self.denominator.eval_c64(s);
        self.numerators.iter().map(|n| n.eval_c64(s) / d).collect()
    }

    /// Numerical roots of the denominator (each listed once).
    pub fn poles(&self) -> Vec<C64> {
        self.pole_factors.iter().flat_map(|(f, _)| f.roots()).collect()
    }

    pub fn dump(&self) -> ExactDump {
        ExactDump {
            schema: "eisencont.exact.v1".to_string(),
            numerators: self.numerators.iter().map(|n| n.coeff_strings()).collect(),
            denominator: self.denominator.coeff_strings(),
            pole_factors: self.pole_factors.iter().map(|(f, m)| (f.coeff_strings(), *m)).collect(),
            poles: self.poles(),
        }
    }
}

/// Fraction-free (Bareiss) elimination of `[A | b]` over `Q[s]`, then back
/// substitution over `Q(s)`. The result is checked exactly at rational
/// sample points where the denominator does not vanish.
pub fn solve_rational_family(fam: &RationalFamily) -> Result<ExactSolution, ExactError> {
    let (n, dim) = (fam.rows.len(), fam.dim);
    let mut m: Vec<Vec<QPoly>> =
        fam.rows.iter().zip(&fam.rhs).map(|(r, b)| r.iter().cloned().chain([b.clone()]).collect()).collect();
    let mut prev = QPoly::one();
    let mut rank = 0;
    for col in 0..dim {
        // pivot of least degree among the remaining rows
        let piv = (rank..n).filter(|&r| !m[r][col].is_zero()).min_by_key(|&r| m[r][col].degree());
        let Some(p) = piv else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..n {
            for j in col + 1..=dim {
                let t = &(&m[rank][col] * &m[i][j]) - &(&m[i][col] * &m[rank][j]);
                m[i][j] = t.exact_div(&prev);
            }
            m[i][col] = QPoly::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    if rank < dim {
        return Err(ExactError::Underdetermined { rank, dim });
    }
    if (dim..n).any(|i| !m[i][dim].is_zero()) {
        return Err(ExactError::Inconsistent);
    }
    let mut x: Vec<RatFunc> = vec![RatFunc::zero(); dim];
    for i in (0..dim).rev() {
        let mut acc = RatFunc::from_poly(mem::replace(&mut m[i][dim], QPoly::zero()));
        for j in i + 1..dim {
            acc = &acc - &(&RatFunc::from_poly(m[i][j].clone()) * &x[j]);
        }
        x[i] = &acc / &RatFunc::from_poly(m[i][i].clone());
    }
    let denominator = x.iter().fold(QPoly::one(), |acc, r| acc.lcm(r.den()));
    let numerators: Vec<QPoly> = x.iter().map(|r| r.num() * &denominator.exact_div(r.den())).collect();
    let pole_factors = denominator.square_free();
    let sol = ExactSolution { components: x, denominator, numerators, pole_factors };

    // exact verification at a few rational points off the pole set
    let mut checked = 0;
    for k in 0..64i64 {
        if checked == 3 {
            break;
        }
        let s = BigRational::new(BigInt::from(k * 7 - 31), BigInt::from(5 + k % 3));
        if sol.denominator.eval(&s).is_zero() {
            continue;
        }
        let v: Vec<BigRational> = sol.components.iter().map(|r| r.eval(&s).expect("denominator checked")).collect();
        if !fam.check_at(&s, &v) {
            return Err(ExactError::Verification(s.to_string()));
        }
        checked += 1;
    }
    Ok(sol)
}

/// Rational approximation of a float, for building sample points.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}
