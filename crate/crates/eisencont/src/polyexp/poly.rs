use std::collections::BTreeMap;

use crate::C64;

/// Polynomial in `d` real variables with complex coefficients, monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    d: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Poly {
    pub fn zero(d: usize) -> Self {
        Poly { d, terms: BTreeMap::new() }
    }

    pub fn constant(d: usize, c: C64) -> Self {
        Poly::monomial(vec![0; d], c)
    }

    pub fn monomial(exps: Vec<u32>, c: C64) -> Self {
        let mut p = Poly::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C64)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: C64) {
        assert_eq!(exps.len(), self.d);
        let e = self.terms.entry(exps).or_insert(C64::new(0.0, 0.0));
        *e += c;
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().filter(|(_, c)| c.norm() > 0.0).map(|(e, _)| e.iter().sum()).max()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop coefficients with modulus `<= tol`.
    pub fn pruned(&self, tol: f64) -> Poly {
        Poly { d: self.d, terms: self.terms.iter().filter(|(_, c)| c.norm() > tol).map(|(e, c)| (e.clone(), *c)).collect() }
    }

    pub fn eval(&self, v: &[f64]) -> C64 {
        self.terms.iter().map(|(e, c)| c * e.iter().zip(v).map(|(&k, x)| x.powi(k as i32)).product::<f64>()).sum()
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly { d: self.d, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.d);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.iter().zip(eb).map(|(a, b)| a + b).collect(), ca * cb);
            }
        }
        out
    }

    /// `u -> p(u + v)`.
    pub fn shift(&self, v: &[f64]) -> Poly {
        let mut out = Poly::zero(self.d);
        for (e, c) in &self.terms {
            // expand prod_k (u_k + v_k)^{e_k}
            let mut partial: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), 1.0)];
            for (k, &ek) in e.iter().enumerate() {
                let mut next = Vec::new();
                for (pe, pc) in &partial {
                    for j in 0..=ek {
                        let mut ne = pe.clone();
                        ne.push(j);
                        next.push((ne, pc * binom(ek, j) * v[k].powi((ek - j) as i32)));
                    }
                }
                partial = next;
            }
            for (ne, f) in partial {
                out.add_term(ne, c * f);
            }
        }
        out
    }

    /// Product of univariate polynomials placed on consecutive variable blocks.
    pub fn tensor(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.d + other.d);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.iter().chain(eb).copied().collect(), ca * cb);
            }
        }
        out
    }
}
