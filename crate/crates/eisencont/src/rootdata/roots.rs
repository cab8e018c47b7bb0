use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::Composition;

/// Element of the sum-zero subspace of `Q^n`, paired by the standard dot product.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootVector {
    pub coords: Vec<Rational64>,
}

impl RootVector {
    /// `e_i - e_j` in dimension `n`.
    pub fn e_diff(n: usize, i: usize, j: usize) -> Self {
        let mut coords = vec![Rational64::zero(); n];
        coords[i] += Rational64::one();
        coords[j] -= Rational64::one();
        RootVector { coords }
    }

    pub fn pairing(&self, other: &RootVector) -> Rational64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn is_sum_zero(&self) -> bool {
        self.coords.iter().sum::<Rational64>().is_zero()
    }

    /// Orthogonal projection onto vectors constant on the blocks of `p`
    /// (block averaging), i.e. onto `a_P^*`.
    pub fn project(&self, p: &Composition) -> RootVector {
        let mut coords = self.coords.clone();
        for b in p.blocks() {
            let len = Rational64::from_integer(b.len() as i64);
            let mean = self.coords[b.clone()].iter().sum::<Rational64>() / len;
            coords[b].iter_mut().for_each(|c| *c = mean);
        }
        RootVector { coords }
    }

    /// Coefficients over the simple roots `e_j - e_{j+1}` (partial sums of the coordinates).
    pub fn simple_expansion(&self) -> Vec<Rational64> {
        let mut acc = Rational64::zero();
        self.coords[..self.coords.len().saturating_sub(1)]
            .iter()
            .map(|c| {
                acc += c;
                acc
            })
            .collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|c| *c.numer() as f64 / *c.denom() as f64).collect()
    }
}

/// `Delta_0^P`: the simple roots inside the Levi of `p`.
pub fn simple_roots(p: &Composition) -> Vec<RootVector> {
    p.inner_edges().into_iter().map(|i| RootVector::e_diff(p.n(), i, i + 1)).collect()
}

/// One element of `Delta_P` with its data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaPElement {
    /// Index `i` of the simple root `e_i - e_{i+1}` being projected.
    pub simple_index: usize,
    pub root: RootVector,
    pub coroot: RootVector,
    /// Coefficients over `Delta_0`.
    pub expansion: Vec<Rational64>,
    /// `<alpha, alpha^vee>`.
    pub self_pairing: Rational64,
}

/// `Delta_P`: projections of `Delta_0 \ Delta_0^P` to `a_P^*`.
///
/// In type A the projected coroot is the same vector as the projected root
/// (self-dual, standard pairing). Panics if the non-negativity or positivity
/// assertions ever fail, which would be a bug.
pub fn delta_p(p: &Composition) -> Vec<DeltaPElement> {
    p.boundary_edges()
        .into_iter()
        .map(|i| {
            let root = RootVector::e_diff(p.n(), i, i + 1).project(p);
            let coroot = root.clone();
            let expansion = root.simple_expansion();
            let self_pairing = root.pairing(&coroot);
            assert!(expansion.iter().all(|c| *c >= Rational64::zero()), "negative coefficient in {expansion:?}");
            assert!(self_pairing > Rational64::zero());
            DeltaPElement { simple_index: i, root, coroot, expansion, self_pairing }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn projection_of_e2_minus_e3() {
        let p = Composition::parse("2,1").unwrap();
        let d = delta_p(&p);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].root.coords, vec![r(1, 2), r(1, 2), r(-1, 1)]);
        assert_eq!(d[0].expansion, vec![r(1, 2), r(1, 1)]);
        assert_eq!(d[0].self_pairing, r(3, 2));
    }

    #[test]
    fn projection_is_idempotent_and_sum_zero() {
        let p = Composition::parse("1,3,2").unwrap();
        for a in delta_p(&p) {
            assert!(a.root.is_sum_zero());
            assert_eq!(a.root.project(&p), a.root);
        }
    }
}
