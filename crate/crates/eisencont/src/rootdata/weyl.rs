use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Composition, RootDataError, RootVector};

/// Permutation of `{0, .., n-1}`; `w(i) = perm[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeylElem {
    pub perm: Vec<usize>,
}

impl WeylElem {
    pub fn new(perm: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return None;
            }
        }
        Some(WeylElem { perm })
    }

    pub fn identity(n: usize) -> Self {
        WeylElem { perm: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `self * other`, i.e. `i -> self(other(i))`.
    pub fn compose(&self, other: &WeylElem) -> WeylElem {
        WeylElem { perm: other.perm.iter().map(|&i| self.perm[i]).collect() }
    }

    pub fn inverse(&self) -> WeylElem {
        let mut inv = vec![0; self.n()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        WeylElem { perm: inv }
    }

    /// Coxeter length = number of inversions.
    pub fn length(&self) -> usize {
        let p = &self.perm;
        (0..p.len()).map(|i| (i + 1..p.len()).filter(|&j| p[i] > p[j]).count()).sum()
    }

    /// `w e_i = e_{w(i)}` extended linearly.
    pub fn act(&self, v: &RootVector) -> RootVector {
        let mut coords = v.coords.clone();
        for (i, &p) in self.perm.iter().enumerate() {
            coords[p] = v.coords[i];
        }
        RootVector { coords }
    }

    pub fn act_f64(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            out[p] = v[i];
        }
        out
    }

    /// `w (e_i - e_{i+1}) > 0`.
    fn keeps_positive(&self, i: usize) -> bool {
        self.perm[i] < self.perm[i + 1]
    }

    /// All of `S_n` in lexicographic order.
    pub fn all(n: usize) -> Vec<WeylElem> {
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            out.push(WeylElem { perm: perm.clone() });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else { break };
            let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
            perm.swap(i - 1, j);
            perm[i..].reverse();
        }
        out
    }
}

impl fmt::Display for WeylElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.perm.iter().map(|p| (p + 1).to_string()).collect();
        write!(f, "[{}]", s.join(" "))
    }
}

fn check_sizes(p: &Composition, q: &Composition) -> Result<usize, RootDataError> {
    if p.n() != q.n() {
        return Err(RootDataError::SizeMismatch(p.n(), q.n()));
    }
    Ok(p.n())
}

fn is_rep(w: &WeylElem, p: &Composition, q: &Composition) -> bool {
    let winv = w.inverse();
    p.inner_edges().iter().all(|&i| w.keeps_positive(i)) && q.inner_edges().iter().all(|&i| winv.keeps_positive(i))
}

/// `_Q Omega_P`: `w` with `w alpha > 0` on `Delta_0^P` and `w^{-1} alpha > 0` on `Delta_0^Q`.
pub fn double_coset_reps(p: &Composition, q: &Composition) -> Result<Vec<WeylElem>, RootDataError> {
    let n = check_sizes(p, q)?;
    Ok(WeylElem::all(n).into_iter().filter(|w| is_rep(w, p, q)).collect())
}

/// `W_Q \ S_n / W_P` by orbit search over adjacent-transposition generators.
pub fn double_cosets_brute_force(p: &Composition, q: &Composition) -> Result<Vec<Vec<WeylElem>>, RootDataError> {
    let n = check_sizes(p, q)?;
    let gen = |i: usize| {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(i, i + 1);
        WeylElem { perm }
    };
    let left: Vec<WeylElem> = q.inner_edges().into_iter().map(gen).collect();
    let right: Vec<WeylElem> = p.inner_edges().into_iter().map(gen).collect();
    let mut unseen: BTreeSet<WeylElem> = WeylElem::all(n).into_iter().collect();
    let mut orbits = Vec::new();
    while let Some(start) = unseen.pop_first() {
        let mut orbit = vec![start.clone()];
        let mut queue = VecDeque::from([start]);
        while let Some(w) = queue.pop_front() {
            let nbrs = left.iter().map(|g| g.compose(&w)).chain(right.iter().map(|g| w.compose(g)));
            for v in nbrs {
                if unseen.remove(&v) {
                    orbit.push(v.clone());
                    queue.push_back(v);
                }
            }
        }
        orbit.sort();
        orbits.push(orbit);
    }
    Ok(orbits)
}

/// Composition whose blocks are the classes of `i ~ j` iff same block of `a`
/// and `sigma(i), sigma(j)` in the same block of `b`.
fn intersect(a: &Composition, sigma: &WeylElem, b: &Composition) -> Option<Composition> {
    let la = a.labels();
    let lb = b.labels();
    let nb = b.parts().len();
    let key: Vec<usize> = (0..a.n()).map(|i| la[i] * nb + lb[sigma.perm[i]]).collect();
    Composition::from_labels(&key)
}

/// `(P_w, Q_w)` with `M_{P_w} = M_P ∩ w^{-1} M_Q w` and `M_{Q_w} = M_Q ∩ w M_P w^{-1}`.
pub fn subordinate_parabolics(
    w: &WeylElem,
    p: &Composition,
    q: &Composition,
) -> Result<(Composition, Composition), RootDataError> {
    check_sizes(p, q)?;
    if w.n() != p.n() || !is_rep(w, p, q) {
        return Err(RootDataError::InvalidRepresentative(w.to_string()));
    }
    let bad = || RootDataError::InvalidRepresentative(w.to_string());
    let pw = intersect(p, w, q).ok_or_else(bad)?;
    let qw = intersect(q, &w.inverse(), p).ok_or_else(bad)?;
    // w carries the blocks of P_w onto the blocks of Q_w, order-preservingly
    let lq = qw.labels();
    for blk in pw.blocks() {
        let image: Vec<usize> = blk.clone().map(|i| w.perm[i]).collect();
        let same_block = image.iter().all(|&j| lq[j] == lq[image[0]]);
        let contiguous = image.windows(2).all(|x| x[1] == x[0] + 1);
        if !same_block || !contiguous || qw.parts()[lq[image[0]]] != blk.len() {
            return Err(bad());
        }
    }
    Ok((pw, qw))
}

/// `Omega(P; Q)`: representatives `w` in `_Q Omega_P` with `w M_P w^{-1} ⊇ M_Q`.
pub fn omega_semi(p: &Composition, q: &Composition) -> Result<Vec<WeylElem>, RootDataError> {
    let mut out = Vec::new();
    for w in double_coset_reps(p, q)? {
        let (_, qw) = subordinate_parabolics(&w, p, q)?;
        if &qw == q {
            out.push(w);
        }
    }
    Ok(out)
}

/// `Omega(P, Q) = Omega(P; Q) ∩ Omega(Q; P)^{-1}`.
pub fn omega(p: &Composition, q: &Composition) -> Result<Vec<WeylElem>, RootDataError> {
    let back: BTreeSet<WeylElem> = omega_semi(q, p)?.into_iter().map(|w| w.inverse()).collect();
    Ok(omega_semi(p, q)?.into_iter().filter(|w| back.contains(w)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_permutations() {
        assert_eq!(WeylElem::all(4).len(), 24);
        assert_eq!(WeylElem::all(1).len(), 1);
    }

    #[test]
    fn compose_and_inverse() {
        let w = WeylElem::new(vec![2, 0, 1]).unwrap();
        assert!(w.compose(&w.inverse()).is_identity());
        assert_eq!(w.length(), 2);
        assert!(WeylElem::new(vec![0, 0]).is_none());
    }

    #[test]
    fn action_on_roots() {
        let w = WeylElem::new(vec![1, 0, 2]).unwrap();
        let a = RootVector::e_diff(3, 0, 2);
        assert_eq!(w.act(&a), RootVector::e_diff(3, 1, 2));
    }

    #[test]
    fn non_representative_is_rejected() {
        let p = Composition::parse("2,1").unwrap();
        let w = WeylElem::new(vec![1, 0, 2]).unwrap();
        assert!(subordinate_parabolics(&w, &p, &p).is_err());
    }
}
