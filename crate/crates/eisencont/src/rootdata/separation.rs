use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{delta_p, omega_semi, Composition, RootDataError, WeylElem};

/// Random `lambda in a_P^*` (as a vector of `R^n`) with every
/// `<lambda, alpha^vee>`, `alpha in Delta_P`, strictly above `floor`.
/// A fraction of samples sits right at the boundary of the shifted cone.
fn sample_lambda(p: &Composition, floor: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let k = p.parts().len();
    let mut block_vals = vec![0.0; k];
    for b in 1..k {
        let excess = if rng.random::<f64>() < 0.3 { 1e-9 } else { -3.0 * rng.random::<f64>().max(1e-300).ln() };
        let gap = floor * (1.0 + excess) + 1e-12;
        block_vals[b] = block_vals[b - 1] - gap;
    }
    let mean: f64 = p.parts().iter().zip(&block_vals).map(|(&s, v)| s as f64 * v).sum::<f64>() / p.n() as f64;
    p.labels().iter().map(|&b| block_vals[b] - mean).collect()
}

fn separates(c: f64, lambda: &[f64], ws: &[WeylElem], q_edges: &[usize]) -> bool {
    ws.iter().all(|w| {
        let wl = w.act_f64(lambda);
        q_edges.iter().any(|&j| wl[j] - wl[j + 1] < -c)
    })
}

/// Empirical constant `c'` for the chamber separation property: whenever
/// `<lambda, alpha^vee> > c'` on `Delta_P`, every `w != 1` in `Omega(P; Q)`
/// has some `alpha in Delta_Q` with `<w lambda, alpha^vee> < -c`.
///
/// Starts at `c / 16` and doubles until `trials` random samples validate.
pub fn chamber_separation(
    c: f64,
    p: &Composition,
    q: &Composition,
    trials: usize,
    seed: u64,
) -> Result<f64, RootDataError> {
    if p.n() != q.n() {
        return Err(RootDataError::SizeMismatch(p.n(), q.n()));
    }
    if delta_p(p).is_empty() {
        return Err(RootDataError::MaximalParabolic);
    }
    let ws: Vec<WeylElem> = omega_semi(p, q)?.into_iter().filter(|w| !w.is_identity()).collect();
    let q_edges = q.boundary_edges();
    let cap = c * 2f64.powi(30);
    let mut cp = c / 16.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while cp <= cap {
        if (0..trials).all(|_| separates(c, &sample_lambda(p, cp, &mut rng), &ws, &q_edges)) {
            return Ok(cp);
        }
        cp *= 2.0;
    }
    Err(RootDataError::SearchFailure(cap))
}
