use std::sync::Arc;

use eisencont::linalg::vec_norm;
use eisencont::merocont::exact::{solve_rational_family, RationalFamily};
use eisencont::merocont::{continue_unique_solution, AnalyticLinearFamily, EngineOptions, FiniteTypeWitness, LinearFamily, MeromorphicSolution};
use eisencont::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `[[1, s], [s, 1]] v = (1, 0)`.
pub fn rational_2x2() -> RationalFamily {
    RationalFamily::from_ints(&[vec![vec![1], vec![0, 1]], vec![vec![0, 1], vec![1]]], &[vec![1], vec![0]]).unwrap()
}

/// `[[s, 1, s], [-1, s, 0], [0, 0, s - 2]] v = (1, 0, 1)`, determinant `(s - 2)(s^2 + 1)`.
pub fn rational_3x3() -> RationalFamily {
    RationalFamily::from_ints(
        &[
            vec![vec![0, 1], vec![1], vec![0, 1]],
            vec![vec![-1], vec![0, 1], vec![0]],
            vec![vec![0], vec![0], vec![-2, 1]],
        ],
        &[vec![1], vec![0], vec![1]],
    )
    .unwrap()
}

/// Numeric engine with the identity witness, uniqueness sampled near the origin.
pub fn solve_numeric(fam: AnalyticLinearFamily, probe: &[C64]) -> MeromorphicSolution {
    let dim = fam.dim();
    continue_unique_solution(
        Arc::new(fam),
        Arc::new(FiniteTypeWitness::identity(dim)),
        &[C64::new(0.31, 0.02), C64::new(-0.2, 0.4)],
        probe,
        &EngineOptions::default(),
    )
    .unwrap()
}

/// Largest relative gap between the numeric engine and exact mode over
/// `points` random parameters at distance at least 0.05 from every pole.
pub fn cross_mode(fam: &RationalFamily, points: usize, seed: u64) -> f64 {
    let exact = solve_rational_family(fam).unwrap();
    let numeric = solve_numeric(fam.to_analytic(), &[C64::new(0.5, 0.0), C64::new(0.1, 0.3)]);
    let poles = exact.poles();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < points {
        let s = C64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        if poles.iter().any(|p| (p - s).norm() < 0.05) {
            continue;
        }
        let a = exact.eval(s);
        let b = numeric.value(s).unwrap();
        let diff: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        worst = worst.max(vec_norm(&diff) / vec_norm(&a));
        done += 1;
    }
    worst
}
