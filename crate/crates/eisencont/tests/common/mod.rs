#![allow(dead_code)]

pub mod exact;
pub mod sl2;

use std::f64::consts::PI;

use eisencont::polyexp::*;
use eisencont::rootdata::*;
use eisencont::C64;
use num_rational::Rational64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every `alpha in Delta_P` for every composition of `n <= n_max`: non-negative
/// simple-root coefficients and positive self-pairing. Returns how many roots were checked.
pub fn alpalp_exhaustive(n_max: usize) -> usize {
    let mut checked = 0;
    for n in 1..=n_max {
        for p in Composition::all(n) {
            for a in delta_p(&p) {
                assert!(a.expansion.iter().all(|c| *c >= Rational64::zero()), "{p}: {:?}", a.expansion);
                assert!(a.self_pairing > Rational64::zero(), "{p}");
                assert_eq!(a.root.pairing(&a.coroot), a.self_pairing);
                assert!(a.root.is_sum_zero());
                checked += 1;
            }
        }
    }
    checked
}

/// Double-coset representative counts against orbit enumeration for all
/// pairs with `n <= n_max`; also checks each representative is the unique
/// shortest element of its coset. Returns the number of pairs checked.
pub fn coset_counts_exhaustive(n_max: usize) -> usize {
    let mut pairs = 0;
    for n in 1..=n_max {
        let comps = Composition::all(n);
        for p in &comps {
            for q in &comps {
                let reps = double_coset_reps(p, q).unwrap();
                let orbits = double_cosets_brute_force(p, q).unwrap();
                assert_eq!(reps.len(), orbits.len(), "{p} {q}");
                for orbit in &orbits {
                    let min = orbit.iter().map(|w| w.length()).min().unwrap();
                    let shortest: Vec<_> = orbit.iter().filter(|w| w.length() == min).collect();
                    assert_eq!(shortest.len(), 1, "{p} {q}");
                    assert!(reps.contains(shortest[0]), "{p} {q}: {}", shortest[0]);
                }
                pairs += 1;
            }
        }
    }
    pairs
}

fn random_c(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    C64::from_polar(r, 2.0 * PI * rng.random::<f64>())
}

/// Random one-dimensional tuple with `|lambda| <= radius`; about a third of
/// the tuples repeat an exponent.
pub fn random_tuple_1d(rng: &mut ChaCha8Rng, radius: f64) -> ExpTuple {
    let n = rng.random_range(1..=5);
    let mut lams: Vec<C64> = (0..n).map(|_| random_c(rng, radius)).collect();
    if n > 1 && rng.random::<f64>() < 0.35 {
        let k = rng.random_range(1..n);
        lams[k] = lams[0];
        if n > 2 && rng.random::<f64>() < 0.5 {
            lams[n - 1] = lams[0];
        }
    }
    ExpTuple::scalar(&lams)
}

/// `section(f|_Y) - f` over `tuples` random tuples (one- and two-dimensional,
/// confluent ones included) with random members. Returns `(max error, confluent count)`.
pub fn reconstruction_suite(tuples: usize, seed: u64) -> (f64, usize) {
    let (radius, r) = (2.0, 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut confluent = 0;
    for t in 0..tuples {
        let (tuple, section) = if t % 4 == 3 {
            // product of two one-dimensional tuples, zipped so each axis projects back
            let a = random_tuple_1d(&mut rng, radius);
            let n = a.len();
            let b: Vec<C64> = (0..n).map(|_| random_c(&mut rng, radius)).collect();
            let b = ExpTuple::scalar(&b);
            let exps = a.exponents().iter().zip(b.exponents()).map(|(x, y)| vec![x[0], y[0]]).collect();
            let tuple = ExpTuple::new(2, exps).unwrap();
            let sa = section_1d(&tuple.project(0..1), r).unwrap();
            let sb = section_1d(&tuple.project(1..2), r).unwrap();
            let s = section_product(&tuple, &sa, &sb).unwrap();
            (tuple, s)
        } else {
            let tuple = random_tuple_1d(&mut rng, radius);
            let s = section_1d(&tuple, r).unwrap();
            (tuple, s)
        };
        if tuple.multiplicities().len() < tuple.len() {
            confluent += 1;
        }
        let f = PolyExpFn::random_member(&tuple, &mut rng);
        let values = section.restrict(&f);
        let g = section.apply(&values);
        for _ in 0..10 {
            let x: Vec<f64> = (0..tuple.dim()).map(|_| rng.random_range(-0.5..2.0)).collect();
            let fx = f.eval(&x);
            worst = worst.max((section.eval(&values, &x) - fx).norm());
            worst = worst.max((g.eval(&x) - fx).norm());
        }
    }
    (worst, confluent)
}

/// Discrete Cauchy mean of the section weights as `lambda_1` runs around a
/// circle centred on a confluence point `lambda_1 = lambda_2`. Returns the
/// largest deviation from the value at the centre.
pub fn cauchy_through_confluence() -> f64 {
    let centre = C64::new(0.4, -0.3);
    let others = [centre, C64::new(-0.8, 0.2), C64::new(1.1, 0.0)];
    let (r, rho, n) = (3.0, 0.05, 64);
    let xs = [0.0, 0.45, 1.3, 2.2];
    let weights = |l1: C64| -> Vec<C64> {
        let mut lams = vec![l1];
        lams.extend_from_slice(&others);
        let s = section_1d(&ExpTuple::scalar(&lams), r).unwrap();
        xs.iter().flat_map(|&x| s.eval_row(&[x])).collect()
    };
    let at_centre = weights(centre);
    let mut mean = vec![C64::new(0.0, 0.0); at_centre.len()];
    for k in 0..n {
        let l1 = centre + C64::from_polar(rho, 2.0 * PI * (k as f64 + 0.5) / n as f64);
        for (m, w) in mean.iter_mut().zip(weights(l1)) {
            *m += w / n as f64;
        }
    }
    mean.iter().zip(&at_centre).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}
