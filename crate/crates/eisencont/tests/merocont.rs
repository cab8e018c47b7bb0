mod common;

use std::sync::Arc;

use eisencont::linalg::{lstsq, singular_values, vec_norm, CMat};
use eisencont::merocont::exact::{solve_rational_family, ExactDump, ExactError, QPoly, RationalFamily};
use eisencont::merocont::*;
use eisencont::C64;
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::exact::{cross_mode, rational_2x2, rational_3x3, solve_numeric};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Distance from `v` to the column span of `basis`, relative to `|v|`.
fn outside_span(basis: &CMat, v: &[C64]) -> f64 {
    let b = Mat::from_fn(v.len(), 1, |i, _| v[i]);
    if basis.ncols() == 0 {
        return 1.0;
    }
    let x = lstsq(basis.as_ref(), b.as_ref());
    let fit = basis * &x;
    let res: Vec<C64> = (0..v.len()).map(|i| fit[(i, 0)] - v[i]).collect();
    vec_norm(&res) / vec_norm(v)
}

/// Right singular vector of the smallest singular value.
fn null_vector(m: &CMat) -> Vec<C64> {
    let svd = m.svd().unwrap();
    let n = m.ncols();
    (0..n).map(|i| svd.V()[(i, n - 1)]).collect()
}

fn orthonormal(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    while out.len() < k {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for u in &out {
            let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(v.into_iter().map(|x| x / norm).collect());
    }
    out
}

#[test]
fn fredholm_identity_has_no_kernel() {
    let w = fredholm_witness(|_| Mat::identity(4, 4), r(0.0), &FredholmOptions::default()).unwrap();
    assert_eq!(w.rank(), 0);
    assert_eq!(w.dim_l(), 0);
    // homogeneous system M v = 0: the only solution is 0
    let fam = AnalyticLinearFamily::new(4, 4, |_| (Mat::identity(4, 4), vec![r(0.0); 4]));
    let sol = continue_unique_solution(Arc::new(fam), Arc::new(FiniteTypeWitness::identity(4)), &[r(0.0)], &[r(0.0)], &EngineOptions::default())
        .unwrap();
    assert!(vec_norm(&sol.value(c(0.3, 0.3)).unwrap()) < 1e-15);
}

#[test]
fn fredholm_rank_one_defect() {
    let n = 5;
    let m = move |_s: C64| Mat::from_fn(n, n, |i, j| r(if i == j && i != 0 { 1.0 } else { 0.0 }));
    let w = fredholm_witness(m, r(0.0), &FredholmOptions::default()).unwrap();
    assert_eq!(w.rank(), 1);
    let mut e1 = vec![r(0.0); n];
    e1[0] = r(1.0);
    assert!(outside_span(&w.eval(r(0.7)), &e1) < 1e-12);
}

#[test]
fn fredholm_finite_rank_perturbation() {
    let (n, sig) = (50, [1.0, 0.5, 0.25, 0.125]);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u = orthonormal(n, 4, &mut rng);
    let k2: Mat<f64> = Mat::from_fn(n, n, |i, j| (0..4).map(|t| sig[t] * u[t][i] * u[t][j]).sum());
    let m = move |s: C64| Mat::from_fn(n, n, |i, j| r(if i == j { 1.0 } else { 0.0 }) - s * k2[(i, j)]);
    let w = fredholm_witness(m.clone(), c(0.3, 0.1), &FredholmOptions::default()).unwrap();
    assert_eq!(w.rank(), 4);
    // at s = 1/sigma the kernel is spanned by the matching u
    for (t, &sv) in sig.iter().enumerate() {
        let s = r(1.0 / sv);
        let mat = m(s);
        let kernel = null_vector(&mat);
        assert!(singular_values(mat.as_ref()).last().unwrap() < &1e-12);
        assert!(outside_span(&w.eval(s), &kernel) < 1e-10, "sigma {sv}");
        let ut: Vec<C64> = u[t].iter().map(|&x| r(x)).collect();
        assert!(outside_span(&w.eval(s), &ut) < 1e-10);
    }
    // at random s: the smallest singular direction of M(s) still lies in the witness image
    // whenever M(s) is singular, and M(s) is never singular off the four points
    for _ in 0..10 {
        let s = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let mat = m(s);
        let smin = *singular_values(mat.as_ref()).last().unwrap();
        assert!(smin > 1e-6);
        // Sol of M(s) v = M(s) (lambda_s x) is lambda_s x itself
        let lam = w.eval(s);
        let x = Mat::from_fn(4, 1, |i, _| c(i as f64 + 1.0, -0.5));
        let v = &lam * &x;
        let vv: Vec<C64> = (0..n).map(|i| v[(i, 0)]).collect();
        assert!(outside_span(&lam, &vv) < 1e-12);
    }
}

#[test]
fn fredholm_rejects_bad_splitting() {
    let opts = FredholmOptions { rank_cap: 1, ..Default::default() };
    let m = |_s: C64| Mat::from_fn(3, 3, |i, j| r(if i == j && i == 0 { 1.0 } else { 0.0 }));
    assert!(matches!(fredholm_witness(m, r(0.0), &opts), Err(EngineError::NotFredholm(_))));
}

struct Toy {
    n: usize,
    m: usize,
    k: Mat<f64>,
}

impl SplitOperator for Toy {
    fn dim_e(&self) -> usize {
        self.n
    }

    fn dim_b2(&self) -> usize {
        self.m
    }

    fn blocks(&self, s: C64) -> (CMat, CMat) {
        let k1 = Mat::from_fn(self.n, self.n, |i, j| s * self.k[(i, j)]);
        let k2 = Mat::from_fn(self.n, self.m, |i, _| r(1.0 + i as f64) + s * 0.1);
        (k1, k2)
    }

    fn nu(&self, s: C64) -> CMat {
        Mat::from_fn(self.n, self.m, |i, _| (s * (i as f64 - 2.0) * 0.2).exp())
    }
}

fn toy(m: usize) -> Toy {
    let n = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let u = orthonormal(n, 2, &mut rng);
    let k = Mat::from_fn(n, n, |i, j| 0.6 * u[0][i] * u[0][j] + 0.3 * u[1][i] * u[1][j]);
    Toy { n, m, k }
}

#[test]
fn split_witness_without_second_block() {
    let op = Arc::new(toy(0));
    let k = op.k.clone();
    let w = fredholm_split_witness(op, r(0.5), &FredholmOptions::default()).unwrap();
    let plain = fredholm_witness(move |s| Mat::from_fn(6, 6, |i, j| r(if i == j { 1.0 } else { 0.0 }) - s * k[(i, j)]), r(0.5), &FredholmOptions::default())
        .unwrap();
    assert_eq!(w.dim_l(), plain.rank());
    let s = c(0.2, 0.9);
    let (a, b) = (w.eval(s), plain.eval(s));
    for j in 0..b.ncols() {
        let col: Vec<C64> = (0..6).map(|i| b[(i, j)]).collect();
        assert!(outside_span(&a, &col) < 1e-10);
    }
}

#[test]
fn split_witness_two_block_toy() {
    let op = Arc::new(toy(1));
    let w = fredholm_split_witness(op.clone(), r(0.5), &FredholmOptions::default()).unwrap();
    // rank of [K1 K2] at s0 is rank(K1) + 1
    assert_eq!(w.dim_l(), 3);
    for s in [r(0.5), c(1.3, -0.4), c(-2.0, 0.7)] {
        // dense oracle for the block system: (I - K1) v = K2 t, t free
        let (k1, k2) = op.blocks(s);
        let n = op.n;
        let a = Mat::from_fn(n, n + 1, |i, j| {
            if j < n {
                r(if i == j { 1.0 } else { 0.0 }) - k1[(i, j)]
            } else {
                -k2[(i, 0)]
            }
        });
        let kernel = null_vector(&a);
        let inner = w.inner().eval(s);
        assert!(outside_span(&inner, &kernel) < 1e-10, "{s}");
        let nu = op.nu(s);
        let e: Vec<C64> = (0..n).map(|i| kernel[i] + nu[(i, 0)] * kernel[n]).collect();
        assert!(outside_span(&w.eval(s), &e) < 1e-10, "{s}");
    }
}

fn two_by_two_family() -> AnalyticLinearFamily {
    AnalyticLinearFamily::new(2, 2, |s| (Mat::from_fn(2, 2, |i, j| if i == j { r(1.0) } else { s }), vec![r(1.0), r(0.0)]))
}

#[test]
fn engine_scalar_family() {
    let fam = AnalyticLinearFamily::new(1, 1, |s| (Mat::from_fn(1, 1, |_, _| s), vec![s * s]));
    let sol = solve_numeric(fam, &[r(0.5), r(2.0)]);
    // (N, d) is fixed up to a unit; N/d = s and N/s^2 = d/s is constant
    let (n0, d0) = sol.numerator_denominator(r(1.0));
    for s in [r(0.0), c(1.5, -2.0), r(-3.0)] {
        let (n, d) = sol.numerator_denominator(s);
        assert!((d - d0 * s).norm() < 1e-13 * (1.0 + s.norm()));
        assert!((n[0] - n0[0] * s * s).norm() < 1e-12 * (1.0 + s.norm_sqr()));
    }
    // v(s) = s extends through s = 0
    assert!((sol.value(c(1e-3, 0.0)).unwrap()[0] - 1e-3).norm() < 1e-15);
}

#[test]
fn engine_two_by_two_poles() {
    let sol = solve_numeric(two_by_two_family(), &[r(0.0), r(0.5)]);
    let (_, d0) = sol.numerator_denominator(r(0.0));
    for s in [c(0.4, 0.4), r(-1.7), c(2.0, -1.0)] {
        let (_, d) = sol.numerator_denominator(s);
        assert!((d / d0 - (1.0 - s * s)).norm() < 1e-12);
        let v = sol.value(s).unwrap();
        let den = 1.0 - s * s;
        assert!((v[0] - 1.0 / den).norm() < 1e-12 && (v[1] + s / den).norm() < 1e-12);
    }
    let poles = sol.poles_on_segment(r(-3.0), r(3.0), 61);
    let at: Vec<f64> = poles.iter().map(|p| p.s.re).collect();
    assert_eq!(at.len(), 2);
    assert!((at[0] + 1.0).abs() < 1e-10 && (at[1] - 1.0).abs() < 1e-10);
    assert!(poles.iter().all(|p| !p.removable));
    assert!(sol.value(r(1.0)).is_none());
}

#[test]
fn engine_flags_removable_singularity() {
    let fam = AnalyticLinearFamily::new(1, 1, |s| (Mat::from_fn(1, 1, |_, _| s - 1.0), vec![(s - 1.0) * s]));
    let sol = solve_numeric(fam, &[r(0.0), r(2.0)]);
    let poles = sol.poles_on_segment(r(0.0), r(2.0), 21);
    assert_eq!(poles.len(), 1);
    assert!(poles[0].removable);
}

fn overdetermined() -> AnalyticLinearFamily {
    AnalyticLinearFamily::new(2, 4, |s| {
        let row = |i: usize, j: usize| if i == j { r(1.0) } else { s };
        let m = Mat::from_fn(4, 2, |i, j| match i {
            0 | 1 => row(i, j),
            2 => row(0, j) + row(1, j),
            _ => s.exp() * row(0, j) - s * s * row(1, j),
        });
        (m, vec![r(1.0), r(0.0), r(1.0), s.exp()])
    })
}

#[test]
fn engine_overdetermined_family() {
    let sol = solve_numeric(overdetermined(), &[r(0.0), c(0.5, 0.5)]);
    assert_eq!(sol.k(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..30 {
        let s = c(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
        if (1.0 - s * s).norm() < 0.05 {
            continue;
        }
        let v = sol.value(s).unwrap();
        let den = 1.0 - s * s;
        assert!((v[0] - 1.0 / den).norm() < 1e-10 * (1.0 / den).norm().max(1.0));
        let res = sol.residuals(s, &v);
        assert_eq!(res.len(), 4);
        assert!(res.iter().all(|&x| x <= 1e-10), "{res:?}");
    }
}

#[test]
fn engine_detects_inconsistency() {
    // equation 3 contradicts the others: no v solves all four
    let fam = AnalyticLinearFamily::new(2, 3, |s| {
        (Mat::from_fn(3, 2, |i, j| if i == 2 { r(1.0) } else if i == j { r(1.0) } else { s }), vec![r(1.0), r(0.0), r(5.0)])
    });
    let out = continue_unique_solution(Arc::new(fam), Arc::new(FiniteTypeWitness::identity(2)), &[r(0.3)], &[r(0.3)], &EngineOptions::default());
    assert!(matches!(out, Err(EngineError::WitnessViolation { .. })));
}

#[test]
fn engine_needs_uniqueness() {
    let fam = AnalyticLinearFamily::new(2, 1, |s| (Mat::from_fn(1, 2, |_, _| s), vec![s]));
    let out = continue_unique_solution(Arc::new(fam), Arc::new(FiniteTypeWitness::identity(2)), &[r(0.3)], &[r(0.3)], &EngineOptions::default());
    assert!(matches!(out, Err(EngineError::NoUniqueSolution)));
}

#[test]
fn uniqueness_certificate_on_unq_region() {
    let sol = solve_numeric(overdetermined(), &[r(0.0)]);
    for s in [c(0.31, 0.02), c(-0.2, 0.4)] {
        assert!(sol.uniqueness_certificate(s, 16, 3));
    }
}

#[test]
fn solution_is_independent_of_probe_grid() {
    let a = solve_numeric(overdetermined(), &[r(0.0)]);
    let b = solve_numeric(overdetermined(), &[c(1.5, 0.5), r(-0.7), c(0.0, 2.0)]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let s = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let (va, vb) = (a.value(s), b.value(s));
        if let (Some(va), Some(vb)) = (va, vb) {
            let diff: Vec<C64> = va.iter().zip(&vb).map(|(x, y)| x - y).collect();
            assert!(vec_norm(&diff) <= 1e-10 * vec_norm(&va).max(1.0));
        }
    }
}

#[test]
fn solution_dump_round_trips() {
    let sol = solve_numeric(two_by_two_family(), &[r(0.0)]);
    let dump = sol.dump(&[r(0.0), c(0.5, 0.5), r(1.0)]);
    assert_eq!(dump.schema, "eisencont.solution.v1");
    assert!(dump.samples[2].value.is_none());
    let text = serde_json::to_string(&dump).unwrap();
    let back: SolutionDump = serde_json::from_str(&text).unwrap();
    assert_eq!(back.samples.len(), 3);
    assert_eq!(back.selected_equations, dump.selected_equations);
    assert_eq!(back.samples[1].value, dump.samples[1].value);
}

fn q(c: &[i64]) -> QPoly {
    QPoly::from_ints(c)
}

#[test]
fn exact_identity() {
    let fam = RationalFamily::from_ints(&[vec![vec![1], vec![0]], vec![vec![0], vec![1]]], &[vec![0, 1], vec![0, 0, 1]]).unwrap();
    let sol = solve_rational_family(&fam).unwrap();
    assert_eq!(sol.denominator, q(&[1]));
    assert_eq!(sol.numerators, vec![q(&[0, 1]), q(&[0, 0, 1])]);
    assert!(sol.poles().is_empty());
}

#[test]
fn exact_two_by_two_matches_hand_cramer() {
    let sol = solve_rational_family(&rational_2x2()).unwrap();
    // 1/(1 - s^2), -s/(1 - s^2) with monic denominator s^2 - 1
    assert_eq!(sol.denominator, q(&[-1, 0, 1]));
    assert_eq!(sol.numerators, vec![q(&[-1]), q(&[0, 1])]);
    let mut poles: Vec<f64> = sol.poles().iter().map(|p| p.re).collect();
    poles.sort_by(f64::total_cmp);
    assert!((poles[0] + 1.0).abs() < 1e-12 && (poles[1] - 1.0).abs() < 1e-12);
}

#[test]
fn exact_three_by_three_matches_hand_cramer() {
    let sol = solve_rational_family(&rational_3x3()).unwrap();
    assert_eq!(sol.denominator, q(&[-2, 1, -2, 1]));
    assert_eq!(sol.numerators, vec![q(&[0, -2]), q(&[-2]), q(&[1, 0, 1])]);
    assert_eq!(sol.pole_factors, vec![(q(&[-2, 1, -2, 1]), 1)]);
    let mut poles = sol.poles();
    poles.sort_by(|a, b| a.im.total_cmp(&b.im));
    assert!((poles[0] - c(0.0, -1.0)).norm() < 1e-12);
    assert!((poles[1] - r(2.0)).norm() < 1e-12);
    assert!((poles[2] - c(0.0, 1.0)).norm() < 1e-12);
    let dump: ExactDump = serde_json::from_str(&serde_json::to_string(&sol.dump()).unwrap()).unwrap();
    assert_eq!(dump.schema, "eisencont.exact.v1");
    assert_eq!(dump.denominator, vec!["-2", "1", "-2", "1"]);
}

#[test]
fn exact_errors() {
    let under = RationalFamily::from_ints(&[vec![vec![1], vec![0, 1]]], &[vec![1]]).unwrap();
    assert!(matches!(solve_rational_family(&under), Err(ExactError::Underdetermined { rank: 1, dim: 2 })));
    let bad = RationalFamily::from_ints(&[vec![vec![1]], vec![vec![1]]], &[vec![1], vec![2]]).unwrap();
    assert_eq!(solve_rational_family(&bad), Err(ExactError::Inconsistent));
}

#[test]
fn exact_and_numeric_agree() {
    assert!(cross_mode(&rational_3x3(), 20, 1) <= 1e-9);
    for fam in [rational_2x2(), rational_3x3()] {
        let err = cross_mode(&fam, 50, 2);
        assert!(err <= 1e-8, "{err:e}");
    }
}

#[test]
fn residual_soundness_for_supplied_equations() {
    let sol = solve_numeric(overdetermined(), &[r(0.0)]);
    let floor = sol.options().denominator_floor;
    for s in sol.sample(&(0..40).map(|i| c(-2.0 + 0.1 * i as f64, 0.3)).collect::<Vec<_>>()) {
        if s.denominator.norm() >= floor {
            assert!(s.value.is_some());
            assert!(s.max_residual <= sol.options().residual_tol, "{}", s.max_residual);
        }
    }
}
