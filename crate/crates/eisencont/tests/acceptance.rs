//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use eisencont::merocont::exact::{solve_rational_family, QPoly};
use eisencont::par::Parallelism;
use eisencont::sl2::*;
use eisencont::specfn::m_closed;
use eisencont::C64;

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

struct Report {
    failed: Vec<usize>,
}

impl Report {
    fn line(&mut self, n: usize, ok: bool, what: &str) {
        println!("{} criterion {n}: {what}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(n);
        }
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn main() {
    let mut rep = Report { failed: Vec::new() };
    let cfg = Sl2Config::default();
    let t = Instant::now();
    let cont = Continuation::prepare(&cfg).expect("default pipeline prepares");
    let prep = t.elapsed();
    let mut accepted: Vec<ContinuationResult> = Vec::new();

    // 1
    let t = Instant::now();
    let out = cont.evaluate(r(2.5));
    let took = prep + t.elapsed();
    match out {
        Ok(out) => {
            let e = rel(out.m_estimate, m_closed(r(2.5)).unwrap());
            rep.line(1, e <= 1e-3 && took.as_secs() <= 120, &format!("m(2.5) rel err {e:.2e} (<= 1e-3), {:.1} s (<= 120 s)", secs(took)));
            accepted.push(out);
        }
        Err(e) => rep.line(1, false, &format!("m(2.5) failed: {e}")),
    }

    // 2
    let mut ok = true;
    let mut parts = Vec::new();
    for s in [r(0.75), C64::new(0.6, 0.25)] {
        let t = Instant::now();
        match cont.evaluate(s) {
            Ok(out) => {
                let took = prep + t.elapsed();
                let e = rel(out.m_estimate, m_closed(s).unwrap());
                ok &= e <= 1e-2 && took.as_secs() <= 300;
                parts.push(format!("m({s}) rel err {e:.2e} in {:.1} s", secs(took)));
                accepted.push(out);
            }
            Err(e) => {
                ok = false;
                parts.push(format!("m({s}) failed: {e}"));
            }
        }
    }
    rep.line(2, ok, &format!("{} (<= 1e-2, <= 300 s each)", parts.join("; ")));

    // 3
    let mut worst: f64 = 0.0;
    for (s, m) in [(r(2.0), 2000), (r(2.5), 600), (C64::new(3.0, 1.0), 300)] {
        for y in [2.0, 3.0, 5.0] {
            let k = 8;
            let ct = (0..k)
                .map(|i| {
                    let z = HPoint::new(-0.5 + (i as f64 + 0.5) / k as f64, y).unwrap();
                    eisenstein_series(z, s, m, Parallelism::Rayon).unwrap().0
                })
                .sum::<C64>()
                / k as f64;
            let law = (s * f64::ln(y)).exp() + m_closed(s).unwrap() * ((1.0 - s) * f64::ln(y)).exp();
            worst = worst.max((ct - law).norm());
        }
    }
    rep.line(3, worst <= 1e-5, &format!("constant-term law max abs err {worst:.2e} (<= 1e-5)"));

    // 4
    let mut ok = true;
    let mut parts = Vec::new();
    for s in [r(0.7), C64::new(0.6, 0.2)] {
        match (cont.evaluate(s), cont.evaluate(1.0 - s)) {
            (Ok(a), Ok(b)) => {
                let d = (a.m_estimate * b.m_estimate - 1.0).norm();
                ok &= d <= 2e-2;
                parts.push(format!("|m({s}) m(1-s) - 1| = {d:.2e}"));
                accepted.push(a);
                accepted.push(b);
            }
            (a, b) => {
                ok = false;
                parts.push(format!("{s}: {:?} / {:?}", a.err(), b.err()));
            }
        }
    }
    rep.line(4, ok, &format!("{} (<= 2e-2)", parts.join("; ")));

    // 5
    let poles = cont.poles_on_real_segment(0.9, 1.1, 21);
    let line = match poles.as_slice() {
        [p] => match cont.m_residue(*p, 0.05, 16) {
            Ok(res) => {
                let target = 3.0 / PI;
                let e = (res - target).norm() / target;
                let ok = (p.re - 1.0).abs() <= 0.02 && p.im.abs() <= 0.02 && e <= 0.1;
                (ok, format!("pole at {:.6} (1 +- 0.02), residue {:.8} vs 3/pi {:.8}, rel err {e:.2e} (<= 0.1)", p.re, res.re, target))
            }
            Err(e) => (false, format!("residue failed: {e}")),
        },
        other => (false, format!("expected one pole in [0.9, 1.1], found {}", other.len())),
    };
    rep.line(5, line.0, &line.1);

    // 6
    let sol2 = solve_rational_family(&common::exact::rational_2x2()).unwrap();
    let sol3 = solve_rational_family(&common::exact::rational_3x3()).unwrap();
    let q = QPoly::from_ints;
    let exact_ok = sol2.denominator == q(&[-1, 0, 1])
        && sol2.numerators == vec![q(&[-1]), q(&[0, 1])]
        && sol3.denominator == q(&[-2, 1, -2, 1])
        && sol3.numerators == vec![q(&[0, -2]), q(&[-2]), q(&[1, 0, 1])];
    let cm = common::exact::cross_mode(&common::exact::rational_2x2(), 50, 6)
        .max(common::exact::cross_mode(&common::exact::rational_3x3(), 50, 6));
    rep.line(6, exact_ok && cm <= 1e-8, &format!("exact Cramer match {exact_ok}, numeric vs exact max rel err {cm:.2e} over 50 points (<= 1e-8)"));

    // 7
    let scan: Vec<C64> = (0..12).map(|i| C64::new(0.55 + 0.17 * i as f64, 0.15 * (i % 3) as f64)).collect();
    for &s in &scan {
        if let Ok(out) = cont.evaluate(s) {
            accepted.push(out);
        }
    }
    let floor = cfg.denominator_floor;
    let checked: Vec<&ContinuationResult> = accepted.iter().filter(|o| o.denominator_value.norm() >= floor).collect();
    let all_blocks = checked.iter().all(|o| o.residuals.len() == 5);
    let worst = checked.iter().map(|o| o.max_residual).fold(0.0, f64::max);
    rep.line(
        7,
        !checked.is_empty() && all_blocks && worst <= 1e-6,
        &format!("{} accepted results, all five blocks audited: {all_blocks}, max relative residual {worst:.2e} (<= 1e-6)", checked.len()),
    );

    // 8
    let t = Instant::now();
    let roots = common::alpalp_exhaustive(6);
    let pairs = common::coset_counts_exhaustive(5);
    let took = t.elapsed();
    rep.line(8, took.as_secs_f64() <= 30.0, &format!("{roots} roots (n <= 6) and {pairs} coset pairs (n <= 5) checked in {:.2} s (<= 30 s)", secs(took)));

    // 9
    let (err, confluent) = common::reconstruction_suite(200, 9);
    let cauchy = common::cauchy_through_confluence();
    rep.line(
        9,
        err <= 1e-8 && cauchy <= 1e-6,
        &format!("reconstruction max err {err:.2e} over 200 tuples ({confluent} confluent) (<= 1e-8), Cauchy mean dev {cauchy:.2e} (<= 1e-6)"),
    );

    // 10
    let mut reports = Vec::new();
    for nx in [cfg.nx, 2 * cfg.nx] {
        let c = Sl2Config { nx, ..cfg.clone() };
        let (src, dst) = c.operator_grids().unwrap();
        reports.push(hs_compactness_report(&c.kernel, &src, &dst, Parallelism::Rayon).unwrap());
    }
    let (a, b) = (&reports[0], &reports[1]);
    let drift = (a.frobenius - b.frobenius).abs() / a.frobenius;
    let tail_ok = [a, b].iter().all(|h| h.k0.is_some_and(|k| h.singular_values[k..].iter().all(|&s| s <= 1e-3 * h.singular_values[0])));
    rep.line(
        10,
        drift <= 0.05 && tail_ok && a.k0 == b.k0,
        &format!("Frobenius {:.6} -> {:.6} (drift {drift:.2e} <= 5%), k0 {:?} -> {:?}", a.frobenius, b.frobenius, a.k0, b.k0),
    );

    if rep.failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failing criteria {:?}", rep.failed);
        std::process::exit(1);
    }
}
