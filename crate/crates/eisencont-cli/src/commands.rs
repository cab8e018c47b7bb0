use std::fmt::Write as _;
use std::sync::Arc;

use eisencont::merocont::exact::{solve_rational_family, QPoly, RationalFamily};
use eisencont::merocont::{continue_unique_solution, EngineOptions, FiniteTypeWitness};
use eisencont::rootdata::{delta_p, double_coset_reps, omega, omega_semi, simple_roots, Composition};
use eisencont::sl2::{eisenstein_series, reduce_to_fundamental, Continuation, HPoint, ScanRow, Sl2Error};
use eisencont::C64;
use clap::ValueEnum;
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::{parse, Case, CliError, Query};

fn sl2_err(e: Sl2Error) -> CliError {
    match e {
        Sl2Error::NotInUpperHalfPlane { .. }
        | Sl2Error::Divergent(_)
        | Sl2Error::Config(_)
        | Sl2Error::Grid(_)
        | Sl2Error::BandTooWide { .. }
        | Sl2Error::OutOfBand { .. }
        | Sl2Error::SupportViolation { .. } => CliError::Usage(e.to_string()),
        _ => CliError::Numeric(e.to_string()),
    }
}

fn pretty(v: serde_json::Value) -> String {
    serde_json::to_string_pretty(&v).expect("json serialises") + "\n"
}

fn fmt_c(z: C64) -> String {
    if z.im < 0.0 {
        format!("{:.15e}-{:.15e}i", z.re, -z.im)
    } else {
        format!("{:.15e}+{:.15e}i", z.re, z.im)
    }
}

pub fn eval(cfg: &RunConfig, z: &str, s: &str, m: u32) -> Result<String, CliError> {
    let (x, y) = parse::point(z)?;
    let s = parse::complex(s)?;
    let z = HPoint::new(x, y).map_err(sl2_err)?;
    if m == 0 {
        return Err(CliError::Usage("--M must be positive".into()));
    }
    let (value, tail) = eisenstein_series(z, s, m, cfg.continuation.parallelism).map_err(sl2_err)?;
    let (w, g) = reduce_to_fundamental(z);
    Ok(match cfg.output.format {
        Format::Json => pretty(json!({
            "schema": "eisencont.eval.v1",
            "config": cfg,
            "seed": cfg.seed(),
            "z": [x, y],
            "reduced": [w.x, w.y],
            "gamma": g,
            "s": s,
            "M": m,
            "value": value,
            "tail_bound": tail,
        })),
        Format::Plain => {
            let mut out = cfg.echo();
            writeln!(out, "z          = {x} + {y}i").unwrap();
            writeln!(out, "reduced    = {} + {}i", w.x, w.y).unwrap();
            writeln!(out, "s          = {}", fmt_c(s)).unwrap();
            writeln!(out, "M          = {m}").unwrap();
            writeln!(out, "E(z; s)    = {}", fmt_c(value)).unwrap();
            writeln!(out, "tail bound = {tail:.3e}").unwrap();
            out
        }
    })
}

/// Statuses that describe the point rather than a failure of the method.
fn soft(status: &str) -> bool {
    matches!(status, "ok" | "pole-proximity" | "out-of-band" | "hhat-vanishes")
}

pub fn mscan(
    cfg: &RunConfig,
    list: &[String],
    re: Option<&str>,
    im: Option<&str>,
    strict: bool,
) -> Result<(String, Result<(), CliError>), CliError> {
    let mut points: Vec<C64> = list.iter().filter(|t| !t.trim().is_empty()).map(|t| parse::complex(t)).collect::<Result<_, _>>()?;
    if let Some(re) = re {
        let res = parse::range(re)?;
        let ims = parse::range(im.unwrap_or("0,0,1"))?;
        points.extend(ims.iter().flat_map(|&b| res.iter().map(move |&a| C64::new(a, b))));
    } else if im.is_some() {
        return Err(CliError::Usage("--im needs --re".into()));
    }
    if points.is_empty() {
        return Err(CliError::Usage("no s values: give --s or --re".into()));
    }
    let cont = Continuation::prepare(&cfg.to_sl2()?).map_err(sl2_err)?;
    let rows = cont.scan(&points);
    if strict {
        if let Some(r) = rows.iter().find(|r| r.status != "ok") {
            return Err(CliError::Numeric(format!("s = {}: {}", fmt_c(r.s), r.status)));
        }
    }
    let hard: Vec<&ScanRow> = rows.iter().filter(|r| !soft(&r.status)).collect();
    let status = match hard.first() {
        Some(r) => Err(CliError::Numeric(format!("{} row(s) failed, first at s = {}: {}", hard.len(), fmt_c(r.s), r.status))),
        None => Ok(()),
    };
    let text = match cfg.output.format {
        Format::Json => pretty(json!({
            "schema": "eisencont.mscan.v1",
            "config": cfg,
            "seed": cfg.seed(),
            "grid": cont.meta(),
            "rows": rows,
        })),
        Format::Plain => {
            let mut out = cfg.echo();
            let meta = cont.meta();
            writeln!(out, "# nodes {} (x {}), witness rank {} cond {:.3e}", meta.n_nodes, meta.x_nodes, meta.witness_rank, meta.witness_cond).unwrap();
            writeln!(out, "{}", ScanRow::CSV_HEADER).unwrap();
            for r in &rows {
                writeln!(out, "{}", r.csv()).unwrap();
            }
            out
        }
    };
    Ok((text, status))
}

pub fn weyl(cfg: &RunConfig, n: usize, p: &str, q: Option<&str>, query: Query) -> Result<String, CliError> {
    let comp = |t: &str| -> Result<Composition, CliError> {
        let c = Composition::parse(t).map_err(|e| CliError::Usage(e.to_string()))?;
        if c.n() != n {
            return Err(CliError::Usage(format!("{c} is a composition of {}, not of {n}", c.n())));
        }
        Ok(c)
    };
    let p = comp(p)?;
    let q = match q {
        Some(t) => Some(comp(t)?),
        None => None,
    };
    let need_q = || q.clone().ok_or_else(|| CliError::Usage("this query needs --q".into()));
    let usage = |e: eisencont::rootdata::RootDataError| CliError::Usage(e.to_string());
    let (result, lines): (serde_json::Value, Vec<String>) = match query {
        Query::Cosets | Query::Omega | Query::OmegaSemi => {
            let q = need_q()?;
            let ws = match query {
                Query::Cosets => double_coset_reps(&p, &q),
                Query::Omega => omega(&p, &q),
                _ => omega_semi(&p, &q),
            }
            .map_err(usage)?;
            let lines = ws.iter().map(|w| format!("{w}  length {}", w.length())).collect();
            (json!(ws.iter().map(|w| json!({"perm": w.perm, "length": w.length()})).collect::<Vec<_>>()), lines)
        }
        Query::DeltaP => {
            let d = delta_p(&p);
            let lines = d
                .iter()
                .map(|a| {
                    let coords: Vec<String> = a.root.coords.iter().map(|c| c.to_string()).collect();
                    let exp: Vec<String> = a.expansion.iter().map(|c| c.to_string()).collect();
                    format!("alpha_{} = ({})  over Delta_0 [{}]  <alpha, alpha^vee> = {}", a.simple_index + 1, coords.join(", "), exp.join(", "), a.self_pairing)
                })
                .collect();
            (json!(d), lines)
        }
        Query::SimpleRoots => {
            let r = simple_roots(&p);
            let lines = r.iter().map(|a| a.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")).collect();
            (json!(r), lines)
        }
    };
    let query_name = query.to_possible_value().expect("named").get_name().to_string();
    Ok(match cfg.output.format {
        Format::Json => pretty(json!({
            "schema": "eisencont.weyl.v1",
            "config": cfg,
            "seed": cfg.seed(),
            "n": n,
            "p": p.parts(),
            "q": q.as_ref().map(|q| q.parts().to_vec()),
            "query": query_name,
            "count": lines.len(),
            "result": result,
        })),
        Format::Plain => {
            let mut out = cfg.echo();
            let qs = q.map(|q| format!(" Q = {q}")).unwrap_or_default();
            writeln!(out, "{query_name}: n = {n} P = {p}{qs}: {} element(s)", lines.len()).unwrap();
            for l in lines {
                writeln!(out, "{l}").unwrap();
            }
            out
        }
    })
}

fn demo_family(case: Case) -> RationalFamily {
    let f = match case {
        // v = s
        Case::Rank1 => RationalFamily::from_ints(&[vec![vec![1]]], &[vec![0, 1]]),
        // [[1, s], [s, 1]] v = (1, 0)
        Case::Twobytwo => RationalFamily::from_ints(&[vec![vec![1], vec![0, 1]], vec![vec![0, 1], vec![1]]], &[vec![1], vec![0]]),
        // [[s, 1, s], [-1, s, 0], [0, 0, s - 2]] v = (1, 0, 1)
        Case::Rational3 => RationalFamily::from_ints(
            &[
                vec![vec![0, 1], vec![1], vec![0, 1]],
                vec![vec![-1], vec![0, 1], vec![0]],
                vec![vec![0], vec![0], vec![-2, 1]],
            ],
            &[vec![1], vec![0], vec![1]],
        ),
    };
    f.expect("packaged family is well formed")
}

/// Rational linear factors split off, the irreducible-over-Q remainder kept whole.
fn factor_strings(f: &QPoly, m: u32) -> Vec<String> {
    let (roots, rest) = f.split_rational_roots();
    let pow = |g: QPoly| if m == 1 { format!("({g})") } else { format!("({g})^{m}") };
    let mut out: Vec<String> = roots.into_iter().map(|r| pow(QPoly::new(vec![-r, QPoly::one().lead()]))).collect();
    if rest.degree().unwrap_or(0) > 0 {
        out.push(pow(rest));
    }
    out
}

pub fn engine_demo(cfg: &RunConfig, case: Case) -> Result<String, CliError> {
    let fam = demo_family(case);
    let exact = solve_rational_family(&fam).map_err(|e| CliError::Numeric(e.to_string()))?;
    let opts = EngineOptions { parallelism: cfg.continuation.parallelism, ..EngineOptions::default() };
    let unq = [C64::new(0.31, 0.02), C64::new(-0.2, 0.4)];
    let probes = [C64::new(0.5, 0.0), C64::new(0.1, 0.3)];
    let numeric = continue_unique_solution(Arc::new(fam.to_analytic()), Arc::new(FiniteTypeWitness::identity(fam.dim())), &unq, &probes, &opts)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let certified = numeric.uniqueness_certificate(unq[0], 8, cfg.seed());
    let poles: Vec<_> = exact.poles().into_iter().map(|p| numeric.pole_report(p, 1e-3)).collect();
    let grid = [C64::new(0.5, 0.0), C64::new(2.5, 0.0), C64::new(0.3, 0.7), C64::new(-1.5, -0.4)];
    let max_gap = grid
        .iter()
        .filter_map(|&s| {
            let a = exact.eval(s);
            let b = numeric.value(s)?;
            let num: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            let den: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            Some(num / den)
        })
        .fold(0.0, f64::max);
    let name = case.to_possible_value().expect("named").get_name().to_string();
    Ok(match cfg.output.format {
        Format::Json => pretty(json!({
            "schema": "eisencont.engine-demo.v1",
            "config": cfg,
            "seed": cfg.seed(),
            "case": name,
            "exact": exact.dump(),
            "numeric": numeric.dump(&grid),
            "poles": poles,
            "uniqueness_certified": certified,
            "max_rel_gap": max_gap,
        })),
        Format::Plain => {
            let mut out = cfg.echo();
            writeln!(out, "case {name}: {} unknowns, {} equations", fam.dim(), fam.n_equations()).unwrap();
            writeln!(out, "exact solution over Q(s):").unwrap();
            for (i, c) in exact.components.iter().enumerate() {
                writeln!(out, "  v{} = {c}", i + 1).unwrap();
            }
            writeln!(out, "common denominator: {}", exact.denominator).unwrap();
            if exact.pole_factors.is_empty() {
                writeln!(out, "poles: none").unwrap();
            } else {
                let f: Vec<String> = exact.pole_factors.iter().flat_map(|(f, m)| factor_strings(f, *m)).collect();
                writeln!(out, "denominator factorisation: {}", f.join(" ")).unwrap();
                for p in &poles {
                    let res: Vec<String> = p.residue.iter().map(|&r| fmt_c(r)).collect();
                    writeln!(out, "pole s = {}  |d| = {:.2e}  removable {}  residue [{}]", fmt_c(p.s), p.denominator_abs, p.removable, res.join(", ")).unwrap();
                }
            }
            writeln!(out, "numeric engine: rank k = {}, uniqueness certified at {}: {certified}", numeric.k(), fmt_c(unq[0])).unwrap();
            writeln!(out, "max relative gap numeric vs exact on {} points: {max_gap:.2e}", grid.len()).unwrap();
            out
        }
    })
}
