use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

// small grid for the scans that only check plumbing
const SMALL: [&str; 4] = ["--nx", "16", "--ny", "36"];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eisencont")).args(args).env_remove("EISEN_CONFIG").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let o = run(&a);
    assert!(o.status.success(), "{a:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid json")
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("eisencont-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn eval_at_i() {
    let v = json(&["eval", "--z", "0,1", "--s", "2", "--M", "500"]);
    assert_eq!(v["schema"], "eisencont.eval.v1");
    assert_eq!(v["seed"], 1);
    // E(i; 2) = 2 zeta(2) G / zeta(4)
    let oracle = 2.0 * 1.644_934_066_848_226_4 * 0.915_965_594_177_219 / 1.082_323_233_711_138_2;
    let (re, im) = c(&v["value"]);
    let tail = v["tail_bound"].as_f64().unwrap();
    assert!(tail > 0.0 && tail < 1e-4);
    assert!((re - oracle).abs() <= tail + 1e-9, "{re} vs {oracle}");
    assert_eq!(im, 0.0);

    let text = stdout(&run(&["eval", "--z", "0,1", "--s", "2", "--M", "500"]));
    assert!(text.starts_with("# eisencont"));
    assert!(text.contains("tail bound"));
}

#[test]
fn eval_divergent_is_usage_error() {
    let o = run(&["eval", "--z", "0,1", "--s", "0.9", "--M", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverges"));
    assert_eq!(run(&["eval", "--z", "0,-1", "--s", "2"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--z", "0", "--s", "2"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--z", "0,1"]).status.code(), Some(2));
}

#[test]
fn eval_invariant_under_reduction() {
    let a = json(&["eval", "--z", "0.3,0.1", "--s", "2", "--M", "500"]);
    let (x, y) = c(&a["reduced"]);
    assert!(x.abs() <= 0.5 && x * x + y * y >= 1.0 - 1e-12);
    let z = format!("{x},{y}");
    let b = json(&["eval", "--z", &z, "--s", "2", "--M", "500"]);
    assert_eq!(a["value"], b["value"]);
    assert_eq!(a["tail_bound"], b["tail_bound"]);
}

#[test]
fn mscan_real_segment() {
    let o = run(&["mscan", "--re", "0.6,2.5,20"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.iter().any(|l| l.starts_with("# seed = 1")));
    assert!(lines.iter().any(|l| l.starts_with("# nx = 24")));
    let header = lines.iter().position(|l| l.starts_with("s_re,")).unwrap();
    assert!(lines[..header].iter().all(|l| l.starts_with('#')));
    let rows: Vec<Vec<&str>> = lines[header + 1..].iter().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 20);
    let mut flagged = 0;
    for r in &rows {
        assert_eq!(r.len(), 10);
        let s: f64 = r[0].parse().unwrap();
        match r[9] {
            "ok" => {
                let err: f64 = r[6].parse().unwrap();
                assert!(err <= 1e-2, "s = {s}: {err}");
            }
            "pole-proximity" => {
                assert!((s - 1.0).abs() < 0.06, "s = {s}");
                flagged += 1;
            }
            other => panic!("s = {s}: {other}"),
        }
    }
    assert_eq!(flagged, 1);
}

#[test]
fn mscan_json_and_strict() {
    let mut args = vec!["mscan", "--s", "2.5,0.75+0.1i", "--seed", "7"];
    args.extend(SMALL);
    let v = json(&args);
    assert_eq!(v["schema"], "eisencont.mscan.v1");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["config"]["grid"]["nx"], 16);
    assert_eq!(v["grid"]["config"]["nx"], 16);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(c(&rows[1]["s"]), (0.75, 0.1));
    for r in rows {
        assert_eq!(r["status"], "ok");
        assert!(r["abs_err"].as_f64().unwrap() < 1e-2);
    }

    let mut args = vec!["mscan", "--s", "1", "--strict"];
    args.extend(SMALL);
    assert_eq!(run(&args).status.code(), Some(1));
    // without --strict a pole row is reported, not fatal
    args.retain(|a| *a != "--strict");
    let o = run(&args);
    assert!(o.status.success());
    assert!(stdout(&o).trim_end().ends_with("pole-proximity"));
}

#[test]
fn mscan_usage_errors() {
    assert_eq!(run(&["mscan"]).status.code(), Some(2));
    assert_eq!(run(&["mscan", "--s", ""]).status.code(), Some(2));
    assert_eq!(run(&["mscan", "--im", "0,1,3"]).status.code(), Some(2));
    assert_eq!(run(&["mscan", "--re", "0,1,0"]).status.code(), Some(2));
    assert_eq!(run(&["mscan", "--s", "1+x"]).status.code(), Some(2));
    assert_eq!(run(&["mscan", "--s", "2", "--nx", "7"]).status.code(), Some(2));
}

#[test]
fn config_file_env_and_overrides() {
    let dir = tmp("cfg");
    let path = dir.join("run.toml");
    std::fs::write(&path, "[grid]\nnx = 20\nny = 40\n\n[continuation]\nseed = 11\n").unwrap();
    let p = path.to_str().unwrap();

    let v = json(&["--config", p, "weyl", "--n", "2", "--p", "1,1", "--q", "2"]);
    assert_eq!((v["config"]["grid"]["nx"].as_u64(), v["seed"].as_u64()), (Some(20), Some(11)));

    let v = json(&["--config", p, "--nx", "22", "--seed", "3", "weyl", "--n", "2", "--p", "1,1", "--q", "2"]);
    assert_eq!(v["config"]["grid"]["nx"], 22);
    assert_eq!(v["config"]["grid"]["ny"], 40);
    assert_eq!(v["seed"], 3);

    let o = Command::new(env!("CARGO_BIN_EXE_eisencont"))
        .args(["weyl", "--n", "2", "--p", "1,1", "--q", "2"])
        .env("EISEN_CONFIG", p)
        .output()
        .unwrap();
    assert!(stdout(&o).contains("# seed = 11"));

    std::fs::write(&path, "[grid]\nnz = 20\n").unwrap();
    let o = run(&["--config", p, "weyl", "--n", "2", "--p", "1,1", "--q", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nz"));
    assert_eq!(run(&["--config", "/nonexistent/run.toml", "weyl", "--n", "1", "--p", "1"]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn out_path_receives_output() {
    let dir = tmp("out");
    let path = dir.join("cosets.json");
    let o = run(&["weyl", "--n", "3", "--p", "2,1", "--q", "2,1", "--json", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["count"], 2);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn weyl_queries() {
    let v = json(&["weyl", "--n", "3", "--p", "1,1,1", "--q", "1,1,1", "--query", "cosets"]);
    assert_eq!(v["schema"], "eisencont.weyl.v1");
    assert_eq!(v["result"].as_array().unwrap().len(), 6);

    let v = json(&["weyl", "--n", "3", "--p", "2,1", "--q", "1,2", "--query", "omega"]);
    let r = v["result"].as_array().unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["perm"], serde_json::json!([1, 2, 0]));

    assert_eq!(json(&["weyl", "--n", "3", "--p", "2,1", "--q", "1,1,1", "--query", "omega"])["count"], 0);
    assert_eq!(json(&["weyl", "--n", "4", "--p", "2,2", "--query", "delta-p"])["count"], 1);
    assert_eq!(json(&["weyl", "--n", "4", "--p", "2,1,1", "--query", "simple-roots"])["count"], 1);
    let text = stdout(&run(&["weyl", "--n", "3", "--p", "2,1", "--query", "delta-p"]));
    assert!(text.contains("<alpha, alpha^vee> = 3/2"), "{text}");

    for bad in [
        vec!["weyl", "--n", "3", "--p", "2,2", "--q", "1,2"],
        vec!["weyl", "--n", "3", "--p", "2,0,1", "--q", "1,2"],
        vec!["weyl", "--n", "3", "--p", "a", "--q", "1,2"],
        vec!["weyl", "--n", "3", "--p", "2,1", "--query", "cosets"],
        vec!["weyl", "--n", "3", "--p", "2,1", "--q", "1,2", "--query", "levi"],
    ] {
        assert_eq!(run(&bad).status.code(), Some(2), "{bad:?}");
    }
}

#[test]
fn engine_demos() {
    let v = json(&["engine-demo", "rank1"]);
    assert_eq!(v["schema"], "eisencont.engine-demo.v1");
    assert_eq!(v["exact"]["denominator"], serde_json::json!(["1"]));
    assert_eq!(v["exact"]["numerators"], serde_json::json!([["0", "1"]]));
    assert!(v["poles"].as_array().unwrap().is_empty());
    for sample in v["numeric"]["samples"].as_array().unwrap() {
        let (s, val) = (c(&sample["s"]), c(&sample["value"][0]));
        assert!((s.0 - val.0).abs() < 1e-12 && (s.1 - val.1).abs() < 1e-12);
    }

    let v = json(&["engine-demo", "twobytwo"]);
    let mut poles: Vec<(f64, f64)> = v["poles"].as_array().unwrap().iter().map(|p| c(&p["s"])).collect();
    poles.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert_eq!(poles.len(), 2);
    assert!((poles[0].0 + 1.0).abs() < 1e-12 && (poles[1].0 - 1.0).abs() < 1e-12);
    assert!(v["poles"].as_array().unwrap().iter().all(|p| p["removable"] == false));
    assert!(v["max_rel_gap"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["uniqueness_certified"], true);

    let text = stdout(&run(&["engine-demo", "rational3"]));
    assert!(text.contains("common denominator: s^3 - 2s^2 + s - 2"), "{text}");
    assert!(text.contains("denominator factorisation: (s - 2) (s^2 + 1)"), "{text}");
    let v = json(&["engine-demo", "rational3"]);
    assert_eq!(v["exact"]["denominator"], serde_json::json!(["-2", "1", "-2", "1"]));
    assert_eq!(v["poles"].as_array().unwrap().len(), 3);

    assert_eq!(run(&["engine-demo", "rank7"]).status.code(), Some(2));
}
