use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const UNIFORM: &str = r#"{
  "weighting": {"kind": "uniform"},
  "controller": {"gamma_d": 0.3, "lambda": 0.5, "w0": 0.0}
}"#;

const BUTTERFLY: &str = r#"{
  "weighting": {"kind": "butterfly"},
  "controller": {"gamma_d": {"fraction": 0.6}}
}"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_preisach"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\n{}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn all_finite(path: &Path) -> bool {
    read_csv(path)
        .iter()
        .flatten()
        .filter_map(|c| c.parse::<f64>().ok())
        .all(f64::is_finite)
}

#[test]
fn bounds_uniform_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", UNIFORM);
    let o = run(&["bounds"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(num(&v, "gamma2_plus_q"), 2.0);
    assert_eq!(num(&v, "max_gain"), 1.0);
    let file: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/bounds.json")).unwrap()).unwrap();
    assert_eq!(file, v);
}

#[test]
fn bounds_butterfly_finite() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", BUTTERFLY);
    let o = run(&["bounds"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    for key in [
        "gamma1_plus",
        "gamma2_plus",
        "gamma1_minus",
        "gamma2_minus",
        "gamma2_plus_q",
        "gamma1_minus_q",
    ] {
        assert!(num(&v, key).is_finite());
    }
    assert!(num(&v, "gamma_max") > num(&v, "gamma_min"));
}

#[test]
fn zero_grid_is_degenerate() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "zero.csv", "-1,1,-1,1,2,2\n0,0\n0,0\n");
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"weighting": {"kind": "grid", "path": "zero.csv"}}"#,
    );
    let o = run(&["bounds"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn control_uniform_deadbeat() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", UNIFORM);
    let out = dir.path().join("out");
    let o = run(&["control"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["converged"], Value::Bool(true));
    let trace = read_csv(&out.join("trace.csv"));
    // converged at k = 1
    assert_eq!(trace.len(), 2);
    assert_eq!(trace[1][0], "1");
    assert!(trace[1][3].parse::<f64>().unwrap().abs() <= 1e-12);
}

#[test]
fn control_butterfly_error_nonincreasing() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", BUTTERFLY);
    let out = dir.path().join("out");
    let o = run(&["control"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0));
    let errors: Vec<f64> = read_csv(&out.join("trace.csv"))
        .iter()
        .map(|r| r[3].parse().unwrap())
        .collect();
    assert!(errors.len() <= 200);
    for w in errors.windows(2) {
        assert!(w[1].abs() <= w[0].abs() + 1e-12, "{errors:?}");
    }
    let header = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(header.starts_with("k,w_k,gamma_k,e_k,clamped\n"));
    let signal = fs::read_to_string(out.join("signal.csv")).unwrap();
    assert!(signal.starts_with("t,u,y\n"));
    for f in ["trace.csv", "signal.csv"] {
        assert!(all_finite(&out.join(f)));
    }
}

#[test]
fn target_out_of_range_is_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"weighting": {"kind": "uniform"}, "controller": {"gamma_d": 5.0}}"#,
    );
    let o = run(&["control"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside"));
}

#[test]
fn max_pulses_exit_code_still_writes_trace() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"weighting": {"kind": "butterfly"}, "controller": {"lambda": 0.01, "max_pulses": 3}}"#,
    );
    let out = dir.path().join("out");
    let o = run(&["control"], &cfg, &out);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(read_csv(&out.join("trace.csv")).len(), 3);
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "max_pulses");
}

#[test]
fn oracle_check_uniform() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", UNIFORM);
    let o = run(&["oracle-check"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(num(&v, "n_coarse"), 150.0);
    assert!(num(&v, "deviation_fine") <= 0.01);
    assert!(num(&v, "deviation_coarse") >= 1.5 * num(&v, "deviation_fine"));
}

#[test]
fn oracle_check_butterfly_and_mismatch() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", BUTTERFLY);
    let o = run(&["oracle-check"], &cfg, &dir.path().join("a"));
    assert_eq!(o.status.code(), Some(0));
    assert!(num(&stdout_json(&o), "deviation_fine") <= 0.01);
    let coarse = Command::new(env!("CARGO_BIN_EXE_preisach"))
        .args(["oracle-check", "--oracle-n", "4", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("b"))
        .output()
        .unwrap();
    assert_eq!(coarse.status.code(), Some(5));
    assert!(dir.path().join("b/oracle.csv").exists());
}

#[test]
fn simulate_plan() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"weighting": {"kind": "uniform"}, "plan": [0.75, 0.25, -0.5], "tau": 1.0, "sample_step": 0.1}"#,
    );
    let out = dir.path().join("out");
    let o = run(&["simulate"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0));
    let rows = read_csv(&out.join("remnants.csv"));
    let gammas: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    // 0.75 leaves a shelf worth 0.75, the dead-zone pulse keeps it, -0.5 trims a half row
    assert!((gammas[0] - 0.5).abs() < 1e-12);
    assert!((gammas[1] - 0.5).abs() < 1e-12);
    assert!((gammas[2] - (-0.25)).abs() < 1e-12, "{gammas:?}");
    // t = 0 plus 10 samples per pulse
    assert_eq!(read_csv(&out.join("signal.csv")).len(), 31);
    let no_plan = write(dir.path(), "d.json", r#"{"weighting": {"kind": "uniform"}}"#);
    assert_eq!(run(&["simulate"], &no_plan, &out).status.code(), Some(2));
}

#[test]
fn identical_config_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"weighting": {"kind": "butterfly"},
            "sweep": {"parameter": "gamma_fraction", "random": {"count": 4, "low": 0.1, "high": 0.9}},
            "seed": 11}"#,
    );
    for cmd in ["control", "sweep"] {
        let (a, b) = (
            dir.path().join(format!("{cmd}_a")),
            dir.path().join(format!("{cmd}_b")),
        );
        let oa = run(&[cmd], &cfg, &a);
        let ob = run(&[cmd], &cfg, &b);
        assert_eq!(oa.status.code(), Some(0));
        assert_eq!(oa.stdout, ob.stdout);
        let files = |d: &Path| {
            let mut v: Vec<PathBuf> = walk(d);
            v.sort();
            v
        };
        let (fa, fb) = (files(&a), files(&b));
        assert_eq!(fa.len(), fb.len());
        assert!(!fa.is_empty());
        for (x, y) in fa.iter().zip(&fb) {
            assert_eq!(x.strip_prefix(&a).unwrap(), y.strip_prefix(&b).unwrap());
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
            if x.extension().is_some_and(|e| e == "csv") {
                assert!(all_finite(x));
            }
        }
    }
    let sweep = read_csv(&dir.path().join("sweep_a/sweep.csv"));
    assert_eq!(sweep.len(), 4);
    assert!(dir.path().join("sweep_a/run_003/trace.csv").exists());
}

fn walk(d: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(d).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn seed_flag_changes_random_sweep() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"weighting": {"kind": "uniform"},
            "sweep": {"parameter": "gamma_fraction", "random": {"count": 3, "low": 0.1, "high": 0.9}}}"#,
    );
    let a = run(&["sweep"], &cfg, &dir.path().join("a"));
    assert_eq!(a.status.code(), Some(0));
    let b = Command::new(env!("CARGO_BIN_EXE_preisach"))
        .args(["sweep", "--seed", "99", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("b"))
        .output()
        .unwrap();
    assert_eq!(b.status.code(), Some(0));
    let values = |d: &str| -> Vec<String> {
        read_csv(&dir.path().join(d).join("sweep.csv"))
            .iter()
            .map(|r| r[1].clone())
            .collect()
    };
    assert_ne!(values("a"), values("b"));
}

#[test]
fn missing_or_broken_config() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_preisach"))
        .arg("bounds")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let cfg = write(dir.path(), "c.json", "{not json");
    assert_eq!(
        run(&["bounds"], &cfg, &dir.path().join("o")).status.code(),
        Some(2)
    );
    let missing = dir.path().join("nope.json");
    assert_eq!(
        run(&["bounds"], &missing, &dir.path().join("o")).status.code(),
        Some(2)
    );
    let bad_override = Command::new(env!("CARGO_BIN_EXE_preisach"))
        .args(["bounds", "--resolution", "1", "--config"])
        .arg(write(dir.path(), "u.json", UNIFORM))
        .output()
        .unwrap();
    assert_eq!(bad_override.status.code(), Some(2));
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for e in fs::read_dir(&root).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "json") {
            let cfg = preisach_cli::ExperimentConfig::load(&p).unwrap();
            cfg.resolve().unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 5);
}

#[test]
fn config_fuzz_seeds_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/config_json");
    let mut n = 0;
    for e in fs::read_dir(&dir).unwrap() {
        let text = fs::read_to_string(e.unwrap().path()).unwrap();
        let cfg = preisach_cli::ExperimentConfig::from_json(&text).unwrap();
        cfg.resolve().unwrap();
        n += 1;
    }
    assert!(n >= 5);
}
