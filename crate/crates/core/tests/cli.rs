use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use llb::experiment::{read_monitors, PLOT_FILES};

fn llb(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_llb"));
    cmd.args(args).env_remove("LLB_OUT_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const ZERO: &str = r#"{"kind": "solve", "grid": {"n": 16}, "params": {"kappa": 1, "mu": 1},
    "initial": {"profile": "constant", "value": [0, 0, 0]}, "horizon": 1, "solver": {"dt": 0.25}}"#;

#[test]
fn zero_data_solve_and_plot() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "zero.json", ZERO);
    let out = tmp.path().join("run");
    assert_eq!(code(&llb(&["solve", "--config", s(&cfg), "--out", s(&out)], &[])), 0);
    let rows = read_monitors(&out.join("monitors.csv")).unwrap();
    assert_eq!(rows.len(), 5);
    for r in &rows {
        let v = r.values();
        for (i, x) in v.iter().enumerate().skip(1) {
            let expect = if i == 8 { 1.0 } else { 0.0 };
            assert_eq!(*x, expect, "column {i}");
        }
    }
    for f in ["config.json", "summary.json", "checkpoints/000000.llbs", "checkpoints/000004.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(code(&llb(&["plot", "--config", s(&cfg), "--out", s(&out)], &[])), 0);
    let svgs: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".svg"))
        .collect();
    let mut want: Vec<String> = PLOT_FILES.iter().map(|f| f.to_string()).collect();
    let mut got = svgs.clone();
    want.sort();
    got.sort();
    assert_eq!(got, want);
    let first = fs::read(out.join(PLOT_FILES[0])).unwrap();
    assert!(!first.is_empty());
    assert_eq!(code(&llb(&["plot", "--config", s(&cfg), "--out", s(&out)], &[])), 0);
    assert_eq!(fs::read(out.join(PLOT_FILES[0])).unwrap(), first);
}

#[test]
fn config_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.json", &ZERO.replace("\"mu\": 1", "\"mu\": 1, \"delta2\": 3"));
    let o = llb(&["solve", "--config", s(&bad)], &[]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("params"));
    let suite = write(tmp.path(), "suite.json", r#"{"kind": "verify", "grid": {"n": 32}, "suite": {"name": "nope"}}"#);
    let o = llb(&["verify", "--config", s(&suite)], &[]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bernstein"));
    let zero = write(tmp.path(), "zero.json", ZERO);
    assert_eq!(code(&llb(&["verify", "--config", s(&zero)], &[])), 1);
    let empty = tmp.path().join("empty");
    assert_eq!(code(&llb(&["plot", "--config", s(&zero), "--out", s(&empty)], &[])), 1);
}

#[test]
fn divergence_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "big.json",
        &ZERO
            .replace("[0, 0, 0]", "[100, 0, 0]")
            .replace("\"dt\": 0.25", "\"dt\": 0.1, \"max_halvings\": 2"),
    );
    let out = tmp.path().join("run");
    assert_eq!(code(&llb(&["solve", "--config", s(&cfg), "--out", s(&out)], &[])), 2);
    let summary = fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(summary.contains("\"diverged\""));
}

#[test]
fn out_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "zero.json", ZERO);
    let root = tmp.path().join("root");
    assert_eq!(code(&llb(&["solve", "--config", s(&cfg)], &[("LLB_OUT_DIR", &root)])), 0);
    assert!(root.join("zero").join("monitors.csv").exists());
}

#[test]
fn verify_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "b.json",
        r#"{"kind": "verify", "grid": {"n": 16}, "seed": 7, "suite": {"name": "bernstein", "samples": 50}}"#,
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&llb(&["verify", "--config", s(&cfg), "--out", s(&a)], &[])), 0);
    assert_eq!(code(&llb(&["verify", "--config", s(&cfg), "--out", s(&b)], &[])), 0);
    let va = fs::read(a.join("verdicts.jsonl")).unwrap();
    assert!(!va.is_empty());
    assert_eq!(va, fs::read(b.join("verdicts.jsonl")).unwrap());
    let c = tmp.path().join("c");
    assert_eq!(code(&llb(&["verify", "--config", s(&cfg), "--out", s(&c), "--seed", "8"], &[])), 0);
    assert_ne!(va, fs::read(c.join("verdicts.jsonl")).unwrap());
}

#[test]
fn sweep_and_stability() {
    let tmp = tempfile::tempdir().unwrap();
    let sweep = write(
        tmp.path(),
        "sweep.json",
        r#"{"kind": "sweep-smallness", "grid": {"n": 16}, "params": {"kappa": 1, "mu": 1, "cutoff_n": 4},
            "initial": {"profile": "two-mode", "k": [[1, 0, 0], [0, 1, 1]], "amplitude": 1},
            "horizon": 1, "solver": {"dt": 0.05}, "sweep": {"amplitudes": [1e-4, 1e-3, 1e-2]}}"#,
    );
    let out = tmp.path().join("sweep");
    assert_eq!(code(&llb(&["sweep-smallness", "--config", s(&sweep), "--out", s(&out), "--workers", "2"], &[])), 0);
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().nth(1).unwrap().contains(",decayed,"));
    for i in 0..3 {
        assert!(out.join(format!("point_{i:02}")).join("summary.json").exists());
    }
    let stab = write(
        tmp.path(),
        "stab.json",
        r#"{"kind": "stability", "grid": {"n": 16}, "params": {"kappa": 1, "mu": 1, "cutoff_n": 4},
            "initial": {"profile": "random-band", "j_lo": 0, "j_hi": 1, "amplitude": 0.01},
            "horizon": 0.5, "solver": {"dt": 0.05}, "stability": {"scale": 1e-6}}"#,
    );
    let out = tmp.path().join("stab");
    assert_eq!(code(&llb(&["stability", "--config", s(&stab), "--out", s(&out)], &[])), 0);
    assert!(out.join("stability.csv").exists());
}

#[test]
fn blowup_watch_forces_monitor() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "bw.json",
        r#"{"kind": "blowup-watch", "grid": {"n": 16}, "params": {"kappa": 1, "mu": 1},
            "initial": {"profile": "single-mode", "k": [1, 0, 0], "amplitude": 0.1, "component": 2},
            "horizon": 0.5, "solver": {"dt": 0.05, "monitors": {"blowup": false}}}"#,
    );
    let out = tmp.path().join("bw");
    assert_eq!(code(&llb(&["blowup-watch", "--config", s(&cfg), "--out", s(&out)], &[])), 0);
    let rows = read_monitors(&out.join("monitors.csv")).unwrap();
    assert!(rows.iter().all(|r| r.blowup_integrand.is_finite() && r.blowup_integrand > 0.0));
    let summary = fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(summary.contains("\"blowup\""));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        llb::experiment::load_config(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        n += 1;
    }
    assert_eq!(n, 5);
}
