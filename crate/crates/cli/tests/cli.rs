use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hjhalf_core::limiter::SetLimiter;
use hjhalf_core::presets::preset;
use hjhalf_core::PiecewiseLinear;

fn hjhalf(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hjhalf")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

#[test]
fn limiter_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = hjhalf(&["limiter", "--hamiltonian", "W", "--flux", "linear", "--out", "o"], dir.path());
    assert_eq!(code(&o), 0, "{}", text(&o));
    let out = dir.path().join("o");
    let a = SetLimiter::from_csv_str(&fs::read_to_string(out.join("limiter.csv")).unwrap()).unwrap();
    assert_eq!(a.len(), 2);
    assert_eq!((a.points()[0].p_minus, a.points()[0].p_plus, a.points()[0].level), (-1.5, 0.5, 0.5));
    let flux = PiecewiseLinear::read_csv(out.join("effective_flux.csv")).unwrap();
    assert_eq!(flux.eval(0.0), 0.5);
    assert_eq!(PiecewiseLinear::from_csv_str(&flux.to_csv()).unwrap(), flux);
    assert!(fs::read_to_string(out.join("report.txt")).unwrap().contains("sandwich (10000 samples): pass"));
}

#[test]
fn function_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    preset("V").unwrap().write_csv(dir.path().join("h.csv")).unwrap();
    fs::write(dir.path().join("run.toml"), "hamiltonian = \"h.csv\"\nflux = \"asymF\"\nout_dir = \"res\"\n").unwrap();
    let o = hjhalf(&["limiter", "--config", "run.toml"], dir.path());
    assert_eq!(code(&o), 0, "{}", text(&o));
    assert!(dir.path().join("res/limiter.csv").is_file());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "hamiltonian = \"Z\"\n[grid]\ndx = -1.0\n").unwrap();
    let o = hjhalf(&["solve", "--config", "bad.toml"], dir.path());
    assert_eq!(code(&o), 2);
    let msg = text(&o);
    assert!(msg.contains("grid.dx must be positive") && msg.contains("available presets"), "{msg}");
    let o = hjhalf(&["testfn", "--flux", "staircaseF", "--out", "t"], dir.path());
    assert_eq!(code(&o), 2, "{}", text(&o));
}

#[test]
fn testfn_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.toml"), "flux = \"linear\"\n[testfn]\nt_max = 10.0\nsamples = 64\n").unwrap();
    let o = hjhalf(&["testfn", "--config", "t.toml", "--out", "t"], dir.path());
    assert_eq!(code(&o), 0, "{}", text(&o));
    let out = dir.path().join("t");
    for name in ["E.csv", "f.csv", "g.csv", "phi_check.txt"] {
        assert!(out.join(name).is_file(), "{name}");
    }
    let f = fs::read_to_string(out.join("f.csv")).unwrap();
    let at_one = f.lines().skip(1).find_map(|l| l.strip_prefix("1,")).expect("row at t = 1");
    assert!((at_one.parse::<f64>().unwrap() - 0.5).abs() <= 1e-6, "f(1) = {at_one}");
}

#[test]
fn solve_and_converge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "hamiltonian = \"W\"\nflux = \"linear\"\n[grid]\ndx = 0.015625\ncfl = 0.25\nt_final = 0.5\n\
               [initial]\nslope = -2.0\n[solve]\nboundary = \"effective\"\n[converge]\ndx = [0.05, 0.025, 0.0125]\n";
    fs::write(dir.path().join("s.toml"), cfg).unwrap();
    let o = hjhalf(&["solve", "--config", "s.toml", "--out", "s"], dir.path());
    assert_eq!(code(&o), 0, "{}", text(&o));
    let sol = fs::read_to_string(dir.path().join("s/solution.csv")).unwrap();
    let mut rows = 0;
    for line in sol.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((v[2] + 2.0 * v[1] + v[0]).abs() <= 1e-12, "{line}");
        rows += 1;
    }
    assert!(rows > 0);
    let meta = fs::read_to_string(dir.path().join("s/meta.txt")).unwrap();
    assert!(meta.contains("dt = 0.00390625") && meta.contains("sigma = 1"), "{meta}");

    let o = hjhalf(&["converge", "--config", "s.toml", "--out", "c", "--flux", "linear"], dir.path());
    assert_eq!(code(&o), 0, "{}", text(&o));
    let rates = fs::read_to_string(dir.path().join("c/rates.csv")).unwrap();
    assert_eq!(rates.lines().count(), 4);
    assert!(rates.starts_with("dx,D,order\n0.05,"));
}

#[test]
fn verify_is_deterministic_and_detects_sabotage() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("v.toml"), "[testfn]\nsamples = 64\n[verify]\ninstances = 10\n").unwrap();
    let run = |out: &str, extra: &[&str]| {
        let mut args = vec!["verify", "--config", "v.toml", "--seed", "7", "--out", out];
        args.extend_from_slice(extra);
        let o = hjhalf(&args, dir.path());
        (code(&o), fs::read(dir.path().join(out).join("verify.json")).unwrap())
    };
    let (c1, a) = run("a", &[]);
    let (c2, b) = run("b", &[]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);

    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let ids: Vec<&str> = report["properties"].as_array().unwrap().iter().map(|p| p["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);

    let (c3, broken) = run("x", &["--break", "sandwich"]);
    assert_eq!(c3, 1);
    let report: serde_json::Value = serde_json::from_slice(&broken).unwrap();
    let failed: Vec<&str> = report["properties"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["passed"] == false)
        .map(|p| p["id"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["limiter.sandwich"]);
}
