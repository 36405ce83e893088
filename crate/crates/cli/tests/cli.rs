use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn toy() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances/toy.toml")
}

fn iesplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iesplan")).args(args).env_remove("IESPLAN_SOLVER").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let i = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[i].to_string()).collect()
}

fn total_cost(dir: &Path) -> f64 {
    let text = fs::read_to_string(dir.join("costs.toml")).unwrap();
    let v: toml::Value = toml::from_str(&text).unwrap();
    v["costs"]["total"].as_float().unwrap()
}

#[test]
fn validate_accepts_the_toy() {
    let o = iesplan(&["validate", "--instance", toy().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_instance_exits_one_with_a_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "name = 3").unwrap();
    let o = iesplan(&["plan", "--instance", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("INSTANCE_PARSE"));

    let text = fs::read_to_string(toy()).unwrap().replace("typical_day_weights = [365.0]", "typical_day_weights = [300.0]");
    fs::write(&bad, text).unwrap();
    let o = iesplan(&["validate", "--instance", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("HORIZON_WEIGHTS"));
}

#[test]
fn bad_flags_exit_one() {
    assert_eq!(code(&iesplan(&["plan", "--no-such-flag"])), 1);
    assert_eq!(code(&iesplan(&["plan"])), 1);
    let t = toy();
    let t = t.to_str().unwrap();
    assert_eq!(code(&iesplan(&["plan", "--instance", t, "--mode", "n1", "--inner", "kkt"])), 1);
    assert_eq!(code(&iesplan(&["sweep", "--instance", t, "--values", "3,1"])), 1);
    assert_eq!(code(&iesplan(&["compare", "--instance", t, "--modes", "robust"])), 1);
    assert_eq!(code(&iesplan(&["--help"])), 0);
}

#[test]
fn unknown_backend_is_an_input_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_iesplan"))
        .args(["plan", "--instance", toy().to_str().unwrap(), "--mode", "deterministic"])
        .env("IESPLAN_SOLVER", "nonexistent")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn deterministic_plan_writes_its_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("det");
    let o = iesplan(&["plan", "--instance", toy().to_str().unwrap(), "--mode", "deterministic", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["plan.toml", "costs.toml", "outer_trace.csv", "inner_trace.csv", "dispatch.csv", "manifest.toml"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
}

#[test]
fn robust_trace_has_monotone_lower_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rob");
    let o = iesplan(&[
        "plan", "--instance", toy().to_str().unwrap(), "--mode", "robust", "--inner", "sd", "--gamma-d", "2", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let lower: Vec<f64> = column(&out.join("outer_trace.csv"), "lower").iter().map(|s| s.parse().unwrap()).collect();
    assert!(lower.len() >= 2);
    assert!(lower.windows(2).all(|w| w[1] >= w[0]));
    assert!(!column(&out.join("inner_trace.csv"), "binaries").is_empty());
}

#[test]
fn tiny_time_limit_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rob");
    let o = iesplan(&["plan", "--instance", toy().to_str().unwrap(), "--time-limit", "0.000001", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let costs = fs::read_to_string(out.join("costs.toml")).unwrap();
    assert!(costs.contains("time-limit"));
}

#[test]
fn zero_budget_sweep_matches_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let t = toy();
    let t = t.to_str().unwrap();
    let sw = dir.path().join("sw");
    let o = iesplan(&["sweep", "--instance", t, "--gamma-l", "0", "--values", "0", "--out", sw.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let det = dir.path().join("det");
    iesplan(&["plan", "--instance", t, "--mode", "deterministic", "--out", det.to_str().unwrap()]);
    let cost: Vec<f64> = column(&sw.join("sweep.csv"), "total_cost").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(cost.len(), 1);
    let d = total_cost(&det);
    assert!((cost[0] - d).abs() <= 1e-6 * d, "{} vs {d}", cost[0]);
}

#[test]
fn sweep_cost_is_non_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    let sw = dir.path().join("sw");
    let o = iesplan(&["sweep", "--instance", toy().to_str().unwrap(), "--values", "0,2,4", "--out", sw.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cost: Vec<f64> = column(&sw.join("sweep.csv"), "total_cost").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(cost.len(), 3);
    assert!(cost.windows(2).all(|w| w[1] >= w[0] - 1e-6), "{cost:?}");
    assert!(sw.join("gamma_d-2/plan.toml").exists());
}

#[test]
fn identical_modes_give_identical_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let o = iesplan(&[
        "compare", "--instance", toy().to_str().unwrap(), "--modes", "deterministic,deterministic", "--years", "3", "--seed", "11",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("compare.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    let strip = |l: &str| l.split(',').enumerate().filter(|(i, _)| *i != 3).map(|(_, s)| s.to_string()).collect::<Vec<_>>();
    assert_eq!(strip(lines[1]), strip(lines[2]));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!("instance = {:?}\nmode = \"deterministic\"\nseed = 5\nyears = 2\nout = {:?}\n", toy().to_str().unwrap(), out.to_str().unwrap()),
    )
    .unwrap();
    let o = iesplan(&["--config", cfg.to_str().unwrap(), "assess", "--seed", "9"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 9"));
    assert_eq!(column(&out.join("reliability.csv"), "years")[0], "2");
    assert!(fs::read_to_string(out.join("costs.toml")).unwrap().contains("deterministic"));
}

#[test]
fn assess_reads_a_written_plan() {
    let dir = tempfile::tempdir().unwrap();
    let t = toy();
    let t = t.to_str().unwrap();
    let det = dir.path().join("det");
    iesplan(&["plan", "--instance", t, "--mode", "deterministic", "--out", det.to_str().unwrap()]);
    let plan = det.join("plan.toml");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = iesplan(&["assess", "--instance", t, "--plan", plan.to_str().unwrap(), "--years", "3", "--seed", "4", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read_to_string(a.join("reliability.csv")).unwrap(), fs::read_to_string(b.join("reliability.csv")).unwrap());
}

#[test]
fn models_are_dumped_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("lp");
    let o = iesplan(&[
        "plan", "--instance", toy().to_str().unwrap(), "--mode", "deterministic", "--out", dir.path().join("o").to_str().unwrap(),
        "--dump-models", dump.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(fs::read_dir(&dump).unwrap().count() >= 1);
}
