use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_refrig-imc"))
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const BASELINE_PAIR: &str = r#"[
  {"k": -62.5, "tau_i": 31.0, "u_min": 10, "u_max": 90},
  {"k": 6.25, "tau_i": 3.0, "u_min": 30, "u_max": 50}
]"#;

#[test]
fn rga_defaults_print_published_diagonal_pairing() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["rga", "-q"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(
        text.contains("Published pairing (used for control): Te_sec_out <- Av, Tsh <- N_comp"),
        "{text}"
    );
    let rec = json(&dir.path().join("refrig-imc-out/rga.json"));
    assert_eq!(rec["published_input_for_output"], serde_json::json!([0, 1]));
    assert!((rec["rga"][0][0].as_f64().unwrap() - 0.0694).abs() < 1e-3);
}

#[test]
fn rga_missing_plant_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["rga", "--plant", "nowhere/plant.json"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("nowhere/plant.json"), "{}", stderr(&o));
}

#[test]
fn rga_singular_plant_fails() {
    let dir = tempfile::tempdir().unwrap();
    let ch = r#"{"domain":"continuous","num":[2],"den":[1,5]}"#;
    let plant = format!(r#"{{"g11":{ch},"g12":{ch},"g21":{ch},"g22":{ch}}}"#);
    std::fs::write(dir.path().join("p.json"), plant).unwrap();
    let o = run(&["rga", "--plant", "p.json"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("singular"), "{}", stderr(&o));
}

#[test]
fn rga_identified_plant_reports_ill_conditioned_channel() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "rga",
            "--plant",
            data("identified_plant.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("ill-conditioned"), "{}", stderr(&o));
}

#[test]
fn tune_scales_gain_with_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["tune", "-q", "--lambda11", "0.2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rec = json(&dir.path().join("refrig-imc-out/tune.json"));
    let k1 = rec["controllers"][0]["k"].as_f64().unwrap();
    let k2 = rec["controllers"][1]["k"].as_f64().unwrap();
    assert!((k1 - (31.0 + 3e-5) / (0.2 * -0.016)).abs() < 1e-6 * k1.abs());
    assert!((k2 - 187.50000625).abs() < 1e-6);
}

#[test]
fn simulate_then_report_matches_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "-q", "--out", "a"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(
        &[
            "report",
            "-q",
            "--out",
            "a",
            "--candidate",
            "a/sim_candidate.csv",
            "--baseline",
            "a/sim_baseline.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&["pipeline", "-q", "--out", "b"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let read = |p: &str| std::fs::read(dir.path().join(p)).unwrap();
    assert_eq!(read("a/report.csv"), read("b/report.csv"));
    assert_eq!(read("a/sim_candidate.csv"), read("b/sim_candidate.csv"));
    assert!(dir.path().join("b/run-manifest.json").exists());
}

#[test]
fn report_rejects_mismatched_runs() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["simulate", "-q", "--out", "a"], dir.path())
        .status
        .success());
    assert!(
        run(&["simulate", "-q", "--out", "b", "--ts", "0.5"], dir.path())
            .status
            .success()
    );
    let o = run(
        &[
            "report",
            "--candidate",
            "a/sim_candidate.csv",
            "--baseline",
            "b/sim_baseline.csv",
        ],
        dir.path(),
    );
    assert!(!o.status.success());
}

#[test]
fn pipeline_candidate_equal_to_baseline_gives_unit_j() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(r#"{{"candidate": {BASELINE_PAIR}, "out": "run"}}"#);
    std::fs::write(dir.path().join("cfg.json"), cfg).unwrap();
    let o = run(&["pipeline", "-q", "--config", "cfg.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rec = json(&dir.path().join("run/report.json"));
    assert_eq!(rec["j"].as_f64(), Some(1.0));
    assert!(rec["ratios"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r.as_f64() == Some(1.0)));
    assert!(stdout(&o)
        .lines()
        .any(|l| l.starts_with('J') && l.contains("1.0000")));
}

#[test]
fn pipeline_small_sweep_writes_nine_rows_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"sweep": {"enabled": true, "grid": {"start": 0.1, "step": 0.2, "count": 3}}, "out": "run"}"#;
    std::fs::write(dir.path().join("cfg.json"), cfg).unwrap();
    let o = run(
        &["pipeline", "-q", "--config", "cfg.json", "--threads", "2"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let surface = std::fs::read_to_string(dir.path().join("run/sweep_J.csv")).unwrap();
    assert_eq!(surface.lines().count(), 10);
    assert_eq!(surface.lines().next(), Some("lambda11,lambda22,value"));
    let first = std::fs::read(dir.path().join("run/sweep_RIAE2.csv")).unwrap();
    let o = run(
        &["pipeline", "-q", "--config", "cfg.json", "--threads", "1"],
        dir.path(),
    );
    assert!(o.status.success());
    assert_eq!(
        std::fs::read(dir.path().join("run/sweep_RIAE2.csv")).unwrap(),
        first
    );
    let manifest = json(&dir.path().join("run/run-manifest.json"));
    assert!(manifest["created_unix_s"].as_u64().unwrap() > 0);
    assert!(manifest["artifacts"].as_array().unwrap().len() > 10);
}

#[test]
fn sweep_thread_counts_agree_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"sweep": {"grid": {"lambda11": [0.05, 0.3], "lambda22": [0.1, 0.2, 0.4]}}}"#;
    std::fs::write(dir.path().join("cfg.json"), cfg).unwrap();
    for (t, out) in [("1", "one"), ("4", "four")] {
        let o = run(
            &[
                "sweep",
                "-q",
                "--config",
                "cfg.json",
                "--threads",
                t,
                "--out",
                out,
                "--svg",
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in [
        "sweep_J.csv",
        "sweep_RIAVU1.csv",
        "sweep_summary.json",
        "sweep_J.svg",
    ] {
        let a = std::fs::read(dir.path().join("one").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("four").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn thread_cap_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"sweep": {"grid": {"lambda11": [0.1], "lambda22": [0.1]}}}"#;
    std::fs::write(dir.path().join("cfg.json"), cfg).unwrap();
    let o = bin()
        .args(["sweep", "-q", "--config", "cfg.json"])
        .env("REFRIG_IMC_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(!o.status.success());
    let o = bin()
        .args(["sweep", "-q", "--config", "cfg.json"])
        .env("REFRIG_IMC_THREADS", "2")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"lamda": "table3"}"#).unwrap();
    let o = run(&["tune", "--config", "cfg.json"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cfg.json"));
}

#[test]
fn shipped_project_file_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "tune",
            "-q",
            "--config",
            data("project.json").to_str().unwrap(),
            "--out",
            "x",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("x/tune.csv").exists());
}

#[test]
fn reduce_writes_both_step_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reduce", "-q", "--svg"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let g11 = std::fs::read_to_string(dir.path().join("refrig-imc-out/step_g11.csv")).unwrap();
    let g22 = std::fs::read_to_string(dir.path().join("refrig-imc-out/step_g22.csv")).unwrap();
    assert_eq!(g11.lines().count(), 302);
    assert_eq!(g22.lines().count(), 62);
    assert!(dir.path().join("refrig-imc-out/step_g11.svg").exists());
}
