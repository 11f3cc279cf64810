use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mhd_lab::csvio::{column, parse_csv, ENERGY_COLUMNS};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mhd-lab"));
    c.env_remove("MHD_LAB_THREADS");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, edit: impl Fn(&str) -> Option<String>) -> PathBuf {
    let text = fs::read_to_string(configs().join("zero_forcing.cfg")).unwrap();
    let out: Vec<String> = text.lines().filter_map(&edit).collect();
    let path = dir.join("case.cfg");
    fs::write(&path, out.join("\n")).unwrap();
    path
}

#[test]
fn identities_pass_and_write_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ids.csv");
    let o = run(bin().args(["identities", "--seed", "3", "--draws", "20", "--out"]).arg(&csv));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
    let (h, rows) = parse_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(h, ["identity", "status", "checked", "failures", "worst", "tol"]);
    assert!(rows.iter().all(|r| r[1] == "PASS"));
    assert!(rows.iter().any(|r| r[0] == "matrix form matches expanded form"));
}

#[test]
fn zero_draws_is_a_successful_empty_run() {
    let o = run(bin().args(["identities", "--draws", "0"]));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn injected_fault_fails_with_exit_1_and_names_the_draw() {
    let o = run(bin().args(["identities", "--draws", "5", "--inject-fault"]));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL symmetry"), "{}", stdout(&o));
    assert!(stderr(&o).contains("draw"), "{}", stderr(&o));
}

#[test]
fn missing_key_is_a_config_error_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), |l| (!l.starts_with("grid.dt")).then(|| l.to_string()));
    let o = run(bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ConfigError"), "{}", stderr(&o));
    assert!(stderr(&o).contains("grid.dt"), "{}", stderr(&o));
    assert!(!dir.path().join("energy.csv").exists());
}

#[test]
fn unreadable_config_and_bad_flags_exit_2() {
    let o = run(bin().args(["run", "--config", "/nonexistent/case.cfg"]));
    assert_eq!(o.status.code(), Some(2));
    let o = run(bin().args(["sweep", "--config", "x.cfg", "--param", "delta", "--values", "1"]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_of_range_sweep_value_is_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("zero_forcing.cfg");
    let o = run(bin()
        .args(["sweep", "--param", "epsilon", "--values", "0.1,2", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path()));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("reg.epsilon"), "{}", stderr(&o));
}

#[test]
fn bad_thread_cap_is_a_config_error() {
    let o = run(bin().env("MHD_LAB_THREADS", "zero").args(["identities", "--draws", "1"]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_forcing_keeps_every_norm_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin().args(["run", "--config"]).arg(configs().join("zero_forcing.cfg")).arg("--out").arg(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = parse_csv(&fs::read_to_string(dir.path().join("energy.csv")).unwrap()).unwrap();
    assert_eq!(h, ENERGY_COLUMNS);
    assert!(rows.len() > 2);
    for name in &ENERGY_COLUMNS[1..] {
        assert!(column(&h, &rows, name).unwrap().iter().all(|v| *v == 0.0), "{name}");
    }
}

fn golden_interval() -> (f64, f64) {
    let text = fs::read_to_string(configs().join("reference.golden")).unwrap();
    let get = |key: &str| -> f64 {
        text.lines()
            .filter(|l| !l.starts_with('#'))
            .find_map(|l| l.split_once('=').filter(|(k, _)| k.trim() == key))
            .map(|(_, v)| v.trim().parse().unwrap())
            .unwrap()
    };
    (get("ratio_min"), get("ratio_max"))
}

fn ratio_of(summary: &str) -> f64 {
    summary
        .split_whitespace()
        .find_map(|f| f.strip_prefix("ratio="))
        .expect("summary has a ratio")
        .parse()
        .unwrap()
}

#[test]
fn reference_run_is_golden_and_deterministic_across_thread_caps() {
    let (lo, hi) = golden_interval();
    let cfg = configs().join("reference.cfg");
    let mut outputs = Vec::new();
    for threads in ["1", "2"] {
        let dir = tempfile::tempdir().unwrap();
        let o = run(bin().env("MHD_LAB_THREADS", threads).args(["run", "--config"]).arg(&cfg).arg("--out").arg(dir.path()));
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let r = ratio_of(&stdout(&o));
        assert!((lo..=hi).contains(&r), "ratio {r:e} outside [{lo:e}, {hi:e}]");
        outputs.push((stdout(&o), fs::read(dir.path().join("energy.csv")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn gamma_sweep_rows_follow_the_requested_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin()
        .args(["sweep", "--param", "gamma", "--values", "16,4,8", "--config"])
        .arg(configs().join("zero_forcing.cfg"))
        .arg("--out")
        .arg(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = parse_csv(&fs::read_to_string(dir.path().join("sweep.csv")).unwrap()).unwrap();
    assert_eq!(column(&h, &rows, "value").unwrap(), [16.0, 4.0, 8.0]);
    assert_eq!(column(&h, &rows, "gamma").unwrap(), [16.0, 4.0, 8.0]);
}

#[test]
fn m_sweep_reports_decaying_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin()
        .args(["sweep", "--param", "M", "--values", "4,16,64", "--config"])
        .arg(configs().join("zero_forcing.cfg"))
        .arg("--out")
        .arg(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = parse_csv(&fs::read_to_string(dir.path().join("sweep.csv")).unwrap()).unwrap();
    assert_eq!(h.len(), 4);
    for name in &h[1..] {
        let s = column(&h, &rows, name).unwrap();
        assert!(s[0] > s[1] && s[1] > s[2], "{name}: {s:?}");
    }
}

#[test]
fn dump_and_validate_emit_csv_like_text() {
    let cfg = configs().join("reference.cfg");
    let o = run(bin().args(["dump-matrices", "--config"]).arg(&cfg));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).lines().any(|l| l.starts_with("# ")));
    let o = run(bin().args(["validate-state", "--config"]).arg(&cfg));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("quantity,value"));
}
