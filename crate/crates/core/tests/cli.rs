use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use elastpass::cli::{read_csv, CheckOutput, RealizeOutput, SweepCell};
use elastpass::analysis::FrequencyRow;
use tempfile::TempDir;

fn config(gt: f64, gm: f64, im: f64, env: &str) -> String {
    format!(r#"{{"plant":{{"Jm":0.002,"Bm":1.22,"K":360,"Bf":0}},"gains":{{"Gt":{gt},"Gm":{gm},"Im":{im}}},"env":{env}}}"#)
}

fn defaults() -> String {
    config(5.0, 10.0, 0.0, r#"{"kind":"null"}"#)
}

fn spring(kd: f64) -> String {
    config(5.0, 10.0, 0.0, &format!(r#"{{"kind":"spring","Kd":{kd}}}"#))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], cfg: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elastpass"))
        .args(args)
        .arg("--config")
        .arg(cfg)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let ok = run(&["check"], &write(&dir, "a.json", &defaults()));
    assert_eq!(ok.status.code(), Some(0));
    let out: CheckOutput = serde_json::from_str(&stdout(&ok)).unwrap();
    assert!(out.passive && out.agree == Some(true));

    let bad = run(&["check", "--closed-form"], &write(&dir, "b.json", &spring(380.0)));
    assert_eq!(bad.status.code(), Some(2));
    let table = stdout(&bad);
    assert!(table.contains("non-passive"));
    let violated: Vec<&str> = table.lines().filter(|l| l.trim_end().ends_with("NO")).collect();
    assert_eq!(violated.len(), 1, "{table}");
    assert!(violated[0].trim_start().starts_with("(i)"), "{table}");

    let broken = run(&["check"], &write(&dir, "c.json", "{\"plant\": "));
    assert_eq!(broken.status.code(), Some(1));
    assert!(!broken.stderr.is_empty());
    let missing = run(&["check"], &dir.path().join("nope.json"));
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn realize_reports_parasitic_elements() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("net.json");
    let o = Command::new(env!("CARGO_BIN_EXE_elastpass"))
        .args(["realize", "--config"])
        .arg(write(&dir, "a.json", &defaults()))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let table = stdout(&o);
    assert!(table.contains("3.922e-5") && table.contains("0.220"), "{table}");
    let r: RealizeOutput = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert!(r.feasibility.feasible);

    for (kd, damper) in [(150.0, 0.130), (200.0, 0.100), (250.0, 0.070)] {
        let o = run(&["realize"], &write(&dir, "s.json", &spring(kd)));
        let r: RealizeOutput = serde_json::from_str(&stdout(&o)).unwrap();
        let (_, d) = r.parasitic_pair.unwrap();
        assert!((d - damper).abs() < 5e-4, "K_d={kd}: {d}");
    }

    let infeasible = run(&["realize"], &write(&dir, "n.json", &config(-1.0, 10.0, 0.0, r#"{"kind":"null"}"#)));
    assert_eq!(infeasible.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&infeasible.stderr).contains("infeasible"));
}

#[test]
fn bode_csv_and_determinism() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "a.json", &defaults());
    let a = run(&["bode"], &cfg);
    let b = run(&["bode"], &cfg);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("# elastpass"));
    let rows: Vec<FrequencyRow> = read_csv(&text).unwrap();
    assert_eq!(rows.len(), 1000);
    assert!((rows[0].mag_db + 13.15).abs() < 0.01);

    let ppi = write(&dir, "ppi.json", &config(5.0, 10.0, 10.0, r#"{"kind":"null"}"#));
    let eff = run(&["effective", "--parasitic", "--grid", "1e-6:1e9:2"], &ppi);
    let rows: Vec<FrequencyRow> = read_csv(&stdout(&eff)).unwrap();
    assert!((rows[0].c_eff - 0.2).abs() < 1e-6);
    assert!((rows[1].c_eff - 0.22).abs() < 1e-4);
}

#[test]
fn outputs_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "a.json", &spring(380.0));
    let first: CheckOutput = serde_json::from_str(&stdout(&run(&["check"], &cfg))).unwrap();
    // the echoed configuration reproduces the verdict
    let echoed = write(&dir, "echo.json", &serde_json::to_string(&first.config).unwrap());
    let second: CheckOutput = serde_json::from_str(&stdout(&run(&["check"], &echoed))).unwrap();
    assert_eq!(first.passive, second.passive);
    assert_eq!(first.closed_form.as_ref().map(|c| c.passive), second.closed_form.as_ref().map(|c| c.passive));

    let sweep = run(&["sweep", "--axes", "gt-kvir", "--gt", "5:25:3", "--y", "100:400:4"], &write(&dir, "s.json", &spring(150.0)));
    assert_eq!(sweep.status.code(), Some(0));
    let cells: Vec<SweepCell> = read_csv(&stdout(&sweep)).unwrap();
    assert_eq!(cells.len(), 12);
    for c in &cells {
        assert_eq!(c.engine_passive, c.closed_form_passive, "{c:?}");
    }
}

#[test]
fn simulate_writes_trajectory() {
    let dir = TempDir::new().unwrap();
    let traj = dir.path().join("t.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_elastpass"))
        .args(["simulate", "--t-end", "0.2", "--env-value", "0.01", "--config"])
        .arg(write(&dir, "a.json", &spring(150.0)))
        .arg("--out")
        .arg(&traj)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&traj).unwrap();
    assert!(text.lines().any(|l| l.starts_with("t,")));
    assert!(stdout(&o).contains("\"min_energy\""));
}

#[test]
fn usage_errors() {
    let o = Command::new(env!("CARGO_BIN_EXE_elastpass")).args(["check"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_elastpass")).args(["--help"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}
