use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use underlay_core::ScenarioConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_underlay"))
}

fn bundled() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/paper_sec6.cfg")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn small_config(dir: &Path) -> PathBuf {
    let p = dir.join("small.cfg");
    std::fs::write(
        &p,
        "num_sus = 2\nnum_channels = 2\nhorizon = 300\navg_power_budget = 1.0\nmax_interference = 0.15\n\
         max_capacity_loss = 0.05\npu_snr_db = 10\navg_gain_su_db = 3\navg_gain_sp_db = 0\n",
    )
    .unwrap();
    p
}

#[test]
fn bundled_config_is_the_reference_scenario() {
    let cfg = ScenarioConfig::from_path(bundled()).unwrap();
    assert_eq!(cfg, ScenarioConfig::reference());
}

#[test]
fn metrics_csv_header_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("m.csv");
    let o = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--scheme",
        "APC",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "slot,c2_avg,p2_avg_1,p2_avg_2,p1_avg_1,p1_avg_2,r1_avg_1,r1_avg_2,eps1_avg,pi_1,pi_2,theta_1,theta_2,rho_1,rho_2"
    );
    // Rows every 100 slots plus the last one.
    assert_eq!(text.lines().count(), 1 + 4);
}

#[test]
fn summary_json_and_belief_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let (json, beliefs) = (dir.path().join("s.json"), dir.path().join("b.jsonl"));
    let o = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--horizon",
        "50",
        "--summary-json",
        json.to_str().unwrap(),
        "--belief-trace",
        beliefs.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["scheme"], "APC");
    assert_eq!(v["horizon"], 50);
    assert!(v["feasibility"]["checks"].as_array().unwrap().len() == 4);
    // Per slot: 2 activity records and 2 records per link.
    let lines = std::fs::read_to_string(beliefs).unwrap();
    assert_eq!(lines.lines().count(), 50 * (2 + 2 * 4));
    for l in lines.lines().take(20) {
        serde_json::from_str::<serde_json::Value>(l).unwrap();
    }
}

#[test]
fn missing_config_fails_with_diagnostic() {
    let o = run(&["simulate", "--config", "/nonexistent/none.cfg"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("none.cfg"));
}

#[test]
fn parse_errors_carry_line_context() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.cfg");
    std::fs::write(&p, "num_sus = 2\nnum_channels = = 3\n").unwrap();
    let o = run(&["simulate", "--config", p.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(
        String::from_utf8_lossy(&o.stderr).contains("line 2"),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn strict_run_of_unconstrained_scheme_fails() {
    let o = run(&[
        "simulate",
        "--config",
        bundled().to_str().unwrap(),
        "--scheme",
        "None",
        "--strict",
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("interference"));
    let o = run(&[
        "simulate",
        "--config",
        bundled().to_str().unwrap(),
        "--scheme",
        "APC",
        "--strict",
    ]);
    assert!(o.status.success());
}

#[test]
fn empty_scheme_list_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&[
        "sweep",
        "--config",
        bundled().to_str().unwrap(),
        "--param",
        "eps_check",
        "--values",
        "0.05",
        "--schemes",
        "",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

fn read_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        [
            "parameter",
            "value",
            "scheme",
            "seed",
            "c2_avg",
            "p1_mean",
            "eps1_avg",
            "p2_avg_mean",
            "feasible"
        ]
    );
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn capacity_loss_sweep_is_monotone_for_ac() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eps.csv");
    let o = run(&[
        "sweep",
        "--config",
        bundled().to_str().unwrap(),
        "--param",
        "eps_check",
        "--values",
        "0.01,0.05,0.1,0.2",
        "--schemes",
        "AC",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c2: Vec<f64> = read_rows(&out).iter().map(|r| r[4].parse().unwrap()).collect();
    assert_eq!(c2.len(), 4);
    for w in c2.windows(2) {
        assert!(w[1] >= w[0], "{c2:?}");
    }
}

#[test]
fn quantizer_sweep_has_one_row_per_run_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.csv");
    let o = run(&[
        "--jobs",
        "2",
        "sweep",
        "--config",
        bundled().to_str().unwrap(),
        "--horizon",
        "400",
        "--param",
        "quant_levels",
        "--values",
        "1,2,4,8,inf",
        "--schemes",
        "APC,IPC",
        "--seeds",
        "1,2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 5 * 2 * 2);
    let keys: Vec<(String, String, String)> = rows
        .iter()
        .map(|r| (r[1].to_string(), r[2].to_string(), r[3].to_string()))
        .collect();
    assert_eq!(keys[0], ("1".into(), "APC".into(), "1".into()));
    assert_eq!(keys[3], ("1".into(), "IPC".into(), "2".into()));
    assert_eq!(keys[19], ("inf".into(), "IPC".into(), "2".into()));
}

#[test]
fn selftest_quick_passes() {
    let o = run(&["selftest", "--quick"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().count() >= 6 && stdout.lines().all(|l| l.starts_with("PASS")));
}
