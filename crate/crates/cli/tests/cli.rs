use std::path::Path;
use std::process::{Command, Output};

use qie_cli::simulate::parse_report;
use qie_cli::table::Table;
use qie_cli::validate::{self, Level};
use qie_core::closedform::{evaluate_formula, FiniteTemperatureFormula};

fn qie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qie"))
        .args(args)
        .env_remove("QIE_MAX_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report_value(text: &str, key: &str) -> f64 {
    parse_report(text)
        .into_iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("missing {key}"))
        .1
        .parse()
        .unwrap()
}

#[test]
fn single_qubit_hot_sweep_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "one.toml",
        "modes = [\"collective\"]\noutputs = [\"mean_work\"]\n[grid]\nn = [1]\nbeta = [0.0]\n",
    );
    let o = qie(&["sweep", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let t = Table::read_csv(csv.as_bytes()).unwrap();
    assert_eq!(t.rows.len(), 1);
    assert_eq!(t.column("mean_work").unwrap(), vec![0.5]);
}

#[test]
fn sweep_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "grid.toml",
        "[grid]\nn = { start = 1, end = 12 }\nbeta = { min = 0.01, max = 5.0, points = 15, spacing = \"log\", include_zero = true }\n",
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let o = qie(&["sweep", &cfg, "--threads", "4", "--out", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_qie"))
        .args(["sweep", &cfg, "--out", b.to_str().unwrap()])
        .env("QIE_MAX_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn jsonl_rows_parse() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "j.toml", "[grid]\nn = [2, 3]\nbeta = [0.0, 1.0]\n");
    let o = qie(&["sweep", &cfg, "--format", "jsonl"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0]["n"], 2);
    assert_eq!(rows[0]["status"], "ok");
}

#[test]
fn malformed_config_is_a_usage_error_with_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "omega = 1.0\n[grid]\nn = [1, 2\nbeta = [0.0]\n");
    let o = qie(&["sweep", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));

    let cfg = write_config(dir.path(), "neg.toml", "[grid]\nn = [0]\nbeta = [1.0]\n");
    let o = qie(&["sweep", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("grid.n"), "{}", stderr(&o));
}

#[test]
fn both_paths_report_small_discrepancy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "both.toml",
        "computation_path = \"both\"\noutputs = [\"mean_work\", \"variance\"]\n[grid]\nn = { start = 1, end = 20 }\nbeta = [0.0, 0.3, 2.0]\n",
    );
    let o = qie(&["sweep", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = Table::read_csv(&o.stdout[..]).unwrap();
    let d = t.column("discrepancy").unwrap();
    assert_eq!(d.len(), 120);
    assert!(d.iter().all(|x| *x < 1e-9), "{d:?}");
}

#[test]
fn failed_rows_are_written_and_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "inf.toml",
        "computation_path = \"closed_form\"\n[grid]\nn = [2]\nbeta = [1.0, inf]\n",
    );
    let o = qie(&["sweep", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    let t = Table::read_csv(&o.stdout[..]).unwrap();
    assert_eq!(t.rows.len(), 4);
}

#[test]
fn unknown_figure_is_rejected() {
    let o = qie(&["figure", "fig7"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qie(&["figure", "fig2", "--omega", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn figure_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = qie(&["figure", "fig3b", "fig5", "--out", d.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let mut names: Vec<_> = std::fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.iter().any(|n| n == "fig3b_manifest.json"));
    assert!(names.iter().any(|n| n.to_string_lossy().ends_with(".svg")));
    for name in &names {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap(),
            "{name:?}"
        );
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("fig5_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["all_claims_passed"], true);
}

#[test]
fn fig5_entropy_production_is_non_negative() {
    let dir = tempfile::tempdir().unwrap();
    let o = qie(&["figure", "fig5", "--no-svg", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "csv"))
        .unwrap();
    let t = Table::read_csv(std::fs::File::open(csv).unwrap()).unwrap();
    let sigma: Vec<f64> = t
        .columns
        .iter()
        .filter(|c| c.starts_with("sigma"))
        .flat_map(|c| t.column(c).unwrap())
        .collect();
    assert!(!sigma.is_empty());
    assert!(sigma.iter().all(|s| *s >= 0.0));
}

#[test]
fn quick_validation_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = qie(&["validate", "--out", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn broken_formula_is_caught_and_named() {
    let report = validate::run_with(Level::Quick, &|f, n, b, w| {
        let v = evaluate_formula(f, n, b, w)?;
        Ok(if f == FiniteTemperatureFormula::CollectiveMeanEven { -v } else { v })
    });
    assert!(!report.passed);
    let check = report.check("closed_form_vs_direct_sum").unwrap();
    assert!(!check.passed);
    assert_eq!(check.failing_ids(), vec!["collective_mean_even"]);
}

#[test]
fn simulate_is_seeded_and_matches_the_analytic_mean() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    for p in [&a, &b] {
        let o = qie(&[
            "simulate", "-n", "10", "--beta", "0.5", "--cycles", "1000000", "--seed", "42", "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(report_value(&text, "mean_z_score").abs() < 4.0, "{text}");
}

#[test]
fn dynamical_cycles_agree_with_iid_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("cycles.csv");
    let o = qie(&["simulate", "-n", "4", "-b", "0.7", "--cycles", "20000", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let iid = String::from_utf8(o.stdout).unwrap();
    let o = qie(&[
        "simulate", "-n", "4", "-b", "0.7", "--cycles", "20000", "--seed", "5", "--dynamical", "--cycles-out",
        records.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dynamical = String::from_utf8(o.stdout).unwrap();
    assert!(dynamical.contains("variant = dynamical"));
    let (m1, s1) = (report_value(&iid, "empirical_mean"), report_value(&iid, "standard_error"));
    let (m2, s2) = (report_value(&dynamical, "empirical_mean"), report_value(&dynamical, "standard_error"));
    assert!((m1 - m2).abs() < 4.0 * (s1 * s1 + s2 * s2).sqrt(), "{m1} vs {m2}");
    let t = Table::read_csv(std::fs::File::open(records).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 20_000);
}

#[test]
fn dynamical_independent_is_a_usage_error() {
    let o = qie(&["simulate", "-n", "4", "-b", "1", "--cycles", "10", "--mode", "independent", "--dynamical"]);
    assert_eq!(o.status.code(), Some(1));
}
