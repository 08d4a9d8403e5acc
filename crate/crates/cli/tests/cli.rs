//! End-to-end runs of the `csglab` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn csglab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csglab"))
        .args(args)
        .env_remove("CSGLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path_str = path.to_str().unwrap().to_string();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path_str]);
    let out = csglab(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    path_str
}

#[test]
fn gen_two_link_has_two_edges() {
    let out = csglab(&["gen", "two-link", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 2);
    assert_eq!(doc["agents"], 5);
}

#[test]
fn gen_fig2_rejects_equal_costs() {
    let out = csglab(&["gen", "fig2", "--x", "1", "--y", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn gen_fig3_threshold_table() {
    let out = csglab(&["gen", "fig3", "--n", "4", "--eps", "1/100"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let table = doc["edges"][4]["scheme"]["table"].as_array().unwrap();
    assert_eq!(table.len(), 4);
    assert_eq!(table[3], "101/400");
}

#[test]
fn gen_is_deterministic_and_seed_from_env() {
    let a = csglab(&["gen", "random-sp", "--seed", "42", "--n", "3"]);
    let b = Command::new(env!("CARGO_BIN_EXE_csglab"))
        .args(["gen", "random-sp", "--n", "3"])
        .env("CSGLAB_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn analyze_two_link() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_gen(dir.path(), "two.json", &["two-link", "--n", "5"]);
    let out = csglab(&["analyze", &file]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["ratios"]["poa_sc"]["exact"], "5/1");
    let verdicts = report["verdicts"].as_array().unwrap();
    assert!(verdicts.iter().any(|v| v["tag"] == "Thm5:PoA_sc<=n" && v["holds"] == true));
    assert!(report["volatile"]["wall_time_ms"].is_u64());
}

#[test]
fn analyze_fig2_reports_without_anarchy_bound() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_gen(dir.path(), "fig2.json", &["fig2", "--x", "1", "--y", "100"]);
    let out = csglab(&["analyze", "--in", &file, "--no-dynamics"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["class"], "Dag");
    assert_eq!(report["ratios"]["poa_sc"]["exact"], "204/5");
    let verdicts = report["verdicts"].as_array().unwrap();
    assert!(verdicts.iter().all(|v| !v["tag"].as_str().unwrap().starts_with("Thm5") && !v["tag"].as_str().unwrap().starts_with("Thm9")));
    assert!(report.get("dynamics").is_none());
}

#[test]
fn analyze_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_gen(dir.path(), "sp.json", &["random-sp", "--seed", "7", "--n", "3"]);
    let a = csglab(&["analyze", &file, "--stable"]);
    let b = csglab(&["analyze", &file, "--stable"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn analyze_single_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_gen(dir.path(), "two.json", &["two-link", "--n", "3"]);
    let report = stdout_json(&csglab(&["analyze", &file, "--criterion", "mc"]));
    assert!(report["ratios"].get("poa_sc").is_none());
    assert_eq!(report["ratios"]["poa_mc"]["exact"], "3/1");
}

#[test]
fn analyze_rejects_zero_denominator() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_gen(dir.path(), "two.json", &["two-link", "--n", "2"]);
    let bad = fs::read_to_string(&file).unwrap().replace("\"2/1\"", "\"1/0\"");
    let bad_path = dir.path().join("bad.json");
    fs::write(&bad_path, bad).unwrap();
    let out = csglab(&["analyze", bad_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_path_explosion_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_gen(dir.path(), "two.json", &["two-link", "--n", "5"]);
    let out = csglab(&["analyze", &file, "--profile-cap", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("32"));
}

#[test]
fn dynamics_fig3_from_sum_cost_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_gen(dir.path(), "fig3.json", &["fig3", "--n", "4", "--eps", "1/100"]);
    let out = csglab(&["dynamics", &file, "--start", "opt-sc"]);
    assert_eq!(out.status.code(), Some(0));
    let trace = stdout_json(&out);
    assert_eq!(trace["terminal_sum_cost"]["exact"], "13/4");
    assert_eq!(trace["terminal_is_nash"], true);
}

#[test]
fn dynamics_from_equilibrium_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_gen(dir.path(), "two.json", &["two-link", "--n", "2"]);
    let start = dir.path().join("start.json");
    fs::write(&start, r#"{"paths": [[1], [1]]}"#).unwrap();
    let out = csglab(&["dynamics", &file, "--start", start.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["steps"].as_array().unwrap().len(), 0);
}

#[test]
fn dynamics_seeded_potentials_decrease() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_gen(dir.path(), "dag.json", &["random-dag", "--seed", "3", "--n", "3"]);
    for seed in ["1", "2", "3"] {
        let out = csglab(&["dynamics", &file, "--start", "opt-mc", "--policy", "seeded", "--seed", seed]);
        assert_eq!(out.status.code(), Some(0));
        let trace = stdout_json(&out);
        let mut last = trace["start_potential"].as_str().unwrap().to_string();
        for step in trace["steps"].as_array().unwrap() {
            let next = step["potential"].as_str().unwrap().to_string();
            let as_f = |s: &str| {
                let (n, d) = s.split_once('/').unwrap();
                n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap()
            };
            assert!(as_f(&next) < as_f(&last));
            last = next;
        }
    }
}

#[test]
fn verify_unknown_suite() {
    let out = csglab(&["verify", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_builtin_suite() {
    let out = csglab(&["verify", "--suite", "paper", "--budget", "60"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    for tag in ["Thm1", "Thm5", "Thm6", "Thm8", "Thm9", "Thm10", "Thm13", "Thm14"] {
        assert!(text.contains(tag), "missing {tag}");
    }
    assert!(text.contains("8/8 checks passed"));
}
