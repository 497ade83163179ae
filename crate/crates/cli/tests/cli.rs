//! End-to-end checks of the binary: flag parsing, exit codes, payload
//! contents and byte stability.

use std::fs;
use std::process::{Command, Output};

fn reliq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reliq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn threshold_reports_the_exact_ternary_values() {
    let out = reliq(&["threshold", "--q", "3", "--k", "3"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["schema_version"], "reliq/threshold/1");
    assert_eq!(json["eps_transcritical"], "1/6");
    assert_eq!(json["eps_saddle"], "2/11");
    assert_eq!(json["c_coefficient"], "4/3");
}

#[test]
fn coeff_routes_agree_and_match_the_closed_form() {
    let out = reliq(&["coeffs", "--q", "3", "--k", "3", "--method", "both"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["routes_agree"], true);
    assert_eq!(json["coefficients"][1], "5/6");

    let closed = reliq(&["coeffs", "--q", "3", "--k", "3", "--method", "closed"]);
    let closed_json = stdout_json(&closed);
    assert_eq!(closed_json["coefficients"], json["coefficients"]);
}

#[test]
fn verification_commands_signal_failure_with_exit_one() {
    let ok = reliq(&["verify-enand", "--eps", "0.1"]);
    assert_eq!(ok.status.code(), Some(0));
    let json = stdout_json(&ok);
    assert_eq!(json["all_ok"], true);

    let bad = reliq(&["verify-enand", "--eps", "0.2"]);
    assert_eq!(bad.status.code(), Some(1));
    let json = stdout_json(&bad);
    assert_eq!(json["all_ok"], false);
    assert_eq!(json["failures"].as_array().unwrap().len(), 1);
}

#[test]
fn usage_and_resource_errors_use_distinct_codes() {
    // composite alphabet rejected by the product analysis
    let composite = reliq(&["mul", "--q", "4", "--a", "0.3"]);
    assert_eq!(composite.status.code(), Some(2));

    // clap-level problems: unknown flag, missing required argument
    assert_eq!(reliq(&["threshold", "--q", "3"]).status.code(), Some(2));
    assert_eq!(
        reliq(&["threshold", "--q", "3", "--k", "3", "--frobnicate"])
            .status
            .code(),
        Some(2)
    );

    // a tree too large to materialize is a resource error
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("huge.json");
    fs::write(
        &cfg,
        r#"{"q":3,"k":3,"construction":{"type":"MajTree","depth":30},
           "eps":0.05,"leaf_noise":0.2,"logical_inputs":[0],"trials":10,"seed":1}"#,
    )
    .unwrap();
    let out = reliq(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn randomized_commands_require_an_explicit_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"q":3,"k":3,"construction":{"type":"MajTree","depth":1},
           "eps":0.05,"leaf_noise":0.2,"logical_inputs":[0],"trials":100,"seed":7}"#,
    )
    .unwrap();
    let out = reliq(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_csv_is_byte_stable_and_carries_the_schema_line() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let out = reliq(&[
            "scan",
            "thresholds",
            "--q-min",
            "2",
            "--q-max",
            "4",
            "--ks",
            "3",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.as_bytes(), fs::read(&b).unwrap().as_slice());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema reliq/fig1/1"));
    assert_eq!(lines.next(), Some("q,k,eps_transcritical,eps_saddle"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn bifurcation_scan_lists_fixed_points_per_rate() {
    let out = reliq(&[
        "scan",
        "bifurcation",
        "--q",
        "3",
        "--k",
        "3",
        "--eps-max",
        "0.1",
        "--step",
        "0.05",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema reliq/fig2/1"));
    assert_eq!(lines.next(), Some("eps,a,stability"));
    // three rates, three fixed points each below the transcritical rate
    assert_eq!(lines.clone().count(), 9);
    assert!(lines.all(|l| l.split(',').count() == 3));
}

#[test]
fn field_rows_have_four_columns() {
    let out = reliq(&["field", "--map", "den", "--eps", "0.1", "--resolution", "8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema reliq/field/1"));
    assert_eq!(lines.next(), Some("x,y,dx,dy"));
    let mut rows = 0;
    for line in lines {
        assert_eq!(line.split(',').count(), 4, "bad row: {line}");
        rows += 1;
    }
    assert!(rows > 10);
}

#[test]
fn simulate_output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"q":3,"k":2,
           "construction":{"type":"AlternatingEnandDen","depth":2,"den_rounds_per_level":3},
           "eps":0.1,"leaf_noise":0.25,"logical_inputs":null,"trials":4000,"seed":0}"#,
    )
    .unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for (threads, path) in [("1", &a), ("4", &b)] {
        let out = reliq(&[
            "--threads",
            threads,
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "99",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    // the --seed flag is authoritative over the config file's seed
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    assert_eq!(json["config"]["seed"], 99);
    assert_eq!(json["outcomes"].as_array().unwrap().len(), 4);
}

#[test]
fn gate_tables_round_trip_through_dump_and_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("enand.txt");
    let out = reliq(&[
        "gate",
        "dump",
        "--kind",
        "enand",
        "--q",
        "3",
        "--k",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let loaded = reliq(&["gate", "load", "--file", path.to_str().unwrap()]);
    assert!(loaded.status.success());
    let json = stdout_json(&loaded);
    assert_eq!(json["name"], "enand");
    assert_eq!(json["q"], 3);
    assert_eq!(json["k"], 2);
    assert_eq!(json["balanced"], true);

    let garbled = dir.path().join("bad.txt");
    fs::write(&garbled, "3 2 oops\n0 1\n").unwrap();
    let bad = reliq(&["gate", "load", "--file", garbled.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn selftest_passes_on_a_clean_build() {
    let out = reliq(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("checks passed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_pa_reports_a_check_table() {
    let out = reliq(&["verify-pa", "--q", "3", "--grid", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["all_ok"], true);
    assert!(json["checks"].as_array().unwrap().len() >= 6);
}

#[test]
fn mul_reports_margin_and_threshold() {
    let out = reliq(&["mul", "--q", "3", "--a", "0.3"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    let margin = json["margin"].as_f64().unwrap();
    let threshold = json["threshold"].as_f64().unwrap();
    assert!(margin > 0.0);
    assert!((threshold - (1.0 - 1.0 / 3f64.sqrt())).abs() < 1e-12);
}

#[test]
fn fixed_points_mark_the_balanced_root() {
    let out = reliq(&["fixed-points", "--q", "3", "--k", "3", "--eps", "0.1"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    let fps = json["fixed_points"].as_array().unwrap();
    assert_eq!(fps.len(), 3);
    assert_eq!(
        fps.iter()
            .filter(|fp| fp["balance_exact"] == "2/3")
            .count(),
        1
    );
}
