use std::process::Command;

use heisenbn_cli::{run, Output, EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn cli(args: &[&str]) -> Output {
    let mut all = vec!["heisenbn"];
    all.extend_from_slice(args);
    run(&all)
}

fn ok(args: &[&str]) -> String {
    let out = cli(args);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    out.stdout
}

#[test]
fn validate_reports_node_count() {
    assert!(ok(&["validate", &fixture("reference_template.model.json")]).contains("ok, 22 nodes"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"nodes\": [{\"id\": \"a\", \"kind\": \"labeled\", \"states\": [\"x\"], \"cpd\": {\"table\": [[1.0]]}}], \"extra\": 1}").unwrap();
    let out = cli(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_VALIDATION);
    assert!(out.stderr.contains("bad.json:extra: unknown field"), "{}", out.stderr);
}

#[test]
fn infer_on_model_and_scenario() {
    let model = fixture("reference_template.model.json");
    let json = ok(&["infer", &model, "--evidence", &fixture("evidence.json"), "--target", "verification_quality", "field_defects"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["posteriors"].as_array().unwrap().len(), 2);
    let table = ok(&["infer", &model, "--target", "certification", "--format", "table"]);
    assert!(table.starts_with("certification\n"));
    let all = ok(&["infer", "--scenario", &fixture("scenario_a.json")]);
    let v: serde_json::Value = serde_json::from_str(&all).unwrap();
    assert_eq!(v["posteriors"].as_array().unwrap().len(), 22);
}

#[test]
fn predict_and_diagnose() {
    let a = fixture("scenario_a.json");
    let twelve = ok(&["predict", "--scenario", &a]);
    assert!(twelve.contains("\"horizon_months\": 12"));
    let longer = ok(&["predict", "--scenario", &a, "--horizon-months", "36"]);
    assert!(longer.contains("\"horizon_months\": 36"));
    assert_ne!(twelve, longer);
    let diag = ok(&["diagnose", "--scenario", &a, "--found", "76"]);
    assert!(diag.contains("\"found_interval\": \"51-100\""));
    for node in ["verification_quality", "residual_defects", "field_defects"] {
        assert!(diag.contains(&format!("\"node\": \"{node}\"")), "{node}");
    }
    let params = fixture("params.default.json");
    assert_eq!(ok(&["predict", "--scenario", &a, "--params", &params]), twelve);
}

#[test]
fn sensitivity_defaults() {
    let out = ok(&["sensitivity", "--scenario", &fixture("scenario_b.json"), "--format", "table"]);
    assert!(out.starts_with("target field_defects"));
    let out = cli(&["sensitivity", &fixture("reference_template.model.json")]);
    assert_eq!(out.code, EXIT_VALIDATION);
    let json = ok(&[
        "sensitivity",
        &fixture("reference_template.model.json"),
        "--target",
        "field_defects",
        "--inputs",
        "certification,verification_quality",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["inputs"][0]["input"], "verification_quality");
}

#[test]
fn calibrate_writes_params() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fitted.json");
    let report = ok(&["calibrate", "--records", &fixture("records.json"), "--out", out.to_str().unwrap(), "--sweeps", "1", "--refinements", "1"]);
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert!(v["objective_after"].as_f64().unwrap() >= v["objective_before"].as_f64().unwrap());
    let fitted = std::fs::read_to_string(&out).unwrap();
    heisenbn::io::parse_params(&fitted, heisenbn::io::ParseOptions::default()).unwrap();
    let prior = dir.path().join("priors.json");
    std::fs::write(&prior, "{\"pseudo_count\": -1.0}").unwrap();
    let bad = cli(&["calibrate", "--records", &fixture("records.json"), "--priors", prior.to_str().unwrap()]);
    assert_eq!(bad.code, EXIT_VALIDATION);
    assert!(bad.stderr.contains("priors.json:pseudo_count"), "{}", bad.stderr);
}

#[test]
fn synth_is_seeded() {
    let a = ok(&["synth", "--count", "5", "--seed", "9"]);
    assert_eq!(a, ok(&["synth", "--count", "5", "--seed", "9"]));
    assert_ne!(a, ok(&["synth", "--count", "5", "--seed", "10"]));
    let records = heisenbn::io::parse_records(&a, heisenbn::io::ParseOptions::default()).unwrap();
    assert_eq!(records.len(), 5);
    assert!(ok(&["synth", "--count", "2", "--latent"]).contains("\"latent\""));
}

#[test]
fn fault_tree_commands() {
    let ft = fixture("fault_tree.json");
    let top: serde_json::Value = serde_json::from_str(&ok(&["ft-top", &ft])).unwrap();
    let valve = 1.0 - 0.999 * (1.0 - 0.03 * 0.8) * (1.0 - 0.02 * 0.6);
    let exact = 1.0 - (1.0 - 0.05 * 0.08) * 0.99 * (1.0 - valve);
    assert!((top["probability"].as_f64().unwrap() - exact).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("ft.model.json");
    ok(&["ft2bn", &ft, "-o", model.to_str().unwrap()]);
    assert!(ok(&["validate", model.to_str().unwrap()]).contains("ok, 8 nodes"));

    let ranking: serde_json::Value = serde_json::from_str(&ok(&["ft-diagnose", &ft, "--top-soft", "1,0"])).unwrap();
    let causes = ranking["causes"].as_array().unwrap();
    assert_eq!(causes.len(), 5);
    let bad = cli(&["ft-diagnose", &ft, "--top-soft", "1,0,2"]);
    assert_eq!(bad.code, EXIT_VALIDATION);
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["predict", "--scenario", "/nonexistent.json"]).code, EXIT_RUNTIME);
    assert_eq!(cli(&["predict"]).code, EXIT_VALIDATION);
    assert_eq!(cli(&["--help"]).code, EXIT_OK);
    let out = cli(&["infer", &fixture("reference_template.model.json"), "--target", "nope"]);
    assert_eq!(out.code, EXIT_VALIDATION);
    assert_eq!(out.stderr, "error: nope: unknown node 'nope'\n");

    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("ft.model.json");
    ok(&["ft2bn", &fixture("fault_tree.json"), "-o", tree.to_str().unwrap()]);
    let ev = dir.path().join("ev.json");
    std::fs::write(&ev, r#"{"both_pumps_down": {"state": "true"}, "pump_a_fails": {"state": "false"}}"#).unwrap();
    let out = cli(&["infer", tree.to_str().unwrap(), "--evidence", ev.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_RUNTIME);
    assert!(out.stderr.contains("zero probability"));
}

#[test]
fn strictness_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let text = std::fs::read_to_string(fixture("scenario_b.json")).unwrap().replacen("{", "{\n  \"note\": \"draft\",", 1);
    std::fs::write(&path, text).unwrap();
    let bin = env!("CARGO_BIN_EXE_heisenbn");
    let strict = Command::new(bin).args(["predict", "--scenario", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(strict.status.code(), Some(EXIT_VALIDATION));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("note: unknown field"));
    let lax = Command::new(bin)
        .args(["predict", "--scenario", path.to_str().unwrap()])
        .env("HEISENBN_STRICT", "0")
        .output()
        .unwrap();
    assert_eq!(lax.status.code(), Some(EXIT_OK));
    assert_eq!(cli(&["--permissive", "predict", "--scenario", path.to_str().unwrap()]).code, EXIT_OK);
}

#[test]
fn scales_list_every_dimension() {
    let v: serde_json::Value = serde_json::from_str(&ok(&["scales"])).unwrap();
    let text = v.to_string();
    for d in heisenbn::defect::answer_dimensions() {
        assert!(text.contains(d), "{d}");
    }
}
