use std::process::{Command, Output};

use serde_json::Value;

fn phasekick(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasekick")).args(args).env_remove("PHASEKICK_OUT_DIR").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let out = phasekick(&full);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn validator() -> jsonschema::Validator {
    let schema: Value =
        serde_json::from_str(include_str!("../schema/run_record.schema.json")).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn kickback_examples() {
    let r = json(&["kickback", "--theta", "0.25", "--phi", "0"]);
    assert!((r["results"]["ancilla_p0"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let u = json(&["kickback", "--theta", "0.125"]);
    let p = u["results"]["ancilla_p0"].as_f64().unwrap();
    assert!((p - 0.853553).abs() < 1e-6);
    let s = json(&["kickback", "--theta", "0.125", "--variant", "standard"]);
    assert!((s["results"]["ancilla_p0"].as_f64().unwrap() - p).abs() < 1e-12);
    assert_eq!(r["seed"], 0);
}

#[test]
fn out_of_range_phase_is_a_usage_error() {
    assert_eq!(code(&phasekick(&["kickback", "--theta", "1.5"])), 2);
    assert_eq!(code(&phasekick(&["kickback", "--theta", "0.1", "--phi", "-0.2"])), 2);
    assert_eq!(code(&phasekick(&["qpe", "--bits", "0", "--theta", "0.1"])), 2);
    assert_eq!(code(&phasekick(&["qpe", "--bits", "13", "--theta", "0.1"])), 2);
    assert_eq!(code(&phasekick(&["kickback", "--theta", "0.1", "--variant", "magic"])), 2);
}

#[test]
fn qpe_examples() {
    let r = json(&["qpe", "--bits", "3", "--theta", "0.375", "--compare-standard"]);
    assert_eq!(r["results"]["map_outcome"], 3);
    assert!(r["results"]["distribution"][3].as_f64().unwrap() >= 1.0 - 1e-9);
    assert!(r["results"]["standard_distance"].as_f64().unwrap() <= 1e-10);
    let d = json(&["qpe", "--bits", "3", "--theta", "0.375", "--delta", "0"]);
    assert!(d["results"]["approximate_eigenstate"]["success_probability"].as_f64().unwrap() >= 1.0 - 1e-9);
}

#[test]
fn resources_examples() {
    let r = json(&["resources", "--m-range", "1-10", "--n1u", "1", "--n1w", "1"]);
    let rows = r["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[9]["asymptotic_ratio"], "256/5");
    assert_eq!(rows[0]["asymptotic_ratio"], "1");
    assert_eq!(rows[9]["ratio"], "1023/20");
    let with_n2 = json(&["resources", "--m-range", "10", "--n1u", "1", "--n2u", "2", "--n1w", "1"]);
    assert!(with_n2["results"]["rows"][0]["ratio_value"].as_f64().unwrap() < rows[9]["ratio_value"].as_f64().unwrap());

    let csv = phasekick(&["resources", "--m-range", "9-10", "--csv"]);
    assert_eq!(
        String::from_utf8(csv.stdout).unwrap(),
        "m,cost_standard,cost_uncontrolled,ratio,asymptotic_ratio\n9,1022,36,511/18,256/9\n10,2046,40,1023/20,256/5\n"
    );
    assert_eq!(code(&phasekick(&["resources", "--m-range", "5-2"])), 2);
}

#[test]
fn heisenberg_from_flags_and_descriptor() {
    let r = json(&["heisenberg", "--n", "2", "--j", "1", "--m", "8"]);
    let res = &r["results"];
    assert!((res["energy"].as_f64().unwrap() + 3.0).abs() <= res["grid_step"].as_f64().unwrap());
    assert_eq!(res["within_grid_step"], true);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.json");
    std::fs::write(&path, r#"{"N": 3, "J": 1.0, "m": 6, "evolution": "trotter", "steps": 16}"#).unwrap();
    let d = json(&["heisenberg", "--descriptor", path.to_str().unwrap()]);
    assert!(d["results"]["trotter"]["error"].as_f64().unwrap() > 0.0);

    std::fs::write(&path, r#"{"N": 3, "J": 1.0, "m": 6, "colour": "red"}"#).unwrap();
    assert_eq!(code(&phasekick(&["heisenberg", "--descriptor", path.to_str().unwrap()])), 2);
    assert_eq!(code(&phasekick(&["heisenberg", "--n", "3", "--t", "5"])), 2);
}

#[test]
fn shor_examples() {
    let r = json(&["shor", "--n", "15", "--a", "7", "--m", "3"]);
    assert_eq!(r["results"]["order"], 4);
    assert_eq!(r["results"]["uncontrolled_block_count"], 1);
    let out = phasekick(&["shor", "--n", "15", "--a", "6"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not coprime"));
}

#[test]
fn order_not_found_is_a_declared_failure() {
    // one run at m = 1 cannot pin down an order of 4
    let out = phasekick(&["shor", "--n", "15", "--a", "7", "--m", "1", "--runs", "1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn records_are_deterministic() {
    for args in [
        vec!["shor", "--n", "21", "--a", "2", "--seed", "7"],
        vec!["qpe", "--bits", "4", "--theta", "0.3", "--phi", "0.1"],
    ] {
        let (mut a, mut b) = (json(&args), json(&args));
        a.as_object_mut().unwrap().remove("wall_time");
        b.as_object_mut().unwrap().remove("wall_time");
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
    assert_eq!(json(&["shor", "--n", "21", "--a", "2", "--seed", "7"])["seed"], 7);
}

#[test]
fn every_record_matches_the_schema() {
    let v = validator();
    let runs: [&[&str]; 6] = [
        &["kickback", "--theta", "0.3"],
        &["qpe", "--bits", "3", "--theta", "0.2", "--compare-standard", "--delta", "0.1"],
        &["resources", "--m-range", "1-4", "--n2u", "3"],
        &["heisenberg", "--n", "3", "--m", "5"],
        &["shor", "--n", "15", "--a", "2"],
        &["shor", "--n", "7", "--a", "3", "--seed", "4"],
    ];
    for args in runs {
        let record = json(args);
        let errors: Vec<String> = v.iter_errors(&record).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
    let mut broken = json(&["kickback", "--theta", "0.3"]);
    broken.as_object_mut().unwrap().remove("seed");
    assert!(!v.is_valid(&broken));
}

#[test]
fn output_directory_receives_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_phasekick"))
        .args(["resources", "--m-range", "1-3"])
        .env("PHASEKICK_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let record: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("resources.json")).unwrap()).unwrap();
    assert_eq!(record["command"], "resources");
    let csv = std::fs::read_to_string(dir.path().join("resources.csv")).unwrap();
    assert!(csv.starts_with("m,cost_standard,cost_uncontrolled,ratio"));
}

#[test]
fn resources_from_circuit_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut u = phasekick::Circuit::new(2);
    u.push(phasekick::GateOp::h(0)).unwrap();
    u.push(phasekick::GateOp::cx(0, 1)).unwrap();
    let path = dir.path().join("u.json");
    std::fs::write(&path, u.to_json()).unwrap();
    let r = json(&["resources", "--m-range", "2", "--u-circuit", path.to_str().unwrap()]);
    assert_eq!(r["results"]["profile"]["n1_u"], 1);
    assert_eq!(r["results"]["profile"]["n2_u"], 1);
    assert_eq!(r["results"]["rows"][0]["cost_standard"], 3 * (2 + 6));
}
