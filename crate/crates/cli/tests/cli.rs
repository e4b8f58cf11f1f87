use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn nle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nle"))
        .args(args)
        .output()
        .expect("run nle")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let o = nle(&full);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).expect("valid json")
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn delta_nlwe_fixed() {
    let o = nle(&["delta", "--ensemble", "nlwe-3x3", "--mode", "fixed"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("delta_sym = 0.444444"), "{}", stdout(&o));
}

#[test]
fn delta_computational_basis() {
    let o = nle(&["delta", "--ensemble", "e1-computational", "--mode", "fixed"]);
    assert!(stdout(&o).contains("delta_sym = 0.000000"));
}

#[test]
fn delta_direction_filter() {
    let o = nle(&["delta", "--ensemble", "e2-case2", "--direction", "left"]);
    let out = stdout(&o);
    assert!(out.contains("delta_left = 0.500000"));
    assert!(!out.contains("delta_right"));
    assert!(!out.contains("delta_sym"));
}

#[test]
fn delta_rejects_entangled_ensemble() {
    let o = nle(&["delta", "--ensemble", "bell-pair"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not-product-ensemble"));
}

#[test]
fn big_delta_values() {
    let o = nle(&["big-delta", "--ensemble", "bell-triple", "--mode", "assign"]);
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("Delta_right = ")).unwrap();
    let v: f64 = line.trim_start_matches("Delta_right = ").parse().unwrap();
    assert!((v - 0.081704).abs() < 5e-4);

    let r = json(&["big-delta", "--ensemble", "more-nl-mixed", "--mode", "assign"]);
    assert!((r["Delta_right"].as_f64().unwrap() - 1.43552).abs() < 1e-4);

    let r = json(&["big-delta", "--ensemble", "bell-full", "--mode", "assign"]);
    assert!(r["Delta_right"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn big_delta_assign_needs_orthogonality() {
    let f = temp_file(
        r#"{"dims":[2,2],"states":[{"amplitudes":[[1,0],[0,0],[0,0],[0,0]]},{"amplitudes":[[0.6,0],[0.8,0],[0,0],[0,0]]}]}"#,
    );
    let o = nle(&["big-delta", "--file", f.path().to_str().unwrap(), "--mode", "assign"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gram-not-identity"));
}

#[test]
fn dissect_case_two() {
    let o = nle(&["dissect", "--ensemble", "e2-case2", "--first", "B"]);
    let out = stdout(&o);
    let root = out.lines().skip_while(|l| !l.is_empty()).nth(1).unwrap();
    assert!(root.starts_with("leaf: irreducible"), "{out}");

    let o = nle(&["dissect", "--ensemble", "e2-case2", "--first", "A"]);
    assert!(stdout(&o).contains("complete = true"));

    let o = nle(&["dissect", "--ensemble", "tiles-upb"]);
    assert!(stdout(&o).contains("non-dissectible"));
}

#[test]
fn dissect_rejects_entangled_sets() {
    let o = nle(&["dissect", "--ensemble", "bell-full"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_output() {
    let o = nle(&["bounds", "--ensemble", "bell-full"]);
    assert!(
        stdout(&o).contains("chi = 2.000000, local_holevo = 1.000000"),
        "{}",
        stdout(&o)
    );

    let r = json(&["bounds", "--ensemble", "nlwe-3x3"]);
    assert!((r["local_holevo"].as_f64().unwrap() - 2.0 * 3f64.log2()).abs() < 1e-9);
}

#[test]
fn bounds_from_file_has_all_fields() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let f = temp_file(&format!(
        r#"{{"dims":[2,2],"states":[{{"probability":0.25,"amplitudes":[[{h},0],[0,0],[0,0],[{h},0]]}},{{"probability":0.75,"amplitudes":[[0,0],[1,0],[0,0],[0,0]]}}]}}"#
    ));
    let r = json(&["bounds", "--file", f.path().to_str().unwrap()]);
    for key in ["chi", "local_holevo", "cnot_lower", "cnot_upper"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn file_errors_exit_three() {
    let o = nle(&["delta", "--file", "/nonexistent/ensemble.json"]);
    assert_eq!(o.status.code(), Some(3));

    let f = temp_file("not json");
    assert_eq!(
        nle(&["delta", "--file", f.path().to_str().unwrap()]).status.code(),
        Some(3)
    );

    let unnormalized = temp_file(r#"{"dims":[2,2],"states":[{"amplitudes":[[1,0],[1,0],[0,0],[0,0]]}]}"#);
    assert_eq!(
        nle(&["delta", "--file", unnormalized.path().to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );

    let partial = temp_file(
        r#"{"dims":[2,2],"states":[{"probability":1.0,"amplitudes":[[1,0],[0,0],[0,0],[0,0]]},{"amplitudes":[[0,0],[1,0],[0,0],[0,0]]}]}"#,
    );
    assert_eq!(
        nle(&["delta", "--file", partial.path().to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );

    let bad_sum = temp_file(
        r#"{"dims":[2,2],"states":[{"probability":0.5,"amplitudes":[[1,0],[0,0],[0,0],[0,0]]},{"probability":0.6,"amplitudes":[[0,0],[1,0],[0,0],[0,0]]}]}"#,
    );
    assert_eq!(
        nle(&["delta", "--file", bad_sum.path().to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );

    let wrong_len = temp_file(r#"{"dims":[2,2],"states":[{"amplitudes":[[1,0],[0,0]]}]}"#);
    assert_eq!(
        nle(&["delta", "--file", wrong_len.path().to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn unknown_entry_and_bad_params() {
    let o = nle(&["delta", "--ensemble", "no-such"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no-such-entry"));
    let o = nle(&[
        "big-delta",
        "--ensemble",
        "ghosh-nonmax",
        "--param",
        "a=0.9",
        "--param",
        "b=0.9",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad-params"));
    assert_eq!(
        nle(&["delta", "--ensemble", "nlwe-3x3", "--mode", "bogus"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn params_and_indices() {
    let r = json(&[
        "big-delta",
        "--ensemble",
        "ghosh-nonmax",
        "--param",
        "b=0.3",
        "--indices",
        "1,2,3",
    ]);
    let b2: f64 = 0.09;
    let expected = (2.0 - (2.0 - b2) * (2.0 - b2).log2() - (1.0 + b2) * (1.0 + b2).log2()) / 3.0;
    assert!((r["Delta_right"].as_f64().unwrap() - expected).abs() < 1e-9);
    assert_eq!(r["members"], 3);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let f = temp_file(
        r#"{"dims":[2,2],"states":[{"amplitudes":[[1,0],[0,0],[0,0],[0,0]]},{"amplitudes":[[0,0],[1,0],[0,0],[0,0]]},{"amplitudes":[[0,0],[0,0],[0.6,0],[0.8,0]]}]}"#,
    );
    let path = f.path().to_str().unwrap();
    let args = [
        "delta",
        "--file",
        path,
        "--mode",
        "ensemble-lu",
        "--restarts",
        "4",
        "--seed",
        "7",
        "--json",
    ];
    let a = nle(&args);
    let b = nle(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn catalog_list_and_show() {
    let o = nle(&["catalog", "list"]);
    let out = stdout(&o);
    assert!(out.contains("nlwe-3x3"));
    let upb = out.lines().find(|l| l.starts_with("tiles-upb")).unwrap();
    assert!(upb.contains("3x3") && upb.contains(" 5 "));

    let list = json(&["catalog", "list"]);
    let names: Vec<&str> = list
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    for name in &names {
        let o = nle(&["show", "--ensemble", name]);
        assert_eq!(o.status.code(), Some(0), "{name}");
    }
}

#[test]
fn show_round_trips_through_file() {
    let shown = nle(&["show", "--ensemble", "tiles-upb", "--json"]);
    let f = temp_file(&stdout(&shown));
    let from_file = json(&["delta", "--file", f.path().to_str().unwrap()]);
    let from_name = json(&["delta", "--ensemble", "tiles-upb"]);
    assert!((from_file["delta_right"].as_f64().unwrap() - from_name["delta_right"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn every_command_accepts_matching_catalog_entries() {
    for entry in json(&["catalog", "list"]).as_array().unwrap() {
        let name = entry["name"].as_str().unwrap();
        let product = entry["product"].as_bool().unwrap();
        let delta = nle(&["delta", "--ensemble", name]);
        assert_eq!(delta.status.code(), Some(if product { 0 } else { 2 }), "delta {name}");
        let gap = nle(&["big-delta", "--ensemble", name]);
        assert_eq!(gap.status.code(), Some(0), "big-delta {name}");
        let bounds = nle(&["bounds", "--ensemble", name]);
        assert_eq!(bounds.status.code(), Some(0), "bounds {name}");
    }
}
