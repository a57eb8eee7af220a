use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use emtor::cli::{EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};
use emtor::graded::{GradedModule, PolynomialRing};
use serde_json::Value;

fn emtor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emtor")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel).display().to_string()
}

fn write_json(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path
}

fn free_module_json() -> Value {
    let ring = PolynomialRing::new(vec![2, 2]).unwrap();
    serde_json::to_value(GradedModule::free(&ring, &[0], 4).to_json()).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(emtor(&["--help"]).status.code(), Some(EXIT_OK));
    assert_eq!(emtor(&["--version"]).status.code(), Some(EXIT_OK));
}

#[test]
fn unknown_flags_are_usage_errors() {
    assert_eq!(emtor(&["tor", "--no-such-flag"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(emtor(&["frobnicate"]).status.code(), Some(EXIT_USAGE));
}

#[test]
fn non_commuting_module_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = free_module_json();
    m["actions"][1][2]["entries"][1][0] = Value::from(2);
    let path = write_json(dir.path(), "bad.json", &m);
    let out = emtor(&["tor", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    assert!(String::from_utf8_lossy(&out.stderr).contains("do not commute"));
}

#[test]
fn malformed_json_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"ring\": ").unwrap();
    assert_eq!(emtor(&["tor", path.to_str().unwrap()]).status.code(), Some(EXIT_VALIDATION));
}

#[test]
fn all_methods_agree_on_a_free_module() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_json(dir.path(), "free.json", &free_module_json());
    let out = emtor(&["tor", path.to_str().unwrap(), "--method", "all"]);
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn tor_json_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let module = write_json(dir.path(), "trivial.json", &{
        let ring = PolynomialRing::new(vec![2, 4]).unwrap();
        serde_json::to_value(GradedModule::trivial(&ring, 12).to_json()).unwrap()
    });
    let tor = dir.path().join("tor.json");
    let first = emtor(&["--format", "json", "--out", tor.to_str().unwrap(), "tor", module.to_str().unwrap()]);
    assert_eq!(first.status.code(), Some(EXIT_OK));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&tor).unwrap()).unwrap();
    let again = emtor(&["--format", "json", "tor", tor.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(EXIT_OK));
    let reread: Value = serde_json::from_str(&stdout(&again)).unwrap();
    assert_eq!(saved["tor"], reread["tor"]);
    assert_eq!(saved["cohomology"], reread["cohomology"]);
}

#[test]
fn group_sl2_has_one_class_in_degree_three() {
    let out = emtor(&["--format", "json", "group", "SL:2", "-D", "12"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["bg_generator_degrees"], serde_json::json!([4]));
    let entries: Vec<(u64, u64, u64)> = v["cohomology"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["n"].as_u64().unwrap(), e["weight"].as_u64().unwrap(), e["dim"].as_u64().unwrap()))
        .collect();
    assert_eq!(entries, vec![(0, 0, 1), (3, 4, 1)]);
    assert_eq!(v["tor_agrees"], Value::Bool(true));
}

#[test]
fn toric_pp2_reports_betti_numbers() {
    let out = emtor(&["toric", &fixture("fans/pp2.json")]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = stdout(&out);
    assert!(text.contains("h-vector: [1, 1, 1]"));
    assert!(text.contains("Betti numbers: [1, 0, 1, 0, 1]"));
}

#[test]
fn strata_of_p1_give_the_equivariant_series() {
    let out = emtor(&["strata", &fixture("orbits/p1_orbits.json"), "-D", "8"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(stdout(&out).contains("1 + 2t^2 + 2t^4 + 2t^6 + 2t^8"));
}

#[test]
fn spectral_sequence_of_a_circle_stabilizes_at_page_two() {
    let out = emtor(&["ss", "--group", "torus:1", "-D", "6"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = stdout(&out);
    assert!(text.contains("stabilized at r = 2"));
    assert!(text.contains("E_2: E^{-0,0}=1 E^{-1,2}=1\n"));
}

#[test]
fn svg_output_is_a_document() {
    let out = emtor(&["--format", "svg", "group", "GL:2", "-D", "12"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = stdout(&out);
    assert!(text.trim_start().starts_with("<svg") && text.trim_end().ends_with("</svg>"));
}

#[test]
fn csv_output_has_a_header() {
    let out = emtor(&["--format", "csv", "toric", &fixture("fans/p1xp1.json")]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(stdout(&out).lines().next().is_some_and(|l| l.contains(',')));
}
