use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn acs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn verify_exit_codes() {
    let ok = acs(&[
        "verify",
        &fixture("nonabelian2.json"),
        "--samples",
        "2",
        "--seed",
        "3",
    ]);
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    assert!(String::from_utf8_lossy(&ok.stdout).contains("total"));

    let bad = acs(&[
        "verify",
        &fixture("negative/so3_mutated.json"),
        "--samples",
        "1",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL axioms/jacobi-frame"));
}

#[test]
fn verify_writes_a_jsonl_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.jsonl");
    let out = acs(&[
        "verify",
        "builtin:abelian3",
        "--samples",
        "1",
        "--p-max",
        "1",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().count() > 10);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["status"], "pass");
    }
}

#[test]
fn verify_rejects_large_caps() {
    let out = acs(&["verify", "builtin:so3", "--p-max", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cohomology_of_so3() {
    let out = acs(&["cohomology", &fixture("so3.json")]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["betti"], serde_json::json!([1, 0, 0, 1]));
    assert_eq!(v["d_squared_zero"], true);
}

#[test]
fn cohomology_needs_a_point_base() {
    let out = acs(&["cohomology", &fixture("chart2.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("point"));
}

#[test]
fn is_exact_reports_primitive_or_certificate() {
    let out = acs(&[
        "is-exact",
        "builtin:so3",
        "--degree",
        "3",
        "--form",
        r#"["2"]"#,
    ]);
    let v = json_of(&out);
    assert_eq!(v["result"]["status"], "not_exact");
    assert_eq!(v["result"]["rank_augmented"], 1);

    let out = acs(&[
        "is-exact",
        "builtin:so3",
        "--degree",
        "2",
        "--form",
        r#"["1", "0", "0"]"#,
    ]);
    let v = json_of(&out);
    assert_eq!(v["result"]["status"], "exact");
    assert_eq!(v["check"], true);
}

#[test]
fn transgression_check_on_given_sections() {
    let out = acs(&[
        "transgression-check",
        "builtin:chart2",
        "--connections",
        "basepoint,gamma",
        "-p",
        "1",
        "--sections",
        r#"[["x1", 1], [2, "-1/2"]]"#,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json_of(&out);
    assert_eq!(v["residual_zero"], true);
    assert_eq!(v["evaluations"].as_array().unwrap().len(), 1);
}

#[test]
fn cs_and_ch_evaluate_on_random_tuples() {
    let out = acs(&[
        "cs",
        "builtin:so3",
        "--connections",
        "ad,gamma",
        "-p",
        "1",
        "--random",
        "3",
        "--seed",
        "5",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["evaluations"].as_array().unwrap().len(), 3);
    assert_eq!(v["k"], 1);

    let out = acs(&[
        "ch",
        "builtin:so3",
        "--connections",
        "ad",
        "-p",
        "1",
        "--random",
        "2",
    ]);
    let v = json_of(&out);
    for e in v["evaluations"].as_array().unwrap() {
        assert_eq!(e["display"], "0");
    }
}

#[test]
fn secondary_class_of_a_flat_connection() {
    let out = acs(&[
        "secondary-class",
        "builtin:so3",
        "--connection",
        "ad",
        "--metric",
        "h1",
        "-p",
        "2",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["flat"], true);
    assert_eq!(v["class"]["status"], "exact");
}

#[test]
fn fixture_dump_round_trips() {
    let out = acs(&["fixture", "foliation"]);
    let dumped: Value = serde_json::from_slice(&out.stdout).unwrap();
    let on_disk: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("foliation.json")).unwrap()).unwrap();
    assert_eq!(dumped, on_disk);
    let list = acs(&["fixture", "--list"]);
    assert!(String::from_utf8_lossy(&list.stdout)
        .lines()
        .any(|l| l == "chart2"));
}
