use std::path::PathBuf;

use acs_core::fixture::{load_fixture, load_fixture_unchecked};
use acs_core::suite::{run_suite, Status, SuiteConfig};
use acs_core::{fixtures, AcsError};

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

#[test]
fn shipped_files_match_the_builtins() {
    for (name, _) in fixtures::all_algebroids() {
        let text = std::fs::read_to_string(shipped(&format!("{name}.json"))).unwrap();
        let on_disk: serde_json::Value = serde_json::from_str(&text).unwrap();
        let built = serde_json::to_value(fixtures::file_by_name(&name).unwrap()).unwrap();
        assert_eq!(
            on_disk, built,
            "fixtures/{name}.json is stale; regenerate with `acs fixture {name}`"
        );
        let fx = load_fixture(&shipped(&format!("{name}.json"))).unwrap();
        assert_eq!(fx, fixtures::by_name(&name).unwrap());
    }
}

#[test]
fn mutated_fixture_is_rejected_on_checked_load() {
    match load_fixture(&shipped("negative/so3_mutated.json")) {
        Err(AcsError::AxiomFailure { identity, witness }) => {
            assert_eq!(identity, "antisymmetry");
            assert!(witness.contains("c^3_{1,2}"), "{witness}");
        }
        other => panic!("expected an axiom failure, got {other:?}"),
    }
}

#[test]
fn so3_passes_everything() {
    let fx = fixtures::by_name("so3").unwrap();
    let report = run_suite(&fx, &SuiteConfig::default());
    assert!(report.passed(), "{}", report.summary_table());
    assert_eq!(report.count(Status::Skipped), 0);
    for group in [
        "axioms",
        "leibniz",
        "curvature",
        "forms",
        "chern-simons",
        "cohomology",
    ] {
        assert!(
            report.checks.iter().any(|c| c.group == group),
            "no checks in {group}"
        );
    }
    let betti = report.get("cohomology/betti").unwrap();
    assert_eq!(betti.note.as_deref(), Some("betti = [1, 0, 0, 1]"));
}

#[test]
fn reports_are_deterministic() {
    let fx = fixtures::by_name("nonabelian2").unwrap();
    let cfg = SuiteConfig {
        seed: 11,
        samples: 2,
        ..SuiteConfig::default()
    };
    let a = run_suite(&fx, &cfg).to_jsonl();
    let b = run_suite(&fx, &cfg).to_jsonl();
    assert_eq!(a, b);
    let c = run_suite(&fx, &SuiteConfig { seed: 12, ..cfg }).to_jsonl();
    assert_eq!(a.lines().count(), c.lines().count());
}

#[test]
fn mutated_fixture_fails_and_skips_downstream() {
    let fx = load_fixture_unchecked(&shipped("negative/so3_mutated.json")).unwrap();
    let report = run_suite(
        &fx,
        &SuiteConfig {
            samples: 2,
            ..SuiteConfig::default()
        },
    );
    assert!(!report.passed());
    let jacobi = report.get("axioms/jacobi-frame").unwrap();
    assert_eq!(jacobi.status, Status::Fail);
    assert!(jacobi.witness.as_deref().unwrap().contains("jacobiator"));
    for c in report.checks.iter().filter(|c| c.group != "axioms") {
        assert_eq!(c.status, Status::Skipped, "{}", c.name);
    }
}

#[test]
fn foliation_transgression_with_basepoint_correction() {
    let fx = fixtures::by_name("foliation").unwrap();
    let cfg = SuiteConfig {
        samples: 3,
        p_max: 1,
        ..SuiteConfig::default()
    };
    let report = run_suite(&fx, &cfg);
    let with_basepoint: Vec<_> = report
        .matching("chern-simons/transgression/")
        .filter(|c| c.name.contains("basepoint"))
        .collect();
    assert!(!with_basepoint.is_empty());
    for c in with_basepoint {
        assert_eq!(c.status, Status::Pass, "{}: {:?}", c.name, c.witness);
    }
    assert!(report.passed(), "{}", report.summary_table());
}

#[test]
fn jsonl_lines_carry_name_identity_and_status() {
    let fx = fixtures::by_name("abelian3").unwrap();
    let report = run_suite(
        &fx,
        &SuiteConfig {
            samples: 1,
            p_max: 1,
            k_max: 1,
            ..SuiteConfig::default()
        },
    );
    for line in report.to_jsonl().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["name"].is_string() && v["identity"].is_string());
        assert!(["pass", "fail", "skipped"].contains(&v["status"].as_str().unwrap()));
        assert!(v.get("elapsed").is_none());
    }
}
