use std::ffi::{CStr, CString};
use std::ptr;

use acs_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { acs_string_free(s) };
    out
}

fn last_error() -> String {
    let p = acs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn builtin(name: &str) -> *mut AcsFixture {
    let mut fx = ptr::null_mut();
    let name = CString::new(name).unwrap();
    assert_eq!(
        unsafe { acs_fixture_builtin(name.as_ptr(), &mut fx) },
        AcsStatus::Ok
    );
    fx
}

#[test]
fn cohomology_through_the_handle() {
    let fx = builtin("so3");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { acs_cohomology(fx, &mut out) }, AcsStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["betti"], serde_json::json!([1, 0, 0, 1]));
    unsafe { acs_fixture_free(fx) };
}

#[test]
fn transgression_residual_is_zero() {
    let fx = builtin("chart2");
    let conns = CString::new("basepoint,gamma").unwrap();
    let mut out = ptr::null_mut();
    let s = unsafe {
        acs_evaluate(
            fx,
            AcsFormKind::Transgression,
            conns.as_ptr(),
            1,
            3,
            9,
            &mut out,
        )
    };
    assert_eq!(s, AcsStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    for e in v["evaluations"].as_array().unwrap() {
        assert_eq!(e["value"], "0");
    }
    unsafe { acs_fixture_free(fx) };
}

#[test]
fn verify_reports_jsonl() {
    let fx = builtin("abelian3");
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { acs_verify(fx, 7, 1, 1, 1, &mut out) },
        AcsStatus::Ok
    );
    let report = take(out);
    assert!(report.lines().all(|l| l.contains("\"status\":\"pass\"")));
    assert_eq!(
        unsafe { acs_verify(fx, 7, 1, 4, 1, &mut out) },
        AcsStatus::InvalidArgument
    );
    unsafe { acs_fixture_free(fx) };
}

#[test]
fn mutated_fixture_codes() {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/fixtures/negative/so3_mutated.json"
    );
    let path = CString::new(path).unwrap();
    let mut fx = ptr::null_mut();
    assert_eq!(
        unsafe { acs_fixture_load(path.as_ptr(), 1, &mut fx) },
        AcsStatus::AxiomFailure
    );
    assert!(last_error().contains("antisymmetry"));

    assert_eq!(
        unsafe { acs_fixture_load(path.as_ptr(), 0, &mut fx) },
        AcsStatus::Ok
    );
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { acs_verify(fx, 7, 1, 1, 1, &mut out) },
        AcsStatus::CheckFailed
    );
    assert!(take(out).contains("\"status\":\"skipped\""));
    unsafe { acs_fixture_free(fx) };
}

#[test]
fn bad_inputs() {
    let mut fx = ptr::null_mut();
    assert_eq!(
        unsafe { acs_fixture_builtin(ptr::null(), &mut fx) },
        AcsStatus::NullPointer
    );
    let junk = CString::new("{\"name\": 3}").unwrap();
    assert_eq!(
        unsafe { acs_fixture_from_json(junk.as_ptr(), 1, &mut fx) },
        AcsStatus::Schema
    );
    assert!(!last_error().is_empty());
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { acs_cohomology(ptr::null(), &mut out) },
        AcsStatus::NullPointer
    );

    let chart = builtin("chart2");
    assert_eq!(
        unsafe { acs_cohomology(chart, &mut out) },
        AcsStatus::InvalidArgument
    );
    let missing = CString::new("nope").unwrap();
    assert_eq!(
        unsafe { acs_evaluate(chart, AcsFormKind::Cs, missing.as_ptr(), 1, 1, 0, &mut out) },
        AcsStatus::Schema
    );
    unsafe { acs_fixture_free(chart) };
}

#[test]
fn json_round_trip() {
    let fx = builtin("foliation");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { acs_fixture_json(fx, &mut out) }, AcsStatus::Ok);
    let text = CString::new(take(out)).unwrap();
    let mut again = ptr::null_mut();
    assert_eq!(
        unsafe { acs_fixture_from_json(text.as_ptr(), 1, &mut again) },
        AcsStatus::Ok
    );
    unsafe {
        acs_fixture_free(fx);
        acs_fixture_free(again);
    }
}

#[test]
fn header_declares_the_surface() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/acs.h")).unwrap();
    for sym in [
        "acs_fixture_load",
        "acs_verify",
        "acs_evaluate",
        "acs_string_free",
        "acs_last_error",
        "ACS_STATUS_CHECK_FAILED",
        "typedef struct AcsFixture AcsFixture",
    ] {
        assert!(header.contains(sym), "{sym} missing from acs.h");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let exe = std::env::current_exe().unwrap();
    let target = exe.parent().unwrap().parent().unwrap();
    let lib = target.join("libacs_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let manifest = env!("CARGO_MANIFEST_DIR");
    let cc = std::process::Command::new("cc")
        .args([
            &format!("{manifest}/tests/c/smoke.c"),
            "-I",
            &format!("{manifest}/include"),
        ])
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .expect("cc runs");
    assert!(
        cc.status.success(),
        "{}",
        String::from_utf8_lossy(&cc.stderr)
    );
    let run = std::process::Command::new(&bin).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
