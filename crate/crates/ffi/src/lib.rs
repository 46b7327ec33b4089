//! C ABI over `acs-core`.
//!
//! Fixtures live behind an opaque [`AcsFixture`] handle. Every call returns an
//! [`AcsStatus`]; on failure the message is available from
//! [`acs_last_error`] on the same thread. Structured results are handed out as
//! JSON strings which the caller releases with [`acs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde_json::json;

use acs_core::chern::{cs_form, transgression_residual_form};
use acs_core::cohomology::build_complex;
use acs_core::fixture::{parse_fixture, parse_fixture_unchecked, Fixture};
use acs_core::forms::form_eval;
use acs_core::random::random_sections;
use acs_core::suite::{run_suite, SuiteConfig};
use acs_core::{fixtures, AcsError};

/// Result codes. `ACS_STATUS_OK` is zero; everything else is an error except
/// `ACS_STATUS_CHECK_FAILED`, which reports a computed negative verdict.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcsStatus {
    Ok = 0,
    CheckFailed = 1,
    NullPointer = 2,
    InvalidUtf8 = 3,
    InvalidArgument = 4,
    Schema = 5,
    AxiomFailure = 6,
    Math = 7,
    Io = 8,
    Panic = 9,
}

/// Which form [`acs_evaluate`] builds.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcsFormKind {
    /// `ch_p` of the first connection.
    Ch = 0,
    /// `cs_p` of the whole list.
    Cs = 1,
    /// The transgression residual of the list, identically zero when correct.
    Transgression = 2,
}

/// A validated (or, on request, unvalidated) fixture.
pub struct AcsFixture {
    inner: Fixture,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(AcsStatus, String);

impl From<AcsError> for Failure {
    fn from(e: AcsError) -> Self {
        let status = match &e {
            AcsError::Schema { .. } | AcsError::UnresolvedRef(_) => AcsStatus::Schema,
            AcsError::AxiomFailure { .. } => AcsStatus::AxiomFailure,
            AcsError::InvalidArgument(_) | AcsError::Arity { .. } => AcsStatus::InvalidArgument,
            AcsError::Io(_) => AcsStatus::Io,
            _ => AcsStatus::Math,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<AcsStatus, Failure>) -> AcsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Failure(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            AcsStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(AcsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(AcsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn fixture<'a>(fx: *const AcsFixture) -> Result<&'a Fixture, Failure> {
    fx.as_ref()
        .map(|f| &f.inner)
        .ok_or_else(|| Failure(AcsStatus::NullPointer, "fixture handle is null".into()))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            AcsStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    *out = CString::new(s).expect("JSON has no nul bytes").into_raw();
    Ok(())
}

unsafe fn put_fixture(out: *mut *mut AcsFixture, fx: Fixture) -> Result<AcsStatus, Failure> {
    if out.is_null() {
        return Err(Failure(
            AcsStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    *out = Box::into_raw(Box::new(AcsFixture { inner: fx }));
    Ok(AcsStatus::Ok)
}

fn parse(json: &str, checked: bool) -> Result<Fixture, Failure> {
    Ok(if checked {
        parse_fixture(json)?
    } else {
        parse_fixture_unchecked(json)?
    })
}

/// The message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn acs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn acs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a fixture from JSON text. With `checked` nonzero the algebroid and
/// connection axioms are verified first and a violation returns
/// `ACS_STATUS_AXIOM_FAILURE`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn acs_fixture_from_json(
    json: *const c_char,
    checked: i32,
    out: *mut *mut AcsFixture,
) -> AcsStatus {
    guard(|| {
        let fx = parse(text(json, "json")?, checked != 0)?;
        put_fixture(out, fx)
    })
}

/// Reads a fixture file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn acs_fixture_load(
    path: *const c_char,
    checked: i32,
    out: *mut *mut AcsFixture,
) -> AcsStatus {
    guard(|| {
        let path = text(path, "path")?;
        let json = std::fs::read_to_string(path)
            .map_err(|e| Failure(AcsStatus::Io, format!("{path}: {e}")))?;
        put_fixture(out, parse(&json, checked != 0)?)
    })
}

/// One of the built-in fixtures (`so3`, `chart2`, ...).
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn acs_fixture_builtin(
    name: *const c_char,
    out: *mut *mut AcsFixture,
) -> AcsStatus {
    guard(|| {
        let name = text(name, "name")?;
        let fx = fixtures::by_name(name).ok_or_else(|| {
            Failure(
                AcsStatus::InvalidArgument,
                format!("no built-in fixture `{name}`"),
            )
        })?;
        put_fixture(out, fx)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `fx` must come from one of the constructors and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn acs_fixture_free(fx: *mut AcsFixture) {
    if !fx.is_null() {
        drop(Box::from_raw(fx));
    }
}

/// The fixture serialized back to JSON.
///
/// # Safety
/// `fx` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn acs_fixture_json(
    fx: *const AcsFixture,
    out: *mut *mut c_char,
) -> AcsStatus {
    guard(|| {
        put_string(out, fixture(fx)?.to_json_pretty())?;
        Ok(AcsStatus::Ok)
    })
}

/// Runs the full verification suite and writes the JSONL report to `out`.
/// Returns `ACS_STATUS_CHECK_FAILED` when any check fails; the report is written
/// either way.
///
/// # Safety
/// `fx` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn acs_verify(
    fx: *const AcsFixture,
    seed: u64,
    samples: u32,
    p_max: u32,
    k_max: u32,
    out: *mut *mut c_char,
) -> AcsStatus {
    guard(|| {
        let fx = fixture(fx)?;
        if !(1..=3).contains(&p_max) || !(1..=3).contains(&k_max) || samples == 0 {
            return Err(Failure(
                AcsStatus::InvalidArgument,
                "p_max and k_max must lie in 1..=3, samples ≥ 1".into(),
            ));
        }
        let cfg = SuiteConfig {
            seed,
            samples: samples as usize,
            p_max: p_max as usize,
            k_max: k_max as usize,
            ..SuiteConfig::default()
        };
        let report = run_suite(fx, &cfg);
        put_string(out, report.to_jsonl())?;
        Ok(if report.passed() {
            AcsStatus::Ok
        } else {
            AcsStatus::CheckFailed
        })
    })
}

/// Betti numbers and cochain dimensions of a point fixture, as JSON.
///
/// # Safety
/// `fx` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn acs_cohomology(fx: *const AcsFixture, out: *mut *mut c_char) -> AcsStatus {
    guard(|| {
        let fx = fixture(fx)?;
        let cx = build_complex(&fx.algebroid, None)?;
        let witness = cx.d_squared_witness();
        let v = json!({
            "fixture": fx.name,
            "cochain_dims": (0..=cx.top()).map(|k| cx.dim(k)).collect::<Vec<_>>(),
            "betti": cx.betti_numbers(),
            "d_squared_zero": witness.is_none(),
        });
        put_string(out, v.to_string())?;
        Ok(if witness.is_none() {
            AcsStatus::Ok
        } else {
            AcsStatus::CheckFailed
        })
    })
}

/// Evaluates `ch_p`, `cs_p` or the transgression residual of the
/// comma-separated `connections` on `count` seeded random tuples. The JSON
/// result lists each tuple with its exact value. For `ACS_FORM_KIND_TRANSGRESSION`
/// a nonzero residual returns `ACS_STATUS_CHECK_FAILED`.
///
/// # Safety
/// `fx` must be a live handle, `connections` a nul-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn acs_evaluate(
    fx: *const AcsFixture,
    kind: AcsFormKind,
    connections: *const c_char,
    p: u32,
    count: u32,
    seed: u64,
    out: *mut *mut c_char,
) -> AcsStatus {
    guard(|| {
        let fx = fixture(fx)?;
        let names: Vec<&str> = text(connections, "connections")?
            .split(',')
            .map(str::trim)
            .collect();
        let conns = names
            .iter()
            .map(|n| fx.connection(n).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        let p = p as usize;
        let form = match kind {
            AcsFormKind::Ch => cs_form(&conns[..1], p)?,
            AcsFormKind::Cs => cs_form(&conns, p)?,
            AcsFormKind::Transgression => transgression_residual_form(&conns, p)?,
        };
        let set = fx.setting();
        let deg = form.degree()?;
        let count = count.max(1) as usize;
        let secs = random_sections(&set.alg, count * deg, 2, seed);
        let mut evals = Vec::new();
        let mut all_zero = true;
        for t in 0..count {
            let args = &secs[t * deg..(t + 1) * deg];
            let v = form_eval(&form, &set, args)?.into_scalar("value")?;
            all_zero &= v.is_zero();
            evals.push(json!({ "args": args, "value": v.to_string() }));
        }
        put_string(
            out,
            json!({ "fixture": fx.name, "p": p, "degree": deg, "evaluations": evals }).to_string(),
        )?;
        Ok(if kind == AcsFormKind::Transgression && !all_zero {
            AcsStatus::CheckFailed
        } else {
            AcsStatus::Ok
        })
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn acs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
