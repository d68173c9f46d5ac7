//! C ABI for the spingeo verification engine.
//!
//! The surface is handle-based: build a `SpingeoConfig`, set options, run it
//! to obtain a `SpingeoReport`, read the JSON or the summary out of the
//! report, free both. All strings returned from report accessors are owned
//! by the report and stay valid until `spingeo_report_free`; strings
//! returned as `char*` (listing, last error) are freed with
//! `spingeo_string_free`.
//!
//! Status codes mirror the CLI exit codes: 0 success, 1 at least one check
//! failed, 2 usage error, 3 numerical build failure.

use spingeo::report::{list_checks, CheckReport};
use spingeo::suite::{run_suite, SuiteConfig, SuiteError};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

/// Status codes returned by the entry points.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum SpingeoStatus {
    /// Suite ran and every check passed.
    Ok = 0,
    /// Suite ran but at least one check failed.
    ChecksFailed = 1,
    /// Invalid configuration (unknown suite, model, or check id).
    Usage = 2,
    /// A shipped construction failed its own defining equation.
    Build = 3,
    /// A required pointer argument was null.
    NullArgument = 4,
    /// A string argument was not valid UTF-8.
    BadUtf8 = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Opaque suite configuration handle.
pub struct SpingeoConfig {
    inner: SuiteConfig,
}

/// Opaque report handle; owns its serialized forms.
pub struct SpingeoReport {
    report: CheckReport,
    json: CString,
    summary: CString,
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, SpingeoStatus> {
    if ptr.is_null() {
        return Err(SpingeoStatus::NullArgument);
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| SpingeoStatus::BadUtf8)
}

/// Create a configuration for the named suite (clifford, models, s3,
/// hypersurface, dim2, dim4, dim5, identities, all). Defaults: 100 samples,
/// seed 42, no model, no tolerance overrides. Returns null on invalid input.
///
/// # Safety
/// `suite` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn spingeo_config_new(suite: *const c_char) -> *mut SpingeoConfig {
    match unsafe { read_str(suite) } {
        Ok(s) => Box::into_raw(Box::new(SpingeoConfig {
            inner: SuiteConfig::new(s),
        })),
        Err(_) => {
            set_last_error("suite name is null or not UTF-8");
            ptr::null_mut()
        }
    }
}

/// Select the candidate or model the suite runs on.
///
/// # Safety
/// `cfg` must come from `spingeo_config_new`; `model` must be a valid
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn spingeo_config_set_model(
    cfg: *mut SpingeoConfig,
    model: *const c_char,
) -> SpingeoStatus {
    if cfg.is_null() {
        return SpingeoStatus::NullArgument;
    }
    match unsafe { read_str(model) } {
        Ok(m) => {
            unsafe { &mut *cfg }.inner.model = Some(m.to_string());
            SpingeoStatus::Ok
        }
        Err(e) => e,
    }
}

/// # Safety
/// `cfg` must come from `spingeo_config_new`.
#[no_mangle]
pub unsafe extern "C" fn spingeo_config_set_samples(
    cfg: *mut SpingeoConfig,
    samples: usize,
) -> SpingeoStatus {
    if cfg.is_null() {
        return SpingeoStatus::NullArgument;
    }
    unsafe { &mut *cfg }.inner.samples = samples;
    SpingeoStatus::Ok
}

/// # Safety
/// `cfg` must come from `spingeo_config_new`.
#[no_mangle]
pub unsafe extern "C" fn spingeo_config_set_seed(
    cfg: *mut SpingeoConfig,
    seed: u64,
) -> SpingeoStatus {
    if cfg.is_null() {
        return SpingeoStatus::NullArgument;
    }
    unsafe { &mut *cfg }.inner.seed = seed;
    SpingeoStatus::Ok
}

/// Override the tolerance of one check id.
///
/// # Safety
/// `cfg` must come from `spingeo_config_new`; `check_id` must be a valid
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn spingeo_config_set_tolerance(
    cfg: *mut SpingeoConfig,
    check_id: *const c_char,
    tolerance: f64,
) -> SpingeoStatus {
    if cfg.is_null() {
        return SpingeoStatus::NullArgument;
    }
    match unsafe { read_str(check_id) } {
        Ok(id) => {
            unsafe { &mut *cfg }
                .inner
                .tol_overrides
                .push((id.to_string(), tolerance));
            SpingeoStatus::Ok
        }
        Err(e) => e,
    }
}

/// Run the configured suite. On success (`Ok` or `ChecksFailed`) `*out`
/// holds a report handle the caller must free with `spingeo_report_free`.
///
/// # Safety
/// `cfg` must come from `spingeo_config_new`; `out` must point to writable
/// memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn spingeo_run(
    cfg: *const SpingeoConfig,
    out: *mut *mut SpingeoReport,
) -> SpingeoStatus {
    if cfg.is_null() || out.is_null() {
        return SpingeoStatus::NullArgument;
    }
    unsafe { *out = ptr::null_mut() };
    let config = &unsafe { &*cfg }.inner;
    match run_suite(config) {
        Ok(report) => {
            let all_passed = report.all_passed();
            let json = CString::new(report.to_json()).unwrap_or_default();
            let summary = CString::new(report.summary_text()).unwrap_or_default();
            let handle = Box::new(SpingeoReport {
                report,
                json,
                summary,
            });
            unsafe { *out = Box::into_raw(handle) };
            if all_passed {
                SpingeoStatus::Ok
            } else {
                SpingeoStatus::ChecksFailed
            }
        }
        Err(SuiteError::Usage(msg)) => {
            set_last_error(&msg);
            SpingeoStatus::Usage
        }
        Err(SuiteError::Build(msg)) => {
            set_last_error(&msg);
            SpingeoStatus::Build
        }
    }
}

/// JSON document of the report; owned by the report handle.
///
/// # Safety
/// `report` must come from `spingeo_run` and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn spingeo_report_json(report: *const SpingeoReport) -> *const c_char {
    if report.is_null() {
        return ptr::null();
    }
    unsafe { &*report }.json.as_ptr()
}

/// Human-readable summary; owned by the report handle.
///
/// # Safety
/// `report` must come from `spingeo_run` and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn spingeo_report_summary(report: *const SpingeoReport) -> *const c_char {
    if report.is_null() {
        return ptr::null();
    }
    unsafe { &*report }.summary.as_ptr()
}

/// # Safety
/// `report` must come from `spingeo_run` and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn spingeo_report_passed(report: *const SpingeoReport) -> usize {
    if report.is_null() {
        return 0;
    }
    unsafe { &*report }.report.passed()
}

/// # Safety
/// `report` must come from `spingeo_run` and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn spingeo_report_failed(report: *const SpingeoReport) -> usize {
    if report.is_null() {
        return 0;
    }
    unsafe { &*report }.report.failed()
}

/// # Safety
/// `report` must come from `spingeo_run` and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn spingeo_report_inapplicable(report: *const SpingeoReport) -> usize {
    if report.is_null() {
        return 0;
    }
    unsafe { &*report }.report.inapplicable()
}

/// # Safety
/// `report` must come from `spingeo_run`; must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn spingeo_report_free(report: *mut SpingeoReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

/// # Safety
/// `cfg` must come from `spingeo_config_new`; must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn spingeo_config_free(cfg: *mut SpingeoConfig) {
    if !cfg.is_null() {
        drop(unsafe { Box::from_raw(cfg) });
    }
}

/// Newly allocated listing of every check id with module and anchor; free
/// with `spingeo_string_free`.
#[no_mangle]
pub extern "C" fn spingeo_list_checks() -> *mut c_char {
    CString::new(list_checks())
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Newly allocated copy of the last error message on this thread, or null;
/// free with `spingeo_string_free`.
#[no_mangle]
pub extern "C" fn spingeo_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(msg) => CString::new(msg.as_bytes())
            .map(CString::into_raw)
            .unwrap_or(ptr::null_mut()),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must have been returned by `spingeo_list_checks` or
/// `spingeo_last_error`, and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spingeo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn run_dim2_suite_through_the_c_surface() {
        let suite = CString::new("dim2").unwrap();
        let cfg = unsafe { spingeo_config_new(suite.as_ptr()) };
        assert!(!cfg.is_null());
        unsafe {
            spingeo_config_set_samples(cfg, 8);
            spingeo_config_set_seed(cfg, 1);
        }
        let mut report: *mut SpingeoReport = ptr::null_mut();
        let status = unsafe { spingeo_run(cfg, &mut report) };
        assert!(status == SpingeoStatus::Ok);
        assert!(!report.is_null());
        let json = unsafe { CStr::from_ptr(spingeo_report_json(report)) };
        assert!(json.to_str().unwrap().contains("\"suite\": \"dim2\""));
        assert!(unsafe { spingeo_report_failed(report) } == 0);
        unsafe {
            spingeo_report_free(report);
            spingeo_config_free(cfg);
        }
    }

    #[test]
    fn usage_errors_surface_through_status_and_message() {
        let suite = CString::new("dim4").unwrap();
        let cfg = unsafe { spingeo_config_new(suite.as_ptr()) };
        let model = CString::new("s3-gks").unwrap();
        unsafe {
            spingeo_config_set_model(cfg, model.as_ptr());
            spingeo_config_set_samples(cfg, 5);
        }
        let mut report: *mut SpingeoReport = ptr::null_mut();
        let status = unsafe { spingeo_run(cfg, &mut report) };
        assert!(status == SpingeoStatus::Usage);
        assert!(report.is_null());
        let err = spingeo_last_error();
        assert!(!err.is_null());
        let msg = unsafe { CStr::from_ptr(err) }.to_str().unwrap().to_string();
        assert!(msg.contains("dimension"), "{msg}");
        unsafe {
            spingeo_string_free(err);
            spingeo_config_free(cfg);
        }
    }

    #[test]
    fn listing_is_returned_and_freed() {
        let s = spingeo_list_checks();
        assert!(!s.is_null());
        let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
        assert!(text.contains("three2"));
        unsafe { spingeo_string_free(s) };
    }
}
