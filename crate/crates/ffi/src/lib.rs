//! C ABI over the calculator: opaque session handles, status codes, and
//! JSON strings in both directions.
//!
//! Every function is panic-safe at the boundary. Strings returned through
//! out-parameters are heap-allocated by this library and must be released
//! with [`he_string_free`]; never free them with the host allocator.

use hasse_embed::cli::{report_for, ReportCommand};
use hasse_embed::error::Error;
use hasse_embed::schema::{parse_document, RunInputs};
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HeStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null or not valid UTF-8.
    ArgumentError = 1,
    /// The configuration document failed to parse against the schema.
    ParseError = 2,
    /// The configuration parsed but failed mathematical validation, or
    /// the requested report needs inputs the document does not carry.
    ValidationError = 3,
    /// An internal invariant failed; report this as a bug.
    InternalError = 4,
}

/// Opaque handle holding a parsed and validated configuration.
pub struct HeSession {
    inputs: RunInputs,
}

fn status_of(err: &Error) -> HeStatus {
    match err {
        Error::Schema { .. } | Error::Io(_) => HeStatus::ParseError,
        Error::Internal(_) | Error::WitnessSearchExhausted(_) => HeStatus::InternalError,
        _ => HeStatus::ValidationError,
    }
}

fn store_string(out: *mut *mut c_char, text: &str) {
    if out.is_null() {
        return;
    }
    let c = CString::new(text.replace('\0', " ")).expect("NUL stripped");
    unsafe { *out = c.into_raw() };
}

fn clear(out: *mut *mut c_char) {
    if !out.is_null() {
        unsafe { *out = ptr::null_mut() };
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

fn guarded<F: FnOnce() -> HeStatus>(error_out: *mut *mut c_char, f: F) -> HeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            store_string(error_out, "internal panic");
            HeStatus::InternalError
        }
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn he_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Parse and validate a configuration document into a session.
///
/// On success writes a handle to `session_out` and returns Ok; on failure
/// writes an error message to `error_out` (when non-null) and leaves
/// `session_out` null.
///
/// # Safety
/// `config_json` must be a valid NUL-terminated string. `session_out`
/// must be a valid pointer. The session must be released with
/// [`he_session_free`].
#[no_mangle]
pub unsafe extern "C" fn he_session_new(
    config_json: *const c_char,
    session_out: *mut *mut HeSession,
    error_out: *mut *mut c_char,
) -> HeStatus {
    clear(error_out);
    if session_out.is_null() {
        return HeStatus::ArgumentError;
    }
    *session_out = ptr::null_mut();
    let Some(text) = read_str(config_json) else {
        store_string(error_out, "config_json is null or not UTF-8");
        return HeStatus::ArgumentError;
    };
    guarded(error_out, || {
        match parse_document(text).and_then(|doc| doc.into_inputs()) {
            Ok(inputs) => {
                let session = Box::new(HeSession { inputs });
                unsafe { *session_out = Box::into_raw(session) };
                HeStatus::Ok
            }
            Err(e) => {
                store_string(error_out, &e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Release a session created by [`he_session_new`]. Null is a no-op.
///
/// # Safety
/// `session` must be a pointer previously returned by [`he_session_new`]
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn he_session_free(session: *mut HeSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Run a report command against a session and return the JSON report.
///
/// `command` is one of "analyze", "obstruction", "rho", "sha-check",
/// "descent", or "witness I J" with 1-based factor indices.
///
/// # Safety
/// `session` must be a live handle from [`he_session_new`]; `command`
/// must be a valid NUL-terminated string; `report_out` must be a valid
/// pointer. The returned string must be freed with [`he_string_free`].
#[no_mangle]
pub unsafe extern "C" fn he_session_report(
    session: *const HeSession,
    command: *const c_char,
    report_out: *mut *mut c_char,
    error_out: *mut *mut c_char,
) -> HeStatus {
    clear(error_out);
    if report_out.is_null() {
        return HeStatus::ArgumentError;
    }
    *report_out = ptr::null_mut();
    let Some(session) = session.as_ref() else {
        store_string(error_out, "session is null");
        return HeStatus::ArgumentError;
    };
    let Some(command) = read_str(command) else {
        store_string(error_out, "command is null or not UTF-8");
        return HeStatus::ArgumentError;
    };
    guarded(error_out, || {
        let run = ReportCommand::parse(command)
            .and_then(|cmd| report_for(&session.inputs, &cmd));
        match run {
            Ok(report) => {
                store_string(report_out, &report.to_json());
                HeStatus::Ok
            }
            Err(e) => {
                store_string(error_out, &e.to_string());
                status_of(&e)
            }
        }
    })
}

/// One-shot convenience: parse a configuration and run `analyze`.
///
/// # Safety
/// Same contracts as [`he_session_new`] and [`he_session_report`].
#[no_mangle]
pub unsafe extern "C" fn he_analyze(
    config_json: *const c_char,
    report_out: *mut *mut c_char,
    error_out: *mut *mut c_char,
) -> HeStatus {
    let mut session: *mut HeSession = ptr::null_mut();
    let status = he_session_new(config_json, &mut session, error_out);
    if status != HeStatus::Ok {
        return status;
    }
    let command = CString::new("analyze").expect("static");
    let status = he_session_report(session, command.as_ptr(), report_out, error_out);
    he_session_free(session);
    status
}

/// Release a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be a pointer previously returned through a `report_out` or
/// `error_out` parameter of this library, and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn he_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
