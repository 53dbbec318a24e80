//! C ABI over the orbidisk engine.
//!
//! Models and reports are opaque handles. Every fallible call returns an
//! [`OrbidiskStatus`]; the message of the last failure on the calling thread
//! is available from [`orbidisk_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use orbidisk::cli::{self, Model, Report, RunOptions, Task};
use orbidisk::exactring::{int, parse_rational};

#[repr(C)]
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub enum OrbidiskStatus {
    Ok = 0,
    /// `verify` ran and the two sides differ.
    Mismatch = 1,
    InvalidInput = 2,
    NullPointer = 3,
    Internal = 4,
}

/// A validated geometry with its brane and run settings.
pub struct OrbidiskModel {
    model: Model,
}

/// The result of a computation.
pub struct OrbidiskReport {
    report: Report,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guarded(f: impl FnOnce() -> OrbidiskStatus) -> OrbidiskStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            OrbidiskStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, OrbidiskStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(OrbidiskStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        OrbidiskStatus::InvalidInput
    })
}

fn boxed_model(model: Model, out: *mut *mut OrbidiskModel) -> OrbidiskStatus {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(OrbidiskModel { model })) };
    OrbidiskStatus::Ok
}

/// Loads a built-in example (`c3`, `x111`, `x120`, `x012`, `x000`, `conifold`, `kp2`).
///
/// `framing` may be NULL to keep the example's framing; otherwise it points to
/// `framing_len` integers (`f` for an outer brane, `f+, f-` for an inner one).
///
/// # Safety
/// `name` must be a NUL-terminated string, `framing` must be NULL or point to
/// `framing_len` readable values, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orbidisk_model_from_example(
    name: *const c_char,
    framing: *const i64,
    framing_len: usize,
    out: *mut *mut OrbidiskModel,
) -> OrbidiskStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return OrbidiskStatus::NullPointer;
        }
        let name = match read_str(name) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let mut model = match Model::from_example(name) {
            Ok(m) => m,
            Err(e) => {
                set_error(e.to_string());
                return OrbidiskStatus::InvalidInput;
            }
        };
        if !framing.is_null() {
            model.framing = std::slice::from_raw_parts(framing, framing_len).to_vec();
        }
        boxed_model(model, out)
    })
}

/// Parses a model from the TOML input format.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orbidisk_model_from_toml(
    toml: *const c_char,
    out: *mut *mut OrbidiskModel,
) -> OrbidiskStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return OrbidiskStatus::NullPointer;
        }
        let text = match read_str(toml) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match cli::parse_input(text) {
            Ok(mut m) => {
                m.source = "toml".into();
                boxed_model(m, out)
            }
            Err(d) => {
                set_error(d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n"));
                OrbidiskStatus::InvalidInput
            }
        }
    })
}

/// Sets the truncation order from a rational string such as `"4"` or `"7/2"`.
///
/// # Safety
/// `model` must be a live handle and `max_degree` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn orbidisk_model_set_max_degree(
    model: *mut OrbidiskModel,
    max_degree: *const c_char,
) -> OrbidiskStatus {
    guarded(|| {
        if model.is_null() {
            set_error("null model");
            return OrbidiskStatus::NullPointer;
        }
        let text = match read_str(max_degree) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match parse_rational(text) {
            Ok(t) if t >= int(0) => {
                (*model).model.max_degree = Some(t);
                OrbidiskStatus::Ok
            }
            Ok(_) => {
                set_error("max degree must be nonnegative");
                OrbidiskStatus::InvalidInput
            }
            Err(e) => {
                set_error(e.to_string());
                OrbidiskStatus::InvalidInput
            }
        }
    })
}

/// # Safety
/// `model` must be NULL or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn orbidisk_model_free(model: *mut OrbidiskModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn run_task(
    model: *const OrbidiskModel,
    task: Task,
    out: *mut *mut OrbidiskReport,
) -> OrbidiskStatus {
    guarded(|| {
        if model.is_null() || out.is_null() {
            set_error("null model or output pointer");
            return OrbidiskStatus::NullPointer;
        }
        match cli::report(task, &(*model).model, &RunOptions::default()) {
            Ok(report) => {
                let status = if report.exit_code() == 1 {
                    OrbidiskStatus::Mismatch
                } else {
                    OrbidiskStatus::Ok
                };
                *out = Box::into_raw(Box::new(OrbidiskReport { report }));
                status
            }
            Err(f) => {
                set_error(f.to_string());
                OrbidiskStatus::InvalidInput
            }
        }
    })
}

/// Compares the A-side and B-side potentials. Returns `Mismatch` (with the
/// report still written to `out`) when they differ.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn orbidisk_verify(
    model: *const OrbidiskModel,
    out: *mut *mut OrbidiskReport,
) -> OrbidiskStatus {
    run_task(model, Task::Verify, out)
}

/// Computes the A-side potential, by sector and assembled.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn orbidisk_amodel(
    model: *const OrbidiskModel,
    out: *mut *mut OrbidiskReport,
) -> OrbidiskStatus {
    run_task(model, Task::Amodel, out)
}

/// Computes the B-side potential from the mirror curve.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn orbidisk_bmodel(
    model: *const OrbidiskModel,
    out: *mut *mut OrbidiskReport,
) -> OrbidiskStatus {
    run_task(model, Task::Bmodel, out)
}

/// 1 if a verify report found both sides equal, 0 if not, -1 for other reports or NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn orbidisk_report_equal(report: *const OrbidiskReport) -> i32 {
    if report.is_null() {
        return -1;
    }
    match &(*report).report {
        Report::Verify(v) => i32::from(v.equal),
        _ => -1,
    }
}

/// The report as JSON; free with [`orbidisk_string_free`]. NULL on failure.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn orbidisk_report_to_json(report: *const OrbidiskReport) -> *mut c_char {
    if report.is_null() {
        set_error("null report");
        return ptr::null_mut();
    }
    let json = cli::emit_report(&(*report).report, cli::Format::Json);
    CString::new(json).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `report` must be NULL or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn orbidisk_report_free(report: *mut OrbidiskReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn orbidisk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn orbidisk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
