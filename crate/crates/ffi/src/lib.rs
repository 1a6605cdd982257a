//! C ABI for the tfractal toolkit.
//!
//! Objects cross the boundary as opaque handles created by `tf_*_new` and
//! released by the matching `tf_*_free`. Every fallible call returns a
//! [`TfStatus`]; on failure `tf_last_error_message` describes the error on
//! the calling thread. Exact rationals and structured results are returned
//! as NUL-terminated strings owned by the caller and released with
//! [`tf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tfractal::atlas::{partial_area, validate_table, Atlas, GlobalPoint};
use tfractal::tracer::{reverse, trace, Budgets, Termination, TraceRecord};
use tfractal::{address, Direction, ElusiveAddress, Error, Rat};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    EqualAddresses = 4,
    ScanBudgetExceeded = 5,
    VertexHit = 6,
    NotOnEdge = 7,
    StartOnVertex = 8,
    OutsidePiece = 9,
    InvalidDirection = 10,
    DegenerateRegression = 11,
    RaysDiverge = 12,
    Precondition = 13,
    MissingRule = 14,
    Panic = 15,
}

impl From<&Error> for TfStatus {
    fn from(e: &Error) -> TfStatus {
        match e {
            Error::Parse(_) => TfStatus::Parse,
            Error::EqualAddresses => TfStatus::EqualAddresses,
            Error::ScanBudgetExceeded(_) => TfStatus::ScanBudgetExceeded,
            Error::VertexHit(_) => TfStatus::VertexHit,
            Error::NotOnEdge(_) => TfStatus::NotOnEdge,
            Error::StartOnVertex => TfStatus::StartOnVertex,
            Error::OutsidePiece(_) => TfStatus::OutsidePiece,
            Error::InvalidDirection(_) => TfStatus::InvalidDirection,
            Error::DegenerateRegression(_) => TfStatus::DegenerateRegression,
            Error::RaysDiverge(_) => TfStatus::RaysDiverge,
            Error::Precondition(_) => TfStatus::Precondition,
            Error::MissingRule(_) => TfStatus::MissingRule,
        }
    }
}

/// How a trace stopped.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfTermination {
    LengthBudget = 0,
    CrossingBudget = 1,
    DepthLimit = 2,
    HitSingularity = 3,
    ClosedUp = 4,
}

impl From<Termination> for TfTermination {
    fn from(t: Termination) -> TfTermination {
        match t {
            Termination::LengthBudget => TfTermination::LengthBudget,
            Termination::CrossingBudget => TfTermination::CrossingBudget,
            Termination::DepthLimit => TfTermination::DepthLimit,
            Termination::HitSingularity => TfTermination::HitSingularity,
            Termination::ClosedUp => TfTermination::ClosedUp,
        }
    }
}

/// Opaque atlas handle.
pub struct TfAtlas(Atlas);

/// Opaque trace handle.
pub struct TfTrace(TraceRecord);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, recording any error or panic for `tf_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), (TfStatus, String)>) -> TfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TfStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TfStatus::Panic
        }
    }
}

fn core(e: Error) -> (TfStatus, String) {
    ((&e).into(), e.to_string())
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TfStatus, String)> {
    if p.is_null() {
        return Err((TfStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (TfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn null_out(what: &str) -> (TfStatus, String) {
    (TfStatus::NullPointer, format!("{what} is null"))
}

fn owned(s: String) -> *mut c_char {
    CString::new(s).expect("output has no NUL bytes").into_raw()
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn tf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn tf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates the canonical atlas.
#[no_mangle]
pub extern "C" fn tf_atlas_new() -> *mut TfAtlas {
    Box::into_raw(Box::new(TfAtlas(Atlas::canonical())))
}

/// # Safety
/// `atlas` must be null or a handle from `tf_atlas_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tf_atlas_free(atlas: *mut TfAtlas) {
    if !atlas.is_null() {
        drop(Box::from_raw(atlas));
    }
}

/// Runs the structural checks to `depth`; writes whether all passed.
///
/// # Safety
/// `atlas` must be a live handle and `out_passed` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_atlas_validate(atlas: *const TfAtlas, depth: usize, out_passed: *mut bool) -> TfStatus {
    guard(|| {
        let a = atlas.as_ref().ok_or_else(|| null_out("atlas"))?;
        let out = out_passed.as_mut().ok_or_else(|| null_out("out_passed"))?;
        *out = validate_table(a.0.table(), depth).passed;
        Ok(())
    })
}

/// Traces from `start` (`ADDRESS:PIECE:x,y`) along `(dx, dy)` with the
/// flow-time budget `max_length` (a rational such as `"7/2"`).
///
/// # Safety
/// `atlas` must be a live handle, the strings NUL-terminated, and `out`
/// writable. On success `*out` holds a handle to release with
/// `tf_trace_free`.
#[no_mangle]
pub unsafe extern "C" fn tf_trace_new(
    atlas: *const TfAtlas,
    start: *const c_char,
    dx: i64,
    dy: i64,
    max_length: *const c_char,
    max_crossings: usize,
    max_depth: usize,
    out: *mut *mut TfTrace,
) -> TfStatus {
    guard(|| {
        let a = atlas.as_ref().ok_or_else(|| null_out("atlas"))?;
        let out = out.as_mut().ok_or_else(|| null_out("out"))?;
        *out = ptr::null_mut();
        let start: GlobalPoint = read_str(start, "start")?.parse().map_err(core)?;
        let max_length: Rat = read_str(max_length, "max_length")?.parse().map_err(core)?;
        let dir = Direction::new(dx, dy).map_err(core)?;
        let tr = trace(&a.0, &start, dir, &Budgets::new(max_length, max_crossings, max_depth)).map_err(core)?;
        *out = Box::into_raw(Box::new(TfTrace(tr)));
        Ok(())
    })
}

/// Trace of the reversed flow from the end of `tr`.
///
/// # Safety
/// `atlas` and `tr` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_trace_reverse(atlas: *const TfAtlas, tr: *const TfTrace, out: *mut *mut TfTrace) -> TfStatus {
    guard(|| {
        let a = atlas.as_ref().ok_or_else(|| null_out("atlas"))?;
        let t = tr.as_ref().ok_or_else(|| null_out("trace"))?;
        let out = out.as_mut().ok_or_else(|| null_out("out"))?;
        *out = ptr::null_mut();
        *out = Box::into_raw(Box::new(TfTrace(reverse(&a.0, &t.0).map_err(core)?)));
        Ok(())
    })
}

/// # Safety
/// `tr` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tf_trace_free(tr: *mut TfTrace) {
    if !tr.is_null() {
        drop(Box::from_raw(tr));
    }
}

/// Number of straight segments, or 0 for a null handle.
///
/// # Safety
/// `tr` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tf_trace_segment_count(tr: *const TfTrace) -> usize {
    tr.as_ref().map_or(0, |t| t.0.segments.len())
}

/// # Safety
/// `tr` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_trace_termination(tr: *const TfTrace, out: *mut TfTermination) -> TfStatus {
    guard(|| {
        let t = tr.as_ref().ok_or_else(|| null_out("trace"))?;
        *out.as_mut().ok_or_else(|| null_out("out"))? = t.0.termination.into();
        Ok(())
    })
}

/// Exact flow time as a `p/q` string.
///
/// # Safety
/// `tr` must be a live handle and `out` writable; free the result with
/// `tf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tf_trace_flow_time(tr: *const TfTrace, out: *mut *mut c_char) -> TfStatus {
    guard(|| {
        let t = tr.as_ref().ok_or_else(|| null_out("trace"))?;
        *out.as_mut().ok_or_else(|| null_out("out"))? = owned(t.0.flow_time.to_string());
        Ok(())
    })
}

/// The whole trace record as JSON.
///
/// # Safety
/// `tr` must be a live handle and `out` writable; free the result with
/// `tf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tf_trace_to_json(tr: *const TfTrace, out: *mut *mut c_char) -> TfStatus {
    guard(|| {
        let t = tr.as_ref().ok_or_else(|| null_out("trace"))?;
        *out.as_mut().ok_or_else(|| null_out("out"))? = owned(t.0.to_json());
        Ok(())
    })
}

/// Area of the depth-`n` truncation as a `p/q` string.
///
/// # Safety
/// `out` must be writable; free the result with `tf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tf_partial_area(n: u32, out: *mut *mut c_char) -> TfStatus {
    guard(|| {
        *out.as_mut().ok_or_else(|| null_out("out"))? = owned(partial_area(n).to_string());
        Ok(())
    })
}

/// 2-adic distance between two eventually periodic addresses written as
/// `head(period)`, as a `p/q` string.
///
/// # Safety
/// The strings must be NUL-terminated and `out` writable; free the result
/// with `tf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tf_d2(a: *const c_char, b: *const c_char, out: *mut *mut c_char) -> TfStatus {
    guard(|| {
        let a: ElusiveAddress = read_str(a, "a")?.parse().map_err(core)?;
        let b: ElusiveAddress = read_str(b, "b")?.parse().map_err(core)?;
        let out = out.as_mut().ok_or_else(|| null_out("out"))?;
        *out = owned(address::d2(&a, &b).map_err(core)?.to_string());
        Ok(())
    })
}
