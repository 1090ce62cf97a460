//! C ABI over the ighsom session API.
//!
//! Every fallible call returns an [`IghsomStatus`]. On failure the message is
//! available from [`ighsom_last_error`] on the same thread. Strings returned
//! through `out` pointers are owned by the caller and must be released with
//! [`ighsom_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ighsom::color::{hue, RgbColor};
use ighsom::hierarchy::GrowthParams;
use ighsom::interactive::{case1_stop, case2_insert};
use ighsom::session::{CorpusUpload, FilterRequest, ParamOverrides, Session};
use ighsom::Error;
use libc::c_char;

/// Opaque analysis session.
pub struct IghsomSession {
    inner: Session,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IghsomStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    NotFound = 5,
    MalformedPath = 6,
    Conflict = 7,
    Precondition = 8,
    Config = 9,
    Fingerprint = 10,
    Snapshot = 11,
    Io = 12,
    Contract = 13,
    Json = 14,
    Delivery = 15,
    Panic = 16,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> IghsomStatus {
    match err {
        Error::Contract(_) => IghsomStatus::Contract,
        Error::Parse { .. } => IghsomStatus::Parse,
        Error::Validation { .. } => IghsomStatus::Validation,
        Error::NotFound(_) => IghsomStatus::NotFound,
        Error::MalformedPath(_) => IghsomStatus::MalformedPath,
        Error::Conflict(_) => IghsomStatus::Conflict,
        Error::Precondition(_) => IghsomStatus::Precondition,
        Error::Config(_) => IghsomStatus::Config,
        Error::Fingerprint { .. } => IghsomStatus::Fingerprint,
        Error::Snapshot(_) => IghsomStatus::Snapshot,
        Error::Delivery(_) => IghsomStatus::Delivery,
        Error::Io(_) => IghsomStatus::Io,
        Error::Json(_) => IghsomStatus::Json,
    }
}

enum Failure {
    Status(IghsomStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(Error::Json(e))
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IghsomStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IghsomStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            let status = status_of(&e);
            set_last_error(e.to_string());
            status
        }
        Ok(Err(Failure::Status(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            IghsomStatus::Panic
        }
    }
}

unsafe fn session<'a>(s: *const IghsomSession) -> Result<&'a Session, Failure> {
    s.as_ref()
        .map(|s| &s.inner)
        .ok_or_else(|| Failure::Status(IghsomStatus::NullArgument, "session handle is null".into()))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Status(IghsomStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(IghsomStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn optional_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn write_out(out: *mut *mut c_char, value: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Status(IghsomStatus::NullArgument, "out pointer is null".into()));
    }
    let c = CString::new(value)
        .map_err(|_| Failure::Status(IghsomStatus::Contract, "output contains a NUL byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn write_json<T: serde::Serialize>(out: *mut *mut c_char, value: &T) -> Result<(), Failure> {
    write_out(out, serde_json::to_string(value)?)
}

/// Creates an empty session. Release it with [`ighsom_session_free`].
#[no_mangle]
pub extern "C" fn ighsom_session_new() -> *mut IghsomSession {
    Box::into_raw(Box::new(IghsomSession { inner: Session::new("ffi") }))
}

/// # Safety
/// `s` must come from [`ighsom_session_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ighsom_session_free(s: *mut IghsomSession) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on this thread; do not free.
#[no_mangle]
pub extern "C" fn ighsom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `p` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn ighsom_string_free(p: *mut c_char) {
    if !p.is_null() {
        drop(CString::from_raw(p));
    }
}

/// Loads record CSV text (header `no,lat,lon,alt,name,evaluation,comment`).
///
/// # Safety
/// `s` must be a live session and `csv` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ighsom_load_csv(s: *const IghsomSession, csv: *const c_char) -> IghsomStatus {
    guard(|| {
        session(s)?.upload_data(text(csv, "csv")?)?;
        Ok(())
    })
}

/// Loads a corpus given as `{"documents": [{"id", "text"}...]}`.
///
/// # Safety
/// `s` must be a live session and `json` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ighsom_load_corpus_json(s: *const IghsomSession, json: *const c_char) -> IghsomStatus {
    guard(|| {
        let upload: CorpusUpload = serde_json::from_str(text(json, "json")?)?;
        session(s)?.upload_corpus(upload)?;
        Ok(())
    })
}

/// Grows a hierarchy. `params_json` may be null for defaults.
///
/// # Safety
/// `s` must be a live session; `params_json` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ighsom_train(s: *const IghsomSession, params_json: *const c_char, seed: u64) -> IghsomStatus {
    guard(|| {
        let params: GrowthParams = match optional_text(params_json, "params_json")? {
            Some(j) => serde_json::from_str(j)?,
            None => GrowthParams::default(),
        };
        session(s)?.train(params, seed)?;
        Ok(())
    })
}

/// Regrows the map holding `path`. Writes the report and new hierarchy as JSON
/// to `out_json`. `overrides_json` may be null.
///
/// # Safety
/// `s` must be a live session, `path` NUL-terminated, `overrides_json` null or
/// NUL-terminated, and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ighsom_refine(
    s: *const IghsomSession,
    path: *const c_char,
    overrides_json: *const c_char,
    seed: u64,
    out_json: *mut *mut c_char,
) -> IghsomStatus {
    guard(|| {
        let overrides: ParamOverrides = match optional_text(overrides_json, "overrides_json")? {
            Some(j) => serde_json::from_str(j)?,
            None => ParamOverrides::default(),
        };
        let outcome = session(s)?.refine(text(path, "path")?, overrides, seed)?;
        write_json(out_json, &outcome)
    })
}

/// # Safety
/// `s` must be a live session and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ighsom_hierarchy_json(s: *const IghsomSession, out_json: *mut *mut c_char) -> IghsomStatus {
    guard(|| write_json(out_json, &session(s)?.hierarchy()?))
}

/// # Safety
/// `s` must be a live session, `path` NUL-terminated and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ighsom_samples_json(
    s: *const IghsomSession,
    path: *const c_char,
    out_json: *mut *mut c_char,
) -> IghsomStatus {
    guard(|| write_json(out_json, &session(s)?.samples(text(path, "path")?)?))
}

/// # Safety
/// `s` must be a live session and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ighsom_rules_json(s: *const IghsomSession, out_json: *mut *mut c_char) -> IghsomStatus {
    guard(|| write_json(out_json, &session(s)?.rules()?))
}

/// Applies rules to `{"records": [...], "rules"?: [...], "tfidf_alias"?: ...}`.
///
/// # Safety
/// `s` must be a live session, `request_json` NUL-terminated and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ighsom_filter_json(
    s: *const IghsomSession,
    request_json: *const c_char,
    out_json: *mut *mut c_char,
) -> IghsomStatus {
    guard(|| {
        let req: FilterRequest = serde_json::from_str(text(request_json, "request_json")?)?;
        write_json(out_json, &session(s)?.filter(req)?)
    })
}

/// # Safety
/// `s` must be a live session and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ighsom_snapshot_export(s: *const IghsomSession, out_json: *mut *mut c_char) -> IghsomStatus {
    guard(|| {
        let bytes = session(s)?.export_snapshot()?;
        let text = String::from_utf8(bytes).map_err(|e| Failure::Status(IghsomStatus::InvalidUtf8, e.to_string()))?;
        write_out(out_json, text)
    })
}

/// # Safety
/// `s` must be a live session and `json` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ighsom_snapshot_import(s: *const IghsomSession, json: *const c_char) -> IghsomStatus {
    guard(|| {
        session(s)?.import_snapshot(text(json, "json")?.as_bytes())?;
        Ok(())
    })
}

/// Hue angle in degrees in `[0, 360)`; 0 for grays.
#[no_mangle]
pub extern "C" fn ighsom_hue(r: u8, g: u8, b: u8) -> f64 {
    hue(RgbColor::new(r, g, b)).degrees()
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ighsom_case1_stop(n_k: usize, n_input: usize, alpha: f64, out: *mut bool) -> IghsomStatus {
    guard(|| {
        let v = case1_stop(n_k, n_input, alpha)?;
        match out.as_mut() {
            Some(o) => {
                *o = v;
                Ok(())
            }
            None => Err(Failure::Status(IghsomStatus::NullArgument, "out is null".into())),
        }
    })
}

/// # Safety
/// `winner_qes` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ighsom_case2_insert(
    qe_k: f64,
    winner_qes: *const f64,
    len: usize,
    beta: f64,
    tau1: f64,
    out: *mut bool,
) -> IghsomStatus {
    guard(|| {
        let qes: &[f64] = if len == 0 {
            &[]
        } else if winner_qes.is_null() {
            return Err(Failure::Status(IghsomStatus::NullArgument, "winner_qes is null".into()));
        } else {
            std::slice::from_raw_parts(winner_qes, len)
        };
        let v = case2_insert(qe_k, qes, beta, tau1)?;
        match out.as_mut() {
            Some(o) => {
                *o = v;
                Ok(())
            }
            None => Err(Failure::Status(IghsomStatus::NullArgument, "out is null".into())),
        }
    })
}
