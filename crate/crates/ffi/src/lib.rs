//! C ABI over `wbk-core`.
//!
//! Every fallible function returns a [`WbkStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`wbk_last_error`] on the same thread. Strings handed out by the library
//! are freed with [`wbk_string_free`]; handles with their own `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wbk_core::cli::{Format, Report};
use wbk_core::qfield::RationalFn;
use wbk_core::repcalc::{Bundle, Rank};
use wbk_core::spectra::minimal_eigenvalue;
use wbk_core::stability::{index_i1, theorem_a, SpectralInput};
use wbk_core::wbk::{derive_identity, verify_all, Database, VerifyOptions};

/// Pass as `n` to request a result in ℚ(n) rather than at a fixed rank.
pub const WBK_RANK_GENERIC: i64 = 0;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WbkStatus {
    Ok = 0,
    /// A verification ran and at least one check failed.
    VerifyFailed = 1,
    /// Malformed argument: bad name, range or UTF-8.
    InvalidArgument = 2,
    /// The computation itself failed (rank out of range, inconsistent data).
    Domain = 3,
    NullPointer = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WbkFormat {
    Json = 0,
    Latex = 1,
    Markdown = 2,
}

/// Opaque identity database.
pub struct WbkDatabase(Database);

/// Opaque verification report.
pub struct WbkReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(WbkStatus, String);

impl Fail {
    fn arg(msg: impl Into<String>) -> Fail {
        Fail(WbkStatus::InvalidArgument, msg.into())
    }

    fn domain(e: impl std::fmt::Display) -> Fail {
        Fail(WbkStatus::Domain, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, recording its error and turning panics into [`WbkStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<WbkStatus, Fail>) -> WbkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            WbkStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(WbkStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::arg(format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(
            WbkStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<WbkStatus, Fail> {
    let c = CString::new(s).map_err(|_| Fail::domain("result contains a nul byte"))?;
    put(out, c.into_raw())?;
    Ok(WbkStatus::Ok)
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(WbkStatus::NullPointer, "handle is null".into()))
}

fn rank(n: i64) -> Result<Rank, Fail> {
    match n {
        WBK_RANK_GENERIC => Ok(Rank::Generic),
        n if n >= 1 => Ok(Rank::At(n)),
        n => Err(Fail::arg(format!(
            "n = {n}; use a positive rank or WBK_RANK_GENERIC"
        ))),
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn wbk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wbk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wbk_database_builtin(out: *mut *mut WbkDatabase) -> WbkStatus {
    guard(|| {
        put(
            out,
            Box::into_raw(Box::new(WbkDatabase(Database::builtin()))),
        )?;
        Ok(WbkStatus::Ok)
    })
}

/// Loads a database from its JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wbk_database_from_json(
    json: *const c_char,
    out: *mut *mut WbkDatabase,
) -> WbkStatus {
    guard(|| {
        let db = Database::from_json(text(json, "json")?).map_err(Fail::domain)?;
        put(out, Box::into_raw(Box::new(WbkDatabase(db))))?;
        Ok(WbkStatus::Ok)
    })
}

/// # Safety
/// `db` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wbk_database_free(db: *mut WbkDatabase) {
    if !db.is_null() {
        drop(Box::from_raw(db));
    }
}

/// Number of identities, or 0 for a null handle.
///
/// # Safety
/// `db` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wbk_database_len(db: *const WbkDatabase) -> usize {
    db.as_ref().map_or(0, |d| d.0.len())
}

/// Dimension of a bundle given by alias or `Sym^k H * R`, as a decimal
/// string at rank `n`, or as a polynomial in `n` for [`WBK_RANK_GENERIC`].
///
/// # Safety
/// `bundle` must be a nul-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wbk_bundle_dim(
    bundle: *const c_char,
    n: i64,
    out: *mut *mut c_char,
) -> WbkStatus {
    guard(|| {
        let b: Bundle = text(bundle, "bundle")?
            .parse()
            .map_err(|e| Fail::arg(format!("{e}")))?;
        let s = match rank(n)? {
            Rank::Generic => RationalFn::from_poly(b.dim_poly()).to_grammar(),
            Rank::At(n) => b.dim(n).map_err(Fail::domain)?.to_string(),
        };
        put_string(out, s)
    })
}

/// Minimal eigenvalue of `Δ` on `Sym^k H Λ^{a,b}_0 E` as a multiple of
/// `scal`, e.g. `(n+1)/(2*n*(n+2))`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wbk_minimal_eigenvalue(
    k: u32,
    a: u32,
    b: u32,
    n: i64,
    out: *mut *mut c_char,
) -> WbkStatus {
    guard(|| {
        let v = minimal_eigenvalue(k, a, b, rank(n)?).map_err(Fail::domain)?;
        put_string(out, v.to_grammar())
    })
}

/// Re-derives identity `id` and returns its coefficient listing.
///
/// # Safety
/// `db` must be a live handle, `id` a nul-terminated string, `out` valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn wbk_derive(
    db: *const WbkDatabase,
    id: *const c_char,
    n: i64,
    out: *mut *mut c_char,
) -> WbkStatus {
    guard(|| {
        let db = &handle(db)?.0;
        let id = text(id, "id")?;
        let rank = rank(n)?;
        let ident = db.require(id).map_err(|e| Fail::arg(e.to_string()))?;
        if let Rank::At(n) = rank {
            if n < ident.n_min {
                return Err(Fail::domain(format!(
                    "{id} holds for n >= {}, got n = {n}",
                    ident.n_min
                )));
            }
        }
        let d = derive_identity(db, id, rank).map_err(Fail::domain)?;
        put_string(out, d.expr.listing())
    })
}

/// Verifies the identities `ids[0..len]` (every identity when `len` is 0)
/// over `n_lo..=n_hi`. The report is produced even when checks fail, in
/// which case the status is [`WbkStatus::VerifyFailed`].
///
/// # Safety
/// `db` must be a live handle; `ids` must point to `len` nul-terminated
/// strings (it may be null when `len` is 0); `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wbk_verify(
    db: *const WbkDatabase,
    ids: *const *const c_char,
    len: usize,
    n_lo: i64,
    n_hi: i64,
    out: *mut *mut WbkReport,
) -> WbkStatus {
    guard(|| {
        let db = &handle(db)?.0;
        if n_lo < 2 || n_lo > n_hi {
            return Err(Fail::arg(format!(
                "range {n_lo}:{n_hi}; need 2 <= lo <= hi"
            )));
        }
        let ids: Vec<String> = if len == 0 {
            Vec::new()
        } else {
            if ids.is_null() {
                return Err(Fail(WbkStatus::NullPointer, "ids is null".into()));
            }
            std::slice::from_raw_parts(ids, len)
                .iter()
                .map(|&p| text(p, "id").map(str::to_string))
                .collect::<Result<_, _>>()?
        };
        let full = ids.is_empty();
        let opts = VerifyOptions {
            n_lo,
            n_hi,
            ids: (!full).then_some(ids),
        };
        let v = verify_all(db, &opts).map_err(Fail::domain)?;
        let mut report = Report::from_verify(Format::Json, v);
        if full {
            report = report.with_bounds().map_err(Fail::domain)?;
        }
        let status = if report.all_pass() {
            WbkStatus::Ok
        } else {
            WbkStatus::VerifyFailed
        };
        put(out, Box::into_raw(Box::new(WbkReport(report))))?;
        Ok(status)
    })
}

/// # Safety
/// `report` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wbk_report_free(report: *mut WbkReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Number of identity checks in the report, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wbk_report_len(report: *const WbkReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.entries.len())
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wbk_report_all_pass(report: *const WbkReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.all_pass())
}

/// # Safety
/// `report` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wbk_report_render(
    report: *const WbkReport,
    format: WbkFormat,
    out: *mut *mut c_char,
) -> WbkStatus {
    guard(|| {
        let mut r = handle(report)?.0.clone();
        r.format = match format {
            WbkFormat::Json => Format::Json,
            WbkFormat::Latex => Format::Latex,
            WbkFormat::Markdown => Format::Markdown,
        };
        put_string(out, r.render())
    })
}

/// Stability verdict for spectral input given as JSON; the result is JSON
/// with a `report` object and, when computable, `index_i1`.
///
/// # Safety
/// `input` must be a nul-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wbk_classify(input: *const c_char, out: *mut *mut c_char) -> WbkStatus {
    guard(|| {
        let input: SpectralInput =
            serde_json::from_str(text(input, "input")?).map_err(|e| Fail::arg(e.to_string()))?;
        let report = theorem_a(&input).map_err(Fail::domain)?;
        let mut json = serde_json::json!({ "report": report });
        if let Ok(i1) = index_i1(&input) {
            json["index_i1"] = i1.into();
        }
        put_string(out, json.to_string())
    })
}
