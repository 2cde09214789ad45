//! C ABI over `hyperfactor`.
//!
//! Every fallible call returns an [`HfStatus`]; on failure a message is
//! available from [`hf_last_error`] on the same thread. Strings handed out
//! by the library are released with [`hf_string_free`], handles with
//! [`hf_factorisation_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hyperfactor::factorisation::{is_base_label, Factorisation};
use hyperfactor::hypergraph::{pair_overlap, SearchBudget};
use hyperfactor::projective::Label;
use hyperfactor::verifier::{
    check_c1f, check_hb1f, check_u1f, run_suite, HbOptions, PairMode, PropertyReport, SuiteConfig, TripleMode,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HfStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad order, label, mode or config.
    InvalidArgument = 2,
    BufferTooSmall = 3,
    /// A Rust panic was caught at the boundary.
    Internal = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HfProperty {
    C1f = 0,
    U1f = 1,
    Uc1f = 2,
    Hb1f = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HfMode {
    Reduced = 0,
    Full = 1,
    Sampled = 2,
}

/// Opaque handle to a built factorisation.
pub struct HfFactorisation {
    inner: Factorisation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: HfStatus, msg: impl Into<String>) -> HfStatus {
    set_error(msg);
    status
}

/// Runs `f`, clearing the last error first and turning panics into
/// `HfStatus::Internal`.
fn guard(f: impl FnOnce() -> HfStatus) -> HfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(HfStatus::Internal, msg)
        }
    }
}

fn write_json(s: serde_json::Result<String>, out: *mut *mut c_char) -> HfStatus {
    let s = s.expect("reports serialise");
    let c = CString::new(s).expect("json has no nul bytes");
    // SAFETY: callers checked `out` for null.
    unsafe { *out = c.into_raw() };
    HfStatus::Ok
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn hf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn hf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the factorisation for `q`, a prime power with `q = 2 mod 3`.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn hf_factorisation_new(q: u32, out: *mut *mut HfFactorisation) -> HfStatus {
    guard(|| {
        if out.is_null() {
            return fail(HfStatus::NullPointer, "out is null");
        }
        match Factorisation::with_order(q) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(HfFactorisation { inner }));
                HfStatus::Ok
            }
            Err(e) => fail(HfStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from [`hf_factorisation_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hf_factorisation_free(h: *mut HfFactorisation) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

unsafe fn handle<'a>(h: *const HfFactorisation) -> Option<&'a Factorisation> {
    h.as_ref().map(|h| &h.inner)
}

/// Field order `q`, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hf_factorisation_q(h: *const HfFactorisation) -> u32 {
    handle(h).map_or(0, |f| f.q())
}

/// Number of factors, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hf_factorisation_len(h: *const HfFactorisation) -> usize {
    handle(h).map_or(0, |f| f.len())
}

/// Copies the edges of factor `index` as vertex triples into `buf`
/// (`3 * edges` entries). `written` receives the number of entries needed;
/// when `buf_len` is too small nothing is copied.
///
/// # Safety
/// `h` must be a live handle, `buf` valid for `buf_len` entries (or null
/// with `buf_len` 0), `written` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hf_factorisation_factor_edges(
    h: *const HfFactorisation,
    index: usize,
    buf: *mut u32,
    buf_len: usize,
    written: *mut usize,
) -> HfStatus {
    guard(|| {
        let Some(fam) = handle(h) else {
            return fail(HfStatus::NullPointer, "handle is null");
        };
        if written.is_null() {
            return fail(HfStatus::NullPointer, "written is null");
        }
        if index >= fam.len() {
            return fail(
                HfStatus::InvalidArgument,
                format!("factor {index} out of range 0..{}", fam.len()),
            );
        }
        let edges = fam.factor(index).edges();
        *written = 3 * edges.len();
        if buf_len < 3 * edges.len() {
            return fail(HfStatus::BufferTooSmall, format!("need {} entries", 3 * edges.len()));
        }
        if buf.is_null() {
            return fail(HfStatus::NullPointer, "buf is null");
        }
        let out = std::slice::from_raw_parts_mut(buf, 3 * edges.len());
        for (chunk, e) in out.chunks_exact_mut(3).zip(edges) {
            chunk.copy_from_slice(&e.vertices());
        }
        HfStatus::Ok
    })
}

/// Writes whether the factors partition the edges of the complete 3-graph.
///
/// # Safety
/// `h` must be a live handle and `ok` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hf_factorisation_verify_partition(h: *const HfFactorisation, ok: *mut bool) -> HfStatus {
    guard(|| {
        let (Some(fam), false) = (handle(h), ok.is_null()) else {
            return fail(HfStatus::NullPointer, "null argument");
        };
        *ok = fam.verify_partition().is_partition();
        HfStatus::Ok
    })
}

/// Overlap of the base factor with the factor labelled `(alpha, beta)`,
/// both given as packed field indices.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hf_overlap(h: *const HfFactorisation, alpha: u32, beta: u32, out: *mut usize) -> HfStatus {
    guard(|| {
        let (Some(fam), false) = (handle(h), out.is_null()) else {
            return fail(HfStatus::NullPointer, "null argument");
        };
        let f = fam.field();
        if alpha == 0 || alpha >= f.order() || beta >= f.order() {
            return fail(
                HfStatus::InvalidArgument,
                format!("label ({alpha}, {beta}) invalid over GF({})", f.order()),
            );
        }
        let label = Label::new(f.element(alpha), f.element(beta));
        if is_base_label(f, label) {
            return fail(HfStatus::InvalidArgument, format!("{label} labels the base factor"));
        }
        let j = fam.index_of(label).expect("alpha is nonzero");
        *out = pair_overlap(fam.factor(0), fam.factor(j))
            .expect("distinct factors")
            .count;
        HfStatus::Ok
    })
}

/// Decides `property` and writes the JSON report to `json`. `samples` and
/// `seed` are used in sampled mode only; `budget_ms` bounds each Hamilton
/// cycle search (0 means unlimited).
///
/// # Safety
/// `h` must be a live handle and `json` a valid pointer; free the string
/// with [`hf_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hf_check(
    h: *const HfFactorisation,
    property: HfProperty,
    mode: HfMode,
    samples: usize,
    seed: u64,
    budget_ms: u64,
    json: *mut *mut c_char,
) -> HfStatus {
    guard(|| {
        let (Some(fam), false) = (handle(h), json.is_null()) else {
            return fail(HfStatus::NullPointer, "null argument");
        };
        let report: Result<PropertyReport, String> = match (property, mode) {
            (HfProperty::C1f, HfMode::Reduced) => check_c1f(fam, PairMode::Reduced, false).map_err(|e| e.to_string()),
            (HfProperty::C1f, HfMode::Full) => check_c1f(fam, PairMode::Full, false).map_err(|e| e.to_string()),
            (HfProperty::U1f | HfProperty::Uc1f, HfMode::Reduced) => check_u1f(fam, false)
                .map(|r| if property == HfProperty::U1f { r.u1f } else { r.uc1f })
                .map_err(|e| e.to_string()),
            (HfProperty::Hb1f, m) => {
                let mode = match m {
                    HfMode::Reduced => TripleMode::Reduced,
                    HfMode::Full => TripleMode::Full,
                    HfMode::Sampled => TripleMode::Sampled { n: samples, seed },
                };
                let mut opts = HbOptions::new(mode);
                opts.budget = if budget_ms == 0 {
                    SearchBudget::unlimited()
                } else {
                    SearchBudget::millis(budget_ms)
                };
                check_hb1f(fam, &opts).map_err(|e| e.to_string())
            }
            (p, m) => Err(format!("{p:?} has no {m:?} mode")),
        };
        match report {
            Ok(r) => write_json(serde_json::to_string(&r), json),
            Err(msg) => fail(HfStatus::InvalidArgument, msg),
        }
    })
}

/// Runs the verification suite from a TOML config (null selects the
/// default profile) and writes the JSON report to `json`. `exit_code`, if
/// not null, receives 0 clean, 1 discrepancy or 2 indeterminate.
///
/// # Safety
/// `config_toml` must be null or a nul-terminated string, `json` a valid
/// pointer and `exit_code` null or valid.
#[no_mangle]
pub unsafe extern "C" fn hf_suite_run(
    config_toml: *const c_char,
    json: *mut *mut c_char,
    exit_code: *mut i32,
) -> HfStatus {
    guard(|| {
        if json.is_null() {
            return fail(HfStatus::NullPointer, "json is null");
        }
        let config = if config_toml.is_null() {
            SuiteConfig::default_suite()
        } else {
            let Ok(text) = CStr::from_ptr(config_toml).to_str() else {
                return fail(HfStatus::InvalidArgument, "config is not UTF-8");
            };
            match SuiteConfig::from_toml(text) {
                Ok(c) => c,
                Err(e) => return fail(HfStatus::InvalidArgument, e.to_string()),
            }
        };
        match run_suite(&config) {
            Ok(report) => {
                if !exit_code.is_null() {
                    *exit_code = report.exit_code();
                }
                write_json(serde_json::to_string(&report), json)
            }
            Err(e) => fail(HfStatus::InvalidArgument, e.to_string()),
        }
    })
}
