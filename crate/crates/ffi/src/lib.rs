//! C ABI for `qpcone`.
//!
//! Complexes and orders are opaque handles created by `qp_*_new*` functions
//! and released with the matching `qp_*_free`. Every fallible function
//! returns a [`QpStatus`]; on failure, [`qp_last_error`] describes the error
//! for the calling thread. Strings returned through `char **` out-parameters
//! are owned by the caller and must be released with [`qp_string_free`].
//!
//! Subsets cross the boundary as bitmasks: atom `i` is bit `i - 1`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qpcone::example26::{verify_construction, Construction};
use qpcone::rational::parse_rational;
use qpcone::winder::{is_strongly_acyclic, Acyclicity};
use qpcone::{
    find_cck_star_violation, find_cck_violation, initial_segment, is_almost_representable, is_representable,
    is_shifted, is_threshold, Error, QPOrder, SearchLimits, SearchOutcome, SimplicialComplex, Subset,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The input was rejected: bad JSON, atoms out of range, invalid order.
    InvalidInput = 3,
    /// The input is too large for the requested computation.
    TooLarge = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

/// Result of a bounded cancellation search.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpSearchVerdict {
    Violation = 0,
    None = 1,
    Inconclusive = 2,
}

/// Opaque simplicial complex.
pub struct QpComplex(SimplicialComplex);

/// Opaque qualitative probability order.
pub struct QpOrder(QPOrder);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QpStatus {
    match e {
        Error::TooLarge { .. } | Error::InvalidAtomCount(_) => QpStatus::TooLarge,
        _ => QpStatus::InvalidInput,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (QpStatus, String)>) -> QpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QpStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal error: {msg}"));
            QpStatus::Internal
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, (QpStatus, String)>;
}

impl<T> OrStatus<T> for qpcone::Result<T> {
    fn or_status(self) -> Result<T, (QpStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (QpStatus, String) {
    (QpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (QpStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (QpStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (QpStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no NUL").into_raw()
}

fn json<T: serde::Serialize>(value: &T) -> *mut c_char {
    owned_string(serde_json::to_string(value).expect("serializable"))
}

fn subset(n: usize, mask: u64) -> Result<Subset, (QpStatus, String)> {
    Subset::new(n, mask).or_status()
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the complex generated by `count` faces given as bitmasks.
///
/// # Safety
/// `generators` must point to `count` readable values (or be null when
/// `count` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qp_complex_new(
    n: usize,
    generators: *const u64,
    count: usize,
    out: *mut *mut QpComplex,
) -> QpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let masks: &[u64] = match count {
            0 => &[],
            _ if generators.is_null() => return Err(null("generators")),
            _ => std::slice::from_raw_parts(generators, count),
        };
        let gens = masks.iter().map(|&m| subset(n, m)).collect::<Result<Vec<_>, _>>()?;
        let complex = SimplicialComplex::from_generators(n, &gens).or_status()?;
        *out = Box::into_raw(Box::new(QpComplex(complex)));
        Ok(())
    })
}

/// Parses `{"n": .., "generators": [[..], ..]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qp_complex_from_json(json: *const c_char, out: *mut *mut QpComplex) -> QpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text = str_arg(json, "json")?;
        let file: qpcone::io::ComplexFile = qpcone::io::parse_json(text).or_status()?;
        *out = Box::into_raw(Box::new(QpComplex(file.to_complex().or_status()?)));
        Ok(())
    })
}

/// # Safety
/// `complex` must come from this library and not have been freed; null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn qp_complex_free(complex: *mut QpComplex) {
    if !complex.is_null() {
        drop(Box::from_raw(complex));
    }
}

/// # Safety
/// `complex` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qp_complex_contains(complex: *const QpComplex, mask: u64, out: *mut bool) -> QpStatus {
    guard(|| {
        let c = &complex.as_ref().ok_or_else(|| null("complex"))?.0;
        let s = subset(c.n(), mask)?;
        *out_arg(out, "out")? = c.contains(&s);
        Ok(())
    })
}

/// # Safety
/// `complex` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qp_complex_face_count(complex: *const QpComplex, out: *mut usize) -> QpStatus {
    guard(|| {
        let c = &complex.as_ref().ok_or_else(|| null("complex"))?.0;
        *out_arg(out, "out")? = c.face_count();
        Ok(())
    })
}

/// Decides thresholdness. `certificate`, when not null, receives the
/// certificate as JSON.
///
/// # Safety
/// `complex` must be a live handle, `out` writable, and `certificate` null
/// or writable.
#[no_mangle]
pub unsafe extern "C" fn qp_complex_is_threshold(
    complex: *const QpComplex,
    out: *mut bool,
    certificate: *mut *mut c_char,
) -> QpStatus {
    guard(|| {
        let c = &complex.as_ref().ok_or_else(|| null("complex"))?.0;
        let out = out_arg(out, "out")?;
        let cert = is_threshold(c);
        *out = cert.is_positive();
        if let Some(slot) = certificate.as_mut() {
            *slot = json(&cert);
        }
        Ok(())
    })
}

/// Decides shiftedness. `vertex_order`, when not null, receives the
/// witnessing vertex order as a JSON array (or `null`).
///
/// # Safety
/// As for [`qp_complex_is_threshold`].
#[no_mangle]
pub unsafe extern "C" fn qp_complex_is_shifted(
    complex: *const QpComplex,
    out: *mut bool,
    vertex_order: *mut *mut c_char,
) -> QpStatus {
    guard(|| {
        let c = &complex.as_ref().ok_or_else(|| null("complex"))?.0;
        let out = out_arg(out, "out")?;
        let order = is_shifted(c);
        *out = order.is_some();
        if let Some(slot) = vertex_order.as_mut() {
            *slot = json(&order);
        }
        Ok(())
    })
}

/// # Safety
/// `complex` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qp_complex_is_strongly_acyclic(complex: *const QpComplex, out: *mut bool) -> QpStatus {
    guard(|| {
        let c = &complex.as_ref().ok_or_else(|| null("complex"))?.0;
        let out = out_arg(out, "out")?;
        *out = matches!(is_strongly_acyclic(c).or_status()?, Acyclicity::Acyclic);
        Ok(())
    })
}

fn search_result(outcome: SearchOutcome, verdict: &mut QpSearchVerdict, witness: *mut *mut c_char) {
    *verdict = match outcome {
        SearchOutcome::Violation { .. } => QpSearchVerdict::Violation,
        SearchOutcome::None => QpSearchVerdict::None,
        SearchOutcome::Inconclusive { .. } => QpSearchVerdict::Inconclusive,
    };
    // SAFETY: callers pass null or a writable pointer.
    if let Some(slot) = unsafe { witness.as_mut() } {
        *slot = json(&outcome);
    }
}

fn limits(node_budget: u64) -> SearchLimits {
    let mut l = SearchLimits::default();
    if node_budget > 0 {
        l.node_budget = node_budget;
    }
    l
}

/// Searches for a CC_k* violation. A `node_budget` of 0 selects the
/// default. `outcome`, when not null, receives the full outcome as JSON.
///
/// # Safety
/// `complex` must be a live handle, `verdict` writable, `outcome` null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qp_complex_find_cck_star_violation(
    complex: *const QpComplex,
    k: usize,
    node_budget: u64,
    verdict: *mut QpSearchVerdict,
    outcome: *mut *mut c_char,
) -> QpStatus {
    guard(|| {
        let c = &complex.as_ref().ok_or_else(|| null("complex"))?.0;
        let verdict = out_arg(verdict, "verdict")?;
        search_result(find_cck_star_violation(c, k, &limits(node_budget)).or_status()?, verdict, outcome);
        Ok(())
    })
}

/// Builds the order induced by `n` positive weights given as rational
/// strings such as `"3/16"`.
///
/// # Safety
/// `weights` must point to `n` NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qp_order_from_weights(
    weights: *const *const c_char,
    n: usize,
    out: *mut *mut QpOrder,
) -> QpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        if weights.is_null() {
            return Err(null("weights"));
        }
        let ws = std::slice::from_raw_parts(weights, n)
            .iter()
            .map(|&p| parse_rational(str_arg(p, "weight")?).or_status())
            .collect::<Result<Vec<_>, _>>()?;
        *out = Box::into_raw(Box::new(QpOrder(QPOrder::from_weights(&ws).or_status()?)));
        Ok(())
    })
}

/// Parses an order file: `{"n": .., "weights": [..]}` or
/// `{"n": .., "classes": [..]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qp_order_from_json(json: *const c_char, out: *mut *mut QpOrder) -> QpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text = str_arg(json, "json")?;
        let file: qpcone::io::OrderFile = qpcone::io::parse_json(text).or_status()?;
        *out = Box::into_raw(Box::new(QpOrder(file.to_order().or_status()?)));
        Ok(())
    })
}

/// # Safety
/// `order` must come from this library and not have been freed; null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn qp_order_free(order: *mut QpOrder) {
    if !order.is_null() {
        drop(Box::from_raw(order));
    }
}

/// Whether a probability measure represents the order. `certificate`, when
/// not null, receives the LP certificate as JSON.
///
/// # Safety
/// `order` must be a live handle, `out` writable, `certificate` null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qp_order_is_representable(
    order: *const QpOrder,
    out: *mut bool,
    certificate: *mut *mut c_char,
) -> QpStatus {
    guard(|| {
        let o = &order.as_ref().ok_or_else(|| null("order"))?.0;
        let out = out_arg(out, "out")?;
        let cert = is_representable(o).or_status()?;
        *out = cert.is_positive();
        if let Some(slot) = certificate.as_mut() {
            *slot = json(&cert);
        }
        Ok(())
    })
}

/// As [`qp_order_is_representable`], for almost representability.
///
/// # Safety
/// As for [`qp_order_is_representable`].
#[no_mangle]
pub unsafe extern "C" fn qp_order_is_almost_representable(
    order: *const QpOrder,
    out: *mut bool,
    certificate: *mut *mut c_char,
) -> QpStatus {
    guard(|| {
        let o = &order.as_ref().ok_or_else(|| null("order"))?.0;
        let out = out_arg(out, "out")?;
        let cert = is_almost_representable(o).or_status()?;
        *out = cert.is_positive();
        if let Some(slot) = certificate.as_mut() {
            *slot = json(&cert);
        }
        Ok(())
    })
}

/// Searches for a CC_k violation of the order.
///
/// # Safety
/// As for [`qp_complex_find_cck_star_violation`].
#[no_mangle]
pub unsafe extern "C" fn qp_order_find_cck_violation(
    order: *const QpOrder,
    k: usize,
    node_budget: u64,
    verdict: *mut QpSearchVerdict,
    outcome: *mut *mut c_char,
) -> QpStatus {
    guard(|| {
        let o = &order.as_ref().ok_or_else(|| null("order"))?.0;
        let verdict = out_arg(verdict, "verdict")?;
        search_result(find_cck_violation(o, k, &limits(node_budget)).or_status()?, verdict, outcome);
        Ok(())
    })
}

/// The complex of sets strictly below the set `threshold_mask`.
///
/// # Safety
/// `order` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qp_order_initial_segment(
    order: *const QpOrder,
    threshold_mask: u64,
    out: *mut *mut QpComplex,
) -> QpStatus {
    guard(|| {
        let o = &order.as_ref().ok_or_else(|| null("order"))?.0;
        let out = out_arg(out, "out")?;
        let t = subset(o.n(), threshold_mask)?;
        *out = Box::into_raw(Box::new(QpComplex(initial_segment(o, &t).or_status()?)));
        Ok(())
    })
}

/// Builds and verifies the 26-atom construction for `selector`. `passed`
/// receives whether every check passed; `report`, when not null, receives
/// the verification report as JSON.
///
/// # Safety
/// `passed` must be writable and `report` null or writable.
#[no_mangle]
pub unsafe extern "C" fn qp_example26_verify(selector: u32, passed: *mut bool, report: *mut *mut c_char) -> QpStatus {
    guard(|| {
        let passed = out_arg(passed, "passed")?;
        let c = Construction::build(selector).or_status()?;
        let r = verify_construction(&c).or_status()?;
        *passed = r.passed();
        if let Some(slot) = report.as_mut() {
            *slot = json(&r);
        }
        Ok(())
    })
}
