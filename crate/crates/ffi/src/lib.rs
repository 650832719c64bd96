//! C ABI over `locseries`.
//!
//! Groups and Seifert matrices are opaque handles created by `*_new` or
//! `*_parse` functions and released with the matching `*_free`. Every call
//! returns an [`LsStatus`]; on failure [`ls_last_error`] describes the
//! problem. Strings returned through out-parameters are owned by the caller
//! and must be released with [`ls_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_traits::ToPrimitive;

use locseries::error::Error;
use locseries::presentations::{parse_catalog_ref, parse_presentation, FinitePresentation};
use locseries::series::series;
use locseries::signatures::{levine_tristram, rho_cyclic, rho_integral, SeifertMatrix};
use locseries::zlinalg::RSpec;

/// Status codes returned by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidInput = 2,
    Unsupported = 3,
    CapExceeded = 4,
    InvalidSeifert = 5,
    Internal = 6,
}

/// A finitely presented group.
pub struct LsGroup {
    pres: FinitePresentation,
}

/// A validated Seifert matrix.
pub struct LsSeifert {
    matrix: SeifertMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LsStatus {
    match e {
        Error::UnsupportedCoefficients(_)
        | Error::UnsupportedAction(_)
        | Error::UnsupportedQuotient(_)
        | Error::BaseHasZeroRho(_) => LsStatus::Unsupported,
        Error::CapExceeded(_) => LsStatus::CapExceeded,
        Error::InvalidSeifert(_) => LsStatus::InvalidSeifert,
        _ => LsStatus::InvalidInput,
    }
}

/// Runs `f`, recording errors and turning panics into `Internal`.
fn guard<F: FnOnce() -> Result<(), (LsStatus, String)>>(f: F) -> LsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error".into());
            LsStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (LsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_err(what: &str) -> (LsStatus, String) {
    (LsStatus::NullArgument, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (LsStatus, String)> {
    if p.is_null() {
        return Err(null_err(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (LsStatus::InvalidInput, format!("{what} is not UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ls_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ls_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `gens: ...; rels: ...` or a `catalog:name(params)` reference.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_group_parse(text: *const c_char, out: *mut *mut LsGroup) -> LsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let s = read_str(text, "text")?;
        let pres = if s.trim_start().starts_with("catalog:") {
            parse_catalog_ref(s)
        } else {
            parse_presentation(s)
        }
        .map_err(lib_err)?;
        *out = Box::into_raw(Box::new(LsGroup { pres }));
        Ok(())
    })
}

/// Releases a group. Null is ignored.
///
/// # Safety
/// `g` must come from [`ls_group_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ls_group_free(g: *mut LsGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of generators of the presentation.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_group_num_generators(g: *const LsGroup, out: *mut usize) -> LsStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null_err("group"))?;
        let out = out.as_mut().ok_or_else(|| null_err("out"))?;
        *out = g.pres.num_generators();
        Ok(())
    })
}

/// Series report as JSON for coefficients `Q`, `Z`, `Zloc:p` or `Zp:p`.
///
/// # Safety
/// `g` must be a live handle, `coeff` a NUL-terminated string and `out` a
/// valid pointer; the string stored in `*out` must be released with
/// [`ls_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ls_series_json(
    g: *const LsGroup,
    coeff: *const c_char,
    depth: u32,
    max_cosets: usize,
    out: *mut *mut c_char,
) -> LsStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null_err("group"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        let r = RSpec::parse(read_str(coeff, "coeff")?).map_err(lib_err)?;
        let rep = series(&g.pres, r, depth as usize, max_cosets).map_err(lib_err)?;
        let text = serde_json::to_string(&rep).map_err(|e| (LsStatus::Internal, e.to_string()))?;
        *out = to_c_string(text);
        Ok(())
    })
}

/// Builds a Seifert matrix from `size * size` entries in row-major order and
/// checks `det(A − Aᵀ) = 1`. A size of 0 gives the unknot.
///
/// # Safety
/// `entries` must point to `size * size` integers (or may be null when
/// `size` is 0) and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_seifert_new(entries: *const i64, size: usize, out: *mut *mut LsSeifert) -> LsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let rows = if size == 0 {
            Vec::new()
        } else {
            if entries.is_null() {
                return Err(null_err("entries"));
            }
            let flat = std::slice::from_raw_parts(entries, size * size);
            flat.chunks(size).map(<[i64]>::to_vec).collect()
        };
        let matrix = SeifertMatrix::new(rows).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(LsSeifert { matrix }));
        Ok(())
    })
}

/// Releases a Seifert matrix. Null is ignored.
///
/// # Safety
/// `s` must come from [`ls_seifert_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ls_seifert_free(s: *mut LsSeifert) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Levine–Tristram signature at `e^{iθ}`; `singular` is set when the form
/// degenerates there and the two-sided average was used.
///
/// # Safety
/// `s` must be a live handle; `value` and `singular` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ls_signature(
    s: *const LsSeifert,
    theta: f64,
    value: *mut i64,
    singular: *mut bool,
) -> LsStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_err("seifert"))?;
        let value = value.as_mut().ok_or_else(|| null_err("value"))?;
        let singular = singular.as_mut().ok_or_else(|| null_err("singular"))?;
        let sig = levine_tristram(&s.matrix, theta);
        *value = sig.value;
        *singular = sig.singular;
        Ok(())
    })
}

/// ρ for the map onto `Z_d` as the reduced fraction `num / den`.
///
/// # Safety
/// `s` must be a live handle; `num` and `den` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ls_rho_cyclic(s: *const LsSeifert, d: u64, num: *mut i64, den: *mut i64) -> LsStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_err("seifert"))?;
        let num = num.as_mut().ok_or_else(|| null_err("num"))?;
        let den = den.as_mut().ok_or_else(|| null_err("den"))?;
        let rep = rho_cyclic(&s.matrix, d).map_err(lib_err)?;
        let v = rep.exact_value.ok_or_else(|| (LsStatus::Internal, "no exact value".to_string()))?;
        let overflow = || (LsStatus::Internal, "value does not fit in 64 bits".to_string());
        *num = v.numer().to_i64().ok_or_else(overflow)?;
        *den = v.denom().to_i64().ok_or_else(overflow)?;
        Ok(())
    })
}

/// ρ for the abelianization onto `Z` with jump angles located to `tol`.
/// `exact` is set when the value is known exactly (every jump at a root of
/// unity), in which case `error_bound` is 0.
///
/// # Safety
/// `s` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ls_rho_integral(
    s: *const LsSeifert,
    tol: f64,
    value: *mut f64,
    error_bound: *mut f64,
    exact: *mut bool,
) -> LsStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_err("seifert"))?;
        let value = value.as_mut().ok_or_else(|| null_err("value"))?;
        let error_bound = error_bound.as_mut().ok_or_else(|| null_err("error_bound"))?;
        let exact = exact.as_mut().ok_or_else(|| null_err("exact"))?;
        let rep = rho_integral(&s.matrix, tol).map_err(lib_err)?;
        *value = rep.value;
        *error_bound = rep.error_bound;
        *exact = rep.exact_value.is_some();
        Ok(())
    })
}
