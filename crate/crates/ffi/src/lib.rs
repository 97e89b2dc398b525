//! C ABI for cubiclab.
//!
//! Every function returns a [`CubiclabStatus`]; results go through out
//! pointers. Objects are opaque handles released with their `_free`
//! function, strings with [`cubiclab_string_free`]. After a failure,
//! [`cubiclab_last_error`] describes it for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cubiclab::classgroup::{class_group, class_group_oracle, ClassGroupConfig, ClassGroupResult, Status};
use cubiclab::cubicforms::{family_discriminant, MonicCubic};
use cubiclab::moments::{is_feasible, MomentProblem, Verdict};
use cubiclab::numberfield::{make_field, CubicField};
use cubiclab::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubiclabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Overflow = 3,
    InsufficientRelations = 4,
    CertificationFailed = 5,
    Unresolved = 6,
    Internal = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubiclabCertification {
    Certified = 0,
    Heuristic = 1,
    Oracle = 2,
}

/// A cubic field `Q[x]/(f)` with `Z[x]/(f)` maximal.
pub struct CubiclabField(CubicField);

/// A computed class group.
pub struct CubiclabClassGroup(ClassGroupResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: CubiclabStatus, msg: impl Into<String>) -> CubiclabStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> CubiclabStatus {
    let status = match e {
        Error::Domain(_) | Error::Parse(_) => CubiclabStatus::InvalidArgument,
        Error::InsufficientRelations { .. } | Error::RegulatorRankDeficient { .. } => {
            CubiclabStatus::InsufficientRelations
        }
        Error::CertificationFailed(_) => CubiclabStatus::CertificationFailed,
        Error::Unresolved(_) => CubiclabStatus::Unresolved,
        _ => CubiclabStatus::Internal,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> CubiclabStatus) -> CubiclabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(CubiclabStatus::Panic, "internal panic"),
    }
}

fn into_c_string(s: String, out: *mut *mut c_char) -> CubiclabStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            CubiclabStatus::Ok
        }
        Err(_) => fail(CubiclabStatus::Internal, "string contains NUL"),
    }
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cubiclab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cubiclab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Discriminant of `x^3 + a x^2 + b x + 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_family_discriminant(a: i64, b: i64, out: *mut i64) -> CubiclabStatus {
    if out.is_null() {
        return fail(CubiclabStatus::NullPointer, "out is NULL");
    }
    guard(|| match family_discriminant(&a.into(), &b.into()).to_i64() {
        Some(d) => {
            *out = d;
            CubiclabStatus::Ok
        }
        None => fail(CubiclabStatus::Overflow, "discriminant exceeds 64 bits"),
    })
}

/// Builds the field of `x^3 + a x^2 + b x + c`, which must be irreducible
/// with maximal equation order. `precision` 0 selects the default.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_field_new(
    a: i64,
    b: i64,
    c: i64,
    precision: u32,
    out: *mut *mut CubiclabField,
) -> CubiclabStatus {
    if out.is_null() {
        return fail(CubiclabStatus::NullPointer, "out is NULL");
    }
    guard(|| {
        let prec = if precision == 0 {
            cubiclab::numberfield::DEFAULT_PRECISION
        } else {
            precision
        };
        match make_field(&MonicCubic::new(a, b, c), prec) {
            Ok(k) => {
                *out = Box::into_raw(Box::new(CubiclabField(k)));
                CubiclabStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `field` must come from [`cubiclab_field_new`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_field_free(field: *mut CubiclabField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_field_discriminant(field: *const CubiclabField, out: *mut i64) -> CubiclabStatus {
    if field.is_null() || out.is_null() {
        return fail(CubiclabStatus::NullPointer, "NULL argument");
    }
    match (*field).0.disc.to_i64() {
        Some(d) => {
            *out = d;
            CubiclabStatus::Ok
        }
        None => fail(CubiclabStatus::Overflow, "discriminant exceeds 64 bits"),
    }
}

/// Number of real places (1 or 3).
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_field_real_places(field: *const CubiclabField, out: *mut u32) -> CubiclabStatus {
    if field.is_null() || out.is_null() {
        return fail(CubiclabStatus::NullPointer, "NULL argument");
    }
    *out = (*field).0.signature.r1;
    CubiclabStatus::Ok
}

/// Class group of `field`, by relation search with the given seed or by
/// the exhaustive oracle.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_class_group(
    field: *const CubiclabField,
    seed: u64,
    use_oracle: bool,
    out: *mut *mut CubiclabClassGroup,
) -> CubiclabStatus {
    if field.is_null() || out.is_null() {
        return fail(CubiclabStatus::NullPointer, "NULL argument");
    }
    guard(|| {
        let k = &(*field).0;
        let res = if use_oracle {
            class_group_oracle(k)
        } else {
            let config = ClassGroupConfig {
                seed,
                ..ClassGroupConfig::default()
            };
            class_group(k, &config)
        };
        match res {
            Ok(r) => {
                *out = Box::into_raw(Box::new(CubiclabClassGroup(r)));
                CubiclabStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `cg` must come from [`cubiclab_class_group`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_class_group_free(cg: *mut CubiclabClassGroup) {
    if !cg.is_null() {
        drop(Box::from_raw(cg));
    }
}

/// Class number; 0 for a NULL handle.
///
/// # Safety
/// `cg` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_class_group_order(cg: *const CubiclabClassGroup) -> u64 {
    cg.as_ref().map_or(0, |c| c.0.h)
}

/// 2-rank; 0 for a NULL handle.
///
/// # Safety
/// `cg` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_class_group_two_rank(cg: *const CubiclabClassGroup) -> u32 {
    cg.as_ref().map_or(0, |c| c.0.two_rank)
}

/// Copies up to `cap` invariant factors into `buf` and stores their total
/// number in `len`.
///
/// # Safety
/// `cg` must be a live handle, `buf` valid for `cap` writes (or NULL with
/// `cap` 0) and `len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_class_group_divisors(
    cg: *const CubiclabClassGroup,
    buf: *mut u64,
    cap: usize,
    len: *mut usize,
) -> CubiclabStatus {
    if cg.is_null() || len.is_null() || (buf.is_null() && cap > 0) {
        return fail(CubiclabStatus::NullPointer, "NULL argument");
    }
    let d = &(*cg).0.elementary_divisors;
    for (i, x) in d.iter().take(cap).enumerate() {
        *buf.add(i) = *x;
    }
    *len = d.len();
    CubiclabStatus::Ok
}

/// Regulator enclosure `[lo, hi]`.
///
/// # Safety
/// `cg` must be a live handle and `lo`, `hi` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_class_group_regulator(
    cg: *const CubiclabClassGroup,
    lo: *mut f64,
    hi: *mut f64,
) -> CubiclabStatus {
    if cg.is_null() || lo.is_null() || hi.is_null() {
        return fail(CubiclabStatus::NullPointer, "NULL argument");
    }
    *lo = (*cg).0.regulator.lo;
    *hi = (*cg).0.regulator.hi;
    CubiclabStatus::Ok
}

/// # Safety
/// `cg` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_class_group_certification(
    cg: *const CubiclabClassGroup,
    out: *mut CubiclabCertification,
) -> CubiclabStatus {
    if cg.is_null() || out.is_null() {
        return fail(CubiclabStatus::NullPointer, "NULL argument");
    }
    *out = match (*cg).0.certification.status {
        Status::Certified => CubiclabCertification::Certified,
        Status::Heuristic => CubiclabCertification::Heuristic,
        Status::Oracle => CubiclabCertification::Oracle,
    };
    CubiclabStatus::Ok
}

/// The class group as JSON; free with [`cubiclab_string_free`].
///
/// # Safety
/// `cg` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_class_group_json(
    cg: *const CubiclabClassGroup,
    out: *mut *mut c_char,
) -> CubiclabStatus {
    if cg.is_null() || out.is_null() {
        return fail(CubiclabStatus::NullPointer, "NULL argument");
    }
    match serde_json::to_string(&(*cg).0) {
        Ok(s) => into_c_string(s, out),
        Err(e) => fail(CubiclabStatus::Internal, e.to_string()),
    }
}

fn rational(num: i64, den: i64) -> Option<BigRational> {
    (den != 0).then(|| BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Decides whether first moment `m1_num/m1_den` and second moment at most
/// `m2_num/m2_den` are attainable on the exponents `n >= min_exponent`
/// outside `excluded`. Writes the verdict and, if `json` is not NULL, the
/// certificate as JSON.
///
/// # Safety
/// `excluded` must be valid for `n_excluded` reads (or NULL with 0),
/// `feasible` valid for writes, `json` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cubiclab_moments_feasible(
    min_exponent: u32,
    excluded: *const u32,
    n_excluded: usize,
    m1_num: i64,
    m1_den: i64,
    m2_num: i64,
    m2_den: i64,
    feasible: *mut bool,
    json: *mut *mut c_char,
) -> CubiclabStatus {
    if feasible.is_null() || (excluded.is_null() && n_excluded > 0) {
        return fail(CubiclabStatus::NullPointer, "NULL argument");
    }
    guard(|| {
        let ex: Vec<u32> = if n_excluded == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(excluded, n_excluded).to_vec()
        };
        let (Some(m1), Some(m2)) = (rational(m1_num, m1_den), rational(m2_num, m2_den)) else {
            return fail(CubiclabStatus::InvalidArgument, "zero denominator");
        };
        let problem = match MomentProblem::new(min_exponent, ex, m1, m2) {
            Ok(p) => p,
            Err(e) => return from_error(e),
        };
        let cert = is_feasible(&problem);
        *feasible = cert.verdict == Verdict::Feasible;
        if json.is_null() {
            return CubiclabStatus::Ok;
        }
        match serde_json::to_string(&cert) {
            Ok(s) => into_c_string(s, json),
            Err(e) => fail(CubiclabStatus::Internal, e.to_string()),
        }
    })
}
