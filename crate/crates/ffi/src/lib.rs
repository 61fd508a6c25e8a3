//! C ABI over the resolvability toolkit.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns an
//! [`HrError`]; on failure [`hr_last_error`] describes the problem.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hamres::embed::{embed, EmbeddingBasis, Provenance, OCTAPEPTIDE_77};
use hamres::ilp::ModeKind;
use hamres::setfile::VertexSet;
use hamres::{verify_groebner_parallel, verify_ilp, Error, Kmer, Status, Verdict};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HrError {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    TooLarge = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HrMethod {
    Brute = 0,
    Groebner = 1,
    IlpExact = 2,
    IlpFeasibility = 3,
    IlpRandomObjective = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HrStatus {
    Resolving = 0,
    NotResolving = 1,
    Inconclusive = 2,
}

/// A vertex set together with its Hamming graph.
pub struct HrSet {
    inner: VertexSet,
}

/// Outcome of a verification.
pub struct HrVerdict {
    inner: Verdict,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_of(e: &Error) -> HrError {
    match e {
        Error::Parse { .. } | Error::UnknownSymbol { .. } | Error::LengthMismatch { .. } | Error::AtLine { .. } => {
            HrError::Parse
        }
        Error::InstanceTooLarge { .. } => HrError::TooLarge,
        Error::Io { .. } => HrError::Io,
        _ => HrError::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), HrError>) -> HrError {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HrError::Ok,
        Ok(Err(code)) => code,
        Err(_) => {
            set_error("internal panic".into());
            HrError::Panic
        }
    }
}

fn fail(e: Error) -> HrError {
    let code = code_of(&e);
    set_error(e.to_string());
    code
}

fn null() -> HrError {
    set_error("null pointer argument".into());
    HrError::NullPointer
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, HrError> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        HrError::InvalidUtf8
    })
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), HrError> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a set in `hrs-set v1` text form.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hr_set_parse(text: *const c_char, out: *mut *mut HrSet) -> HrError {
    guard(|| {
        let text = read_str(text)?;
        let inner = VertexSet::parse(text).map_err(fail)?;
        put(out, HrSet { inner })
    })
}

/// Reads a set from an `hrs-set v1` file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hr_set_read(path: *const c_char, out: *mut *mut HrSet) -> HrError {
    guard(|| {
        let path = read_str(path)?;
        let inner = VertexSet::read(path).map_err(fail)?;
        put(out, HrSet { inner })
    })
}

/// The shipped 77-element octapeptide set.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hr_set_shipped(out: *mut *mut HrSet) -> HrError {
    guard(|| {
        let inner = VertexSet::parse(OCTAPEPTIDE_77).map_err(fail)?;
        put(out, HrSet { inner })
    })
}

/// Number of vertices, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hr_set_len(set: *const HrSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.kmers.len())
}

/// `k` of the set's graph, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hr_set_k(set: *const HrSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.instance.k())
}

/// `a` of the set's graph, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hr_set_a(set: *const HrSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.instance.a())
}

/// # Safety
/// `set` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn hr_set_free(set: *mut HrSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Decides whether `set` resolves its graph.
///
/// `seed` is used by the randomized ILP modes; `budget_nodes` of 0 means
/// no node budget; `workers` applies to the Groebner method.
///
/// # Safety
/// `set` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hr_verify(
    set: *const HrSet,
    method: HrMethod,
    seed: u64,
    budget_nodes: u64,
    workers: usize,
    out: *mut *mut HrVerdict,
) -> HrError {
    guard(|| {
        let set = set.as_ref().ok_or_else(null)?;
        let kmers = &set.inner.kmers;
        let budget = (budget_nodes > 0).then_some(budget_nodes);
        let verdict = match method {
            HrMethod::Brute => hamres::brute_force_verify(kmers),
            HrMethod::Groebner => verify_groebner_parallel(kmers, workers.max(1)),
            HrMethod::IlpExact => verify_ilp(kmers, ModeKind::PowersOfTwo, None, budget),
            HrMethod::IlpFeasibility => verify_ilp(kmers, ModeKind::Feasibility, Some(seed), budget),
            HrMethod::IlpRandomObjective => verify_ilp(kmers, ModeKind::RandomNormal, Some(seed), budget),
        }
        .map_err(fail)?;
        put(out, HrVerdict { inner: verdict })
    })
}

/// # Safety
/// `verdict` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hr_verdict_status(verdict: *const HrVerdict) -> HrStatus {
    match verdict.as_ref().map(|v| v.inner.status) {
        Some(Status::Resolving) => HrStatus::Resolving,
        Some(Status::NotResolving) => HrStatus::NotResolving,
        _ => HrStatus::Inconclusive,
    }
}

/// Writes the two witness vertices, rendered in the instance alphabet, as
/// new strings to release with [`hr_string_free`]. Both are set to NULL
/// when the verdict carries no witness.
///
/// # Safety
/// `verdict` must be a live handle; `x` and `y` writable pointers.
#[no_mangle]
pub unsafe extern "C" fn hr_verdict_witness(
    verdict: *const HrVerdict,
    x: *mut *mut c_char,
    y: *mut *mut c_char,
) -> HrError {
    guard(|| {
        let v = verdict.as_ref().ok_or_else(null)?;
        if x.is_null() || y.is_null() {
            return Err(null());
        }
        let render = |k: &Kmer| CString::new(k.render()).map_or(ptr::null_mut(), CString::into_raw);
        match &v.inner.witness {
            Some((a, b)) => {
                *x = render(a);
                *y = render(b);
            }
            None => {
                *x = ptr::null_mut();
                *y = ptr::null_mut();
            }
        }
        Ok(())
    })
}

/// # Safety
/// `verdict` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn hr_verdict_free(verdict: *mut HrVerdict) {
    if !verdict.is_null() {
        drop(Box::from_raw(verdict));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn hr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Distances from `sequence` to each element of `basis`, written to `out`.
///
/// `*out_len` always receives the dimension; `BufferTooSmall` is returned
/// when `capacity` is below it.
///
/// # Safety
/// `basis` must be a live handle, `sequence` a NUL-terminated string, `out`
/// valid for `capacity` writes and `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn hr_embed(
    basis: *const HrSet,
    sequence: *const c_char,
    out: *mut u32,
    capacity: usize,
    out_len: *mut usize,
) -> HrError {
    guard(|| {
        let basis = basis.as_ref().ok_or_else(null)?;
        let text = read_str(sequence)?;
        if out_len.is_null() {
            return Err(null());
        }
        let b = EmbeddingBasis::new(basis.inner.clone(), Provenance::ShrinkOutput);
        *out_len = b.dimension();
        if capacity < b.dimension() {
            set_error(format!("buffer holds {capacity} entries, {} needed", b.dimension()));
            return Err(HrError::BufferTooSmall);
        }
        if out.is_null() {
            return Err(null());
        }
        let v = Kmer::parse(text, &b.instance).map_err(fail)?;
        let phi = embed(&v, &b).map_err(fail)?;
        ptr::copy_nonoverlapping(phi.as_ptr(), out, phi.len());
        Ok(())
    })
}
