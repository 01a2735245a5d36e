//! C ABI over `circlab`.
//!
//! Every fallible function returns a [`CirclabStatus`]; on failure a message is
//! available from [`circlab_last_error`] on the same thread. Objects are opaque
//! handles released with their `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use circlab::joint::{phi_n_estimate_with, rc_limit_phi, sc_limit_phi, Monomial};
use circlab::spectra::{
    eigenvalues_dense, eigenvalues_fast, esd_moment, ks_distance, limit_moment,
};
use circlab::trace::verify_trace;
use circlab::{
    sample_entries, CirculantMatrix, EntryDistribution, EntrySequence, Error, LimitLaw, MatrixKind,
    SpectralSample,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CirclabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidDimension = 2,
    IndexOutOfRange = 3,
    InvalidInput = 4,
    ResourceLimit = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Values accepted by `kind` parameters.
#[repr(C)]
pub enum CirclabKind {
    Reverse = 0,
    Symmetric = 1,
}

/// Values accepted by `dist` parameters.
#[repr(C)]
pub enum CirclabDistribution {
    Gaussian = 0,
    Rademacher = 1,
    Uniform = 2,
    /// Uniform on {-2, ..., 2}.
    Integer = 3,
}

/// Values accepted by `law` parameters.
#[repr(C)]
pub enum CirclabLaw {
    SymmetrizedRayleigh = 0,
    StandardGaussian = 1,
}

/// Opaque matrix handle.
pub struct CirclabMatrix(CirculantMatrix);

/// Opaque sorted-eigenvalue handle.
pub struct CirclabSpectrum(SpectralSample);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: CirclabStatus, msg: impl Into<String>) -> CirclabStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> CirclabStatus {
    let status = match &e {
        Error::InvalidDimension(_) => CirclabStatus::InvalidDimension,
        Error::IndexOutOfRange { .. } => CirclabStatus::IndexOutOfRange,
        Error::InvalidInput(_) => CirclabStatus::InvalidInput,
        Error::Resource { .. } => CirclabStatus::ResourceLimit,
        Error::Io(_) => CirclabStatus::Io,
    };
    fail(status, e.to_string())
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), CirclabStatus>) -> CirclabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CirclabStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(CirclabStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn status(self) -> Result<T, CirclabStatus>;
}

impl<T> OrStatus<T> for circlab::Result<T> {
    fn status(self) -> Result<T, CirclabStatus> {
        self.map_err(from_error)
    }
}

fn kind_from(code: u32) -> Result<MatrixKind, CirclabStatus> {
    match code {
        0 => Ok(MatrixKind::Reverse),
        1 => Ok(MatrixKind::Symmetric),
        _ => Err(fail(
            CirclabStatus::InvalidInput,
            format!("unknown kind code {code}"),
        )),
    }
}

fn dist_from(code: u32) -> Result<EntryDistribution, CirclabStatus> {
    match code {
        0 => Ok(EntryDistribution::StandardGaussian),
        1 => Ok(EntryDistribution::Rademacher),
        2 => Ok(EntryDistribution::UniformSqrt3),
        3 => Ok(EntryDistribution::IntegerTest(Default::default())),
        _ => Err(fail(
            CirclabStatus::InvalidInput,
            format!("unknown distribution code {code}"),
        )),
    }
}

fn law_from(code: u32) -> Result<LimitLaw, CirclabStatus> {
    match code {
        0 => Ok(LimitLaw::SymmetrizedRayleigh),
        1 => Ok(LimitLaw::StandardGaussian),
        _ => Err(fail(
            CirclabStatus::InvalidInput,
            format!("unknown law code {code}"),
        )),
    }
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, CirclabStatus> {
    p.as_mut()
        .ok_or_else(|| fail(CirclabStatus::NullPointer, "null output pointer"))
}

unsafe fn in_ref<'a, T>(p: *const T) -> Result<&'a T, CirclabStatus> {
    p.as_ref()
        .ok_or_else(|| fail(CirclabStatus::NullPointer, "null handle"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], CirclabStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(CirclabStatus::NullPointer, "null array"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn monomial(word: *const usize, len: usize) -> Result<Monomial, CirclabStatus> {
    Monomial::from_word(slice(word, len)?.to_vec()).status()
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn circlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn circlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Matrix of the given kind with `n` entries drawn from `dist` under `seed`.
#[no_mangle]
pub unsafe extern "C" fn circlab_matrix_sample(
    kind: u32,
    dist: u32,
    n: usize,
    seed: u64,
    out: *mut *mut CirclabMatrix,
) -> CirclabStatus {
    guard(|| {
        let out = out_ref(out)?;
        let x = sample_entries(&dist_from(dist)?, n, seed).status()?;
        *out = Box::into_raw(Box::new(CirclabMatrix(CirculantMatrix::new(
            kind_from(kind)?,
            x,
        ))));
        Ok(())
    })
}

/// Matrix built from explicit entries `values[0..n]` (`X_0..X_{n-1}`).
#[no_mangle]
pub unsafe extern "C" fn circlab_matrix_from_values(
    kind: u32,
    values: *const f64,
    n: usize,
    out: *mut *mut CirclabMatrix,
) -> CirclabStatus {
    guard(|| {
        let out = out_ref(out)?;
        let kind = kind_from(kind)?;
        let x = EntrySequence::from_values(slice(values, n)?.to_vec()).status()?;
        *out = Box::into_raw(Box::new(CirclabMatrix(CirculantMatrix::new(kind, x))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn circlab_matrix_free(m: *mut CirclabMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

#[no_mangle]
pub unsafe extern "C" fn circlab_matrix_dim(
    m: *const CirclabMatrix,
    out: *mut usize,
) -> CirclabStatus {
    guard(|| {
        *out_ref(out)? = in_ref(m)?.0.n();
        Ok(())
    })
}

/// Scaled entry at 1-based `(i, j)`.
#[no_mangle]
pub unsafe extern "C" fn circlab_matrix_entry(
    m: *const CirclabMatrix,
    i: usize,
    j: usize,
    out: *mut f64,
) -> CirclabStatus {
    guard(|| {
        let m = in_ref(m)?;
        *out_ref(out)? = m.0.entry(i, j).status()?;
        Ok(())
    })
}

/// Eigenvalues in ascending order; `dense != 0` selects the dense solver.
#[no_mangle]
pub unsafe extern "C" fn circlab_matrix_eigenvalues(
    m: *const CirclabMatrix,
    dense: i32,
    out: *mut *mut CirclabSpectrum,
) -> CirclabStatus {
    guard(|| {
        let out = out_ref(out)?;
        let m = &in_ref(m)?.0;
        let s = if dense != 0 {
            eigenvalues_dense(&m.materialize().status()?).status()?
        } else {
            eigenvalues_fast(m.kind(), m.entries())
        };
        *out = Box::into_raw(Box::new(CirclabSpectrum(s)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn circlab_spectrum_free(s: *mut CirclabSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of eigenvalues; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn circlab_spectrum_len(s: *const CirclabSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// Copies the eigenvalues into `buf`, which must hold `circlab_spectrum_len` values.
#[no_mangle]
pub unsafe extern "C" fn circlab_spectrum_copy(
    s: *const CirclabSpectrum,
    buf: *mut f64,
    cap: usize,
) -> CirclabStatus {
    guard(|| {
        let ev = in_ref(s)?.0.eigenvalues();
        if cap < ev.len() {
            return Err(fail(
                CirclabStatus::BufferTooSmall,
                format!("buffer holds {cap}, need {}", ev.len()),
            ));
        }
        if buf.is_null() {
            return Err(fail(CirclabStatus::NullPointer, "null buffer"));
        }
        ptr::copy_nonoverlapping(ev.as_ptr(), buf, ev.len());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn circlab_spectrum_moment(
    s: *const CirclabSpectrum,
    h: u32,
    out: *mut f64,
) -> CirclabStatus {
    guard(|| {
        *out_ref(out)? = esd_moment(&in_ref(s)?.0, h);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn circlab_spectrum_ks(
    s: *const CirclabSpectrum,
    law: u32,
    out: *mut f64,
) -> CirclabStatus {
    guard(|| {
        let law = law_from(law)?;
        *out_ref(out)? = ks_distance(&in_ref(s)?.0, law).status()?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn circlab_limit_moment(law: u32, h: u32, out: *mut f64) -> CirclabStatus {
    guard(|| {
        *out_ref(out)? = limit_moment(law_from(law)?, h);
        Ok(())
    })
}

/// Limit of a word (labels from 1) in independent reverse circulant matrices.
#[no_mangle]
pub unsafe extern "C" fn circlab_rc_limit_phi(
    word: *const usize,
    len: usize,
    out: *mut f64,
) -> CirclabStatus {
    guard(|| {
        *out_ref(out)? = rc_limit_phi(&monomial(word, len)?);
        Ok(())
    })
}

/// Limit of a word (labels from 1) in independent symmetric circulant matrices.
#[no_mangle]
pub unsafe extern "C" fn circlab_sc_limit_phi(
    word: *const usize,
    len: usize,
    out: *mut f64,
) -> CirclabStatus {
    guard(|| {
        *out_ref(out)? = sc_limit_phi(&monomial(word, len)?);
        Ok(())
    })
}

/// Monte Carlo estimate of `(1/n) E Tr` of a word, with its standard error.
#[no_mangle]
pub unsafe extern "C" fn circlab_phi_n_estimate(
    kind: u32,
    dist: u32,
    word: *const usize,
    len: usize,
    n: usize,
    trials: usize,
    seed: u64,
    estimate: *mut f64,
    std_error: *mut f64,
) -> CirclabStatus {
    guard(|| {
        let estimate = out_ref(estimate)?;
        let std_error = out_ref(std_error)?;
        let q = monomial(word, len)?;
        let (e, s) = phi_n_estimate_with(kind_from(kind)?, &q, &dist_from(dist)?, n, trials, seed)
            .status()?;
        *estimate = e;
        *std_error = s;
        Ok(())
    })
}

/// Compares the closed trace formula with the direct product trace in exact
/// arithmetic for integer entries drawn from `seed`.
#[no_mangle]
pub unsafe extern "C" fn circlab_verify_trace(
    kind: u32,
    n: usize,
    h: usize,
    seed: u64,
    exact_equal: *mut i32,
    abs_diff: *mut f64,
) -> CirclabStatus {
    guard(|| {
        let exact_equal = out_ref(exact_equal)?;
        let abs_diff = out_ref(abs_diff)?;
        let c = verify_trace(kind_from(kind)?, n, h, seed).status()?;
        *exact_equal = i32::from(c.exact_equal);
        *abs_diff = c.abs_diff;
        Ok(())
    })
}
