//! C interface to `sinai-core`.
//!
//! Fallible functions return a [`SinaiStatus`]; after a failure,
//! [`sinai_last_error`] describes it for the calling thread. Paths and
//! engines are opaque handles owned by the caller and released with the
//! matching `_free` function. Functions that fill caller buffers report the
//! number of values through `written`; when `cap` is too small they return
//! `SINAI_STATUS_BUFFER_TOO_SMALL` with `written` set to the size needed.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use sinai_core::coarsen::{Engine, Sign};
use sinai_core::envgrid::{self, Direction, Path};
use sinai_core::error::Error;
use sinai_core::{laws, renewal};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SinaiStatus {
    Ok = 0,
    NullPointer = 1,
    BufferTooSmall = 2,
    InvalidArgument = 3,
    NonFiniteInput = 4,
    DomainError = 5,
    InsufficientDomain = 6,
    InvalidChain = 7,
    WindowExhausted = 8,
    Unsupported = 9,
    NotConverged = 10,
    InsufficientHits = 11,
    BeyondLog = 12,
    Internal = 13,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SinaiDirection {
    Up = 0,
    Down = 1,
}

impl From<Direction> for SinaiDirection {
    fn from(d: Direction) -> SinaiDirection {
        match d {
            Direction::Up => SinaiDirection::Up,
            Direction::Down => SinaiDirection::Down,
        }
    }
}

/// Central slope of a level-`x` chain.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SinaiCentralStats {
    pub excess: f64,
    pub length: f64,
    pub direction: SinaiDirection,
    pub rel_origin: f64,
    /// Localization point at this level.
    pub b: f64,
}

/// Exponents and coefficients of the generating function at one `z`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct SinaiExponents {
    pub lambda1_re: f64,
    pub lambda1_im: f64,
    pub lambda2_re: f64,
    pub lambda2_im: f64,
    pub c1_re: f64,
    pub c1_im: f64,
    pub c2_re: f64,
    pub c2_im: f64,
}

/// Opaque sampled environment.
pub struct SinaiPath {
    inner: Path,
}

/// Opaque coarsening engine.
pub struct SinaiEngine {
    inner: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

enum Failure {
    Core(Error),
    Null(&'static str),
    Buffer { needed: usize, written: *mut usize },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Core(e)
    }
}

fn status_of(e: &Error) -> SinaiStatus {
    match e {
        Error::NonFiniteInput(_) => SinaiStatus::NonFiniteInput,
        Error::InsufficientDomain(_) => SinaiStatus::InsufficientDomain,
        Error::InvalidChain(_) => SinaiStatus::InvalidChain,
        Error::InvalidArgument(_) | Error::EmptyInput => SinaiStatus::InvalidArgument,
        Error::WindowExhausted { .. } => SinaiStatus::WindowExhausted,
        Error::NonMonotoneEvent { .. } => SinaiStatus::Internal,
        Error::Unsupported(_) => SinaiStatus::Unsupported,
        Error::DomainError(_) => SinaiStatus::DomainError,
        Error::TruncationNotConverged { .. } => SinaiStatus::NotConverged,
        Error::InsufficientHits { .. } => SinaiStatus::InsufficientHits,
        Error::BeyondLog { .. } => SinaiStatus::BeyondLog,
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, turning errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SinaiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SinaiStatus::Ok,
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("{what} is null"));
            SinaiStatus::NullPointer
        }
        Ok(Err(Failure::Buffer { needed, written })) => {
            if !written.is_null() {
                // SAFETY: checked non-null; the caller provides a valid slot.
                unsafe { *written = needed };
            }
            set_last_error(format!("buffer too small: {needed} values needed"));
            SinaiStatus::BufferTooSmall
        }
        Err(_) => {
            set_last_error("internal panic".into());
            SinaiStatus::Internal
        }
    }
}

/// # Safety
/// `p` must be null or valid for reads as `T`.
unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

/// # Safety
/// `p` must be null or valid for writes as `T`.
unsafe fn put<T>(p: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(value);
    Ok(())
}

/// # Safety
/// `buf` must be valid for `cap` writes and `written` null or writable.
unsafe fn fill(
    values: &[f64],
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> Result<(), Failure> {
    if values.len() > cap {
        return Err(Failure::Buffer {
            needed: values.len(),
            written,
        });
    }
    if !values.is_empty() {
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    if !written.is_null() {
        *written = values.len();
    }
    Ok(())
}

/// Message describing the last failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sinai_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Samples a two-sided Brownian environment on `[-half_length, half_length]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sinai_path_sample(
    half_length: f64,
    step: f64,
    seed: u64,
    out: *mut *mut SinaiPath,
) -> SinaiStatus {
    guard(|| {
        let inner = envgrid::sample_path(half_length, step, seed)?;
        put(out, Box::into_raw(Box::new(SinaiPath { inner })), "out")
    })
}

/// Wraps caller values sampled with spacing `step`; `origin_index` marks
/// `t = 0`.
///
/// # Safety
/// `values` must be valid for `len` reads and `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn sinai_path_from_values(
    step: f64,
    origin_index: usize,
    values: *const f64,
    len: usize,
    out: *mut *mut SinaiPath,
) -> SinaiStatus {
    guard(|| {
        if values.is_null() {
            return Err(Failure::Null("values"));
        }
        let v = std::slice::from_raw_parts(values, len).to_vec();
        let inner = Path::new(step, origin_index, v, 0)?;
        put(out, Box::into_raw(Box::new(SinaiPath { inner })), "out")
    })
}

/// Number of grid points, or 0 for a null handle.
///
/// # Safety
/// `path` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sinai_path_len(path: *const SinaiPath) -> usize {
    path.as_ref().map_or(0, |p| p.inner.len())
}

/// # Safety
/// `path` must be a live handle, `buf` valid for `cap` writes, `written`
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn sinai_path_values(
    path: *const SinaiPath,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> SinaiStatus {
    guard(|| fill(get(path, "path")?.inner.values(), buf, cap, written))
}

/// Central slope of the level-`level` chain of `path`.
///
/// # Safety
/// `path` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sinai_path_central_stats(
    path: *const SinaiPath,
    level: f64,
    out: *mut SinaiCentralStats,
) -> SinaiStatus {
    guard(|| {
        let chain = envgrid::extract_slopes(&get(path, "path")?.inner, level)?;
        let c = envgrid::central_stats(&chain);
        let stats = SinaiCentralStats {
            excess: c.excess,
            length: c.length,
            direction: c.direction.into(),
            rel_origin: c.rel_origin,
            b: c.b,
        };
        put(out, stats, "out")
    })
}

/// # Safety
/// `path` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sinai_path_free(path: *mut SinaiPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// Grid-mode engine over the level-`level` chain of `path`.
///
/// # Safety
/// `path` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sinai_engine_from_path(
    path: *const SinaiPath,
    level: f64,
    out: *mut *mut SinaiEngine,
) -> SinaiStatus {
    guard(|| {
        let chain = envgrid::extract_slopes(&get(path, "path")?.inner, level)?;
        let inner = Engine::from_chain(&chain)?;
        put(out, Box::into_raw(Box::new(SinaiEngine { inner })), "out")
    })
}

/// Synthetic level-1 engine with `n_slopes` (odd, at least 3) slopes.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sinai_engine_synthetic(
    n_slopes: usize,
    seed: u64,
    out: *mut *mut SinaiEngine,
) -> SinaiStatus {
    guard(|| {
        let inner = Engine::synthetic(n_slopes, seed)?;
        put(out, Box::into_raw(Box::new(SinaiEngine { inner })), "out")
    })
}

/// Raises the level to `x_max`.
///
/// # Safety
/// `engine` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sinai_engine_advance(engine: *mut SinaiEngine, x_max: f64) -> SinaiStatus {
    guard(|| {
        let e = engine.as_mut().ok_or(Failure::Null("engine"))?;
        e.inner.advance_to(x_max)?;
        Ok(())
    })
}

/// # Safety
/// `engine` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sinai_engine_level(
    engine: *const SinaiEngine,
    out: *mut f64,
) -> SinaiStatus {
    guard(|| put(out, get(engine, "engine")?.inner.level(), "out"))
}

/// Live slopes, or 0 for a null handle.
///
/// # Safety
/// `engine` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sinai_engine_live_slopes(engine: *const SinaiEngine) -> usize {
    engine.as_ref().map_or(0, |e| e.inner.live_slopes())
}

/// Sign-change levels recorded so far and the initial sign (+1 or -1).
///
/// # Safety
/// `engine` must be a live handle, `buf` valid for `cap` writes, `written`
/// and `initial_sign` null or writable.
#[no_mangle]
pub unsafe extern "C" fn sinai_engine_flips(
    engine: *const SinaiEngine,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
    initial_sign: *mut i32,
) -> SinaiStatus {
    guard(|| {
        let log = get(engine, "engine")?.inner.flips();
        if !initial_sign.is_null() {
            *initial_sign = sign_value(log.initial_sign);
        }
        fill(&log.levels, buf, cap, written)
    })
}

/// # Safety
/// `engine` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sinai_engine_free(engine: *mut SinaiEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

fn sign_value(s: Sign) -> i32 {
    match s {
        Sign::Plus => 1,
        Sign::Minus => -1,
    }
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sinai_exponents(
    z_re: f64,
    z_im: f64,
    out: *mut SinaiExponents,
) -> SinaiStatus {
    guard(|| {
        let ev = laws::exponents(Complex64::new(z_re, z_im))?;
        let e = SinaiExponents {
            lambda1_re: ev.lambda1.re,
            lambda1_im: ev.lambda1.im,
            lambda2_re: ev.lambda2.re,
            lambda2_im: ev.lambda2.im,
            c1_re: ev.c1.re,
            c1_im: ev.c1.im,
            c2_re: ev.c2.re,
            c2_im: ev.c2.im,
        };
        put(out, e, "out")
    })
}

/// `E z^{k(x)}` for `x >= 1` and complex `z` off `(-inf, -5/4]`.
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sinai_genfun(
    x: f64,
    z_re: f64,
    z_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SinaiStatus {
    guard(|| {
        let a = laws::genfun(x, Complex64::new(z_re, z_im))?;
        put(out_re, a.re, "out_re")?;
        put(out_im, a.im, "out_im")
    })
}

/// `P(k(x) = 0)`, the probability of no sign change on `[1, x]`.
#[no_mangle]
pub extern "C" fn sinai_survival(x: f64) -> f64 {
    laws::survival(x)
}

#[no_mangle]
pub extern "C" fn sinai_ratio_cdf(r: f64) -> f64 {
    laws::ratio_cdf(r)
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sinai_ratio_density(r: f64, out: *mut f64) -> SinaiStatus {
    guard(|| put(out, laws::ratio_density(r)?, "out"))
}

#[no_mangle]
pub extern "C" fn sinai_central_excess_density(y: f64) -> f64 {
    laws::central_excess_density(y)
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sinai_slope_length_density(
    t: f64,
    tol: f64,
    out: *mut f64,
) -> SinaiStatus {
    guard(|| put(out, laws::slope_length_density(t, tol)?, "out"))
}

/// Large-deviation rate of `k(e^t) / t`; infinite for `a < 0`.
#[no_mangle]
pub extern "C" fn sinai_rate_function(a: f64) -> f64 {
    laws::rate_function(a)
}

#[no_mangle]
pub extern "C" fn sinai_first_flip_cdf(x: f64) -> f64 {
    laws::first_flip_cdf(x)
}

/// One renewal run up to `x_max`: sign-change levels and initial sign.
///
/// # Safety
/// `buf` must be valid for `cap` writes, `written` and `initial_sign` null
/// or writable.
#[no_mangle]
pub unsafe extern "C" fn sinai_renewal_simulate(
    x_max: f64,
    seed: u64,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
    initial_sign: *mut i32,
) -> SinaiStatus {
    guard(|| {
        let log = renewal::simulate_sign_changes(x_max, seed)?;
        if !initial_sign.is_null() {
            *initial_sign = sign_value(log.initial_sign);
        }
        fill(&log.levels, buf, cap, written)
    })
}

/// Frequency estimate of `-(1/t) log P(k(e^t) >= a t)` over `n` runs.
///
/// # Safety
/// `rate` and `hits` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sinai_ldp_tail_estimate(
    a: f64,
    t: f64,
    n: u64,
    seed: u64,
    rate: *mut f64,
    hits: *mut u64,
) -> SinaiStatus {
    guard(|| {
        let e = renewal::ldp_tail_estimate(a, t, n, seed)?;
        put(rate, e.rate, "rate")?;
        put(hits, e.hits, "hits")
    })
}
