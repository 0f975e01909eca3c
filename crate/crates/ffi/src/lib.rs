//! C interface to `voros-core`.
//!
//! Every function returns a [`VorosStatus`]. On failure the message is kept
//! per thread and can be copied out with [`voros_last_error_message`].
//! Handles are opaque; each `*_new`/`voros_quantize*` call must be paired
//! with the matching `*_free`.
//!
//! Oracle functions take and return the spectral parameter `lambda` of
//! `y'' = (z^m + lambda) y`. Product and Stokes functions work in the
//! variable of the product, `s = -lambda`.
//!
//! Safety contract shared by all functions: handles must come from this
//! library and not be used after they are freed; output pointers must be
//! NULL or valid for writes; `buf`/`capacity` pairs must describe writable
//! memory. NULL handles and outputs are reported, not dereferenced.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use voros_core::oracle::{D0Route, OdeProblem};
use voros_core::quantizer::{run_scheme, QuantizationProblem};
use voros_core::specfun::{stokes_c, stokes_d, DRoute};
use voros_core::{EntireProduct, Error, RotationParams};

#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VorosStatus {
    Ok = 0,
    NullPointer = 1,
    /// Parameters outside the supported range, or inconsistent input data.
    InvalidArgument = 2,
    /// An iteration or root solve did not converge. Quantization still
    /// returns its last iterate in this case.
    NotConverged = 3,
    /// Overflow, loss of conditioning, or evaluation on a pole guard.
    Numeric = 4,
    /// The output buffer holds fewer entries than were produced.
    BufferTooSmall = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VorosComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for VorosComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<VorosComplex> for Complex64 {
    fn from(z: VorosComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// A converged (or last-iterate) product together with its rotation data.
pub struct VorosProduct {
    product: EntireProduct,
    rot: RotationParams,
    converged: bool,
    residual: f64,
}

/// ODE shooting oracle for one exponent `m` and boundary pair `ell`.
pub struct VorosOracle {
    problem: OdeProblem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    // interior NULs cannot cross into C
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> VorosStatus {
    match e {
        Error::Validation { .. } | Error::Domain(_) => VorosStatus::InvalidArgument,
        Error::Root(_) | Error::Integration { .. } | Error::Fit(_) => VorosStatus::NotConverged,
        Error::Range { .. } | Error::PoleGuard { .. } | Error::Conditioning(_) => VorosStatus::Numeric,
    }
}

struct Failure(VorosStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(VorosStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure and turns panics into `Panic`.
fn guard(f: impl FnOnce() -> Result<VorosStatus, Failure>) -> VorosStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => {
            if status == VorosStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            status
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            VorosStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn product_ref<'a>(h: *const VorosProduct) -> Result<&'a VorosProduct, Failure> {
    h.as_ref().ok_or_else(|| null("product handle"))
}

unsafe fn oracle_ref<'a>(h: *const VorosOracle) -> Result<&'a VorosOracle, Failure> {
    h.as_ref().ok_or_else(|| null("oracle handle"))
}

/// Copies `values` into `buf`; `written` receives the full count even when
/// the buffer is too small.
unsafe fn copy_out<T: Copy>(values: &[T], buf: *mut T, capacity: usize, written: *mut usize) -> Result<VorosStatus, Failure> {
    write(written, values.len(), "written")?;
    if values.len() > capacity {
        return Err(Failure(
            VorosStatus::BufferTooSmall,
            format!("{} values do not fit in a buffer of {capacity}", values.len()),
        ));
    }
    if !values.is_empty() {
        if buf.is_null() {
            return Err(null("buffer"));
        }
        std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    Ok(VorosStatus::Ok)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn voros_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len` bytes) and returns the length it needs including the
/// NUL. Returns 0 when there is no error. Pass `buf = NULL` to query the size.
#[no_mangle]
pub unsafe extern "C" fn voros_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                std::ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n - 1) = 0;
            }
            bytes.len()
        }
    })
}

fn quantize(rot: RotationParams, levels: usize, tolerance: f64, max_iterations: usize) -> Result<(VorosProduct, VorosStatus), Failure> {
    let mut problem = QuantizationProblem::new(rot, levels, tolerance)?;
    problem.max_iterations = max_iterations;
    problem.validate()?;
    let (product, report) = run_scheme(&problem)?;
    let status = if report.converged { VorosStatus::Ok } else { VorosStatus::NotConverged };
    if !report.converged {
        set_error(format!(
            "no convergence after {} sweeps, residual {:e}",
            report.iterations, report.quantization_residual
        ));
    }
    Ok((
        VorosProduct {
            product,
            rot,
            converged: report.converged,
            residual: report.quantization_residual,
        },
        status,
    ))
}

unsafe fn quantize_into(
    out: *mut *mut VorosProduct,
    run: impl FnOnce() -> Result<(VorosProduct, VorosStatus), Failure>,
) -> VorosStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (product, status) = run()?;
        out.write(Box::into_raw(Box::new(product)));
        Ok(status)
    })
}

/// Runs the quantization scheme for rotation angle `alpha` and phase offset
/// `phase_offset`. On `Ok` or `NotConverged`, `*out` receives a handle
/// that must be released with `voros_product_free`.
#[no_mangle]
pub unsafe extern "C" fn voros_quantize(
    alpha: f64,
    phase_offset: f64,
    levels: usize,
    tolerance: f64,
    max_iterations: usize,
    out: *mut *mut VorosProduct,
) -> VorosStatus {
    quantize_into(out, || quantize(RotationParams::new(alpha, phase_offset)?, levels, tolerance, max_iterations))
}

/// Same as `voros_quantize` with `alpha = 2 pi / (m + 2)` and
/// `phase_offset = alpha / 2`, whose levels are the half-line Dirichlet
/// levels of `-y'' + x^m y`.
#[no_mangle]
pub unsafe extern "C" fn voros_quantize_exponent(
    m: f64,
    levels: usize,
    tolerance: f64,
    max_iterations: usize,
    out: *mut *mut VorosProduct,
) -> VorosStatus {
    quantize_into(out, || quantize(RotationParams::for_exponent(m)?, levels, tolerance, max_iterations))
}

/// Wraps `count` strictly increasing positive zeros as a finite product
/// without a tail.
#[no_mangle]
pub unsafe extern "C" fn voros_product_from_levels(
    levels: *const f64,
    count: usize,
    alpha: f64,
    phase_offset: f64,
    out: *mut *mut VorosProduct,
) -> VorosStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if levels.is_null() && count > 0 {
            return Err(null("levels"));
        }
        let zeros = if count == 0 { Vec::new() } else { std::slice::from_raw_parts(levels, count).to_vec() };
        let product = VorosProduct {
            product: EntireProduct::new(zeros, None)?,
            rot: RotationParams::new(alpha, phase_offset)?,
            converged: true,
            residual: 0.0,
        };
        out.write(Box::into_raw(Box::new(product)));
        Ok(VorosStatus::Ok)
    })
}

/// Releases a product handle. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn voros_product_free(handle: *mut VorosProduct) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

#[no_mangle]
pub unsafe extern "C" fn voros_product_level_count(handle: *const VorosProduct, count: *mut usize) -> VorosStatus {
    guard(|| {
        write(count, product_ref(handle)?.product.zeros().len(), "count")?;
        Ok(VorosStatus::Ok)
    })
}

/// Copies the stored levels into `buf`. `*written` receives the number of
/// levels, also when `BufferTooSmall` is returned.
#[no_mangle]
pub unsafe extern "C" fn voros_product_levels(
    handle: *const VorosProduct,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> VorosStatus {
    guard(|| copy_out(product_ref(handle)?.product.zeros(), buf, capacity, written))
}

/// Quantization residual of the final iterate and whether it met the tolerance.
#[no_mangle]
pub unsafe extern "C" fn voros_product_convergence(
    handle: *const VorosProduct,
    converged: *mut bool,
    residual: *mut f64,
) -> VorosStatus {
    guard(|| {
        let h = product_ref(handle)?;
        write(converged, h.converged, "converged")?;
        write(residual, h.residual, "residual")?;
        Ok(VorosStatus::Ok)
    })
}

/// The product itself at `x`.
#[no_mangle]
pub unsafe extern "C" fn voros_product_eval(handle: *const VorosProduct, x: VorosComplex, out: *mut VorosComplex) -> VorosStatus {
    guard(|| {
        write(out, product_ref(handle)?.product.eval(x.into())?.into(), "out")?;
        Ok(VorosStatus::Ok)
    })
}

/// Stokes multiplier `C(x)` built from the product.
#[no_mangle]
pub unsafe extern "C" fn voros_stokes_c(handle: *const VorosProduct, x: VorosComplex, out: *mut VorosComplex) -> VorosStatus {
    guard(|| {
        let h = product_ref(handle)?;
        write(out, stokes_c(&h.product, &h.rot, x.into(), true)?.into(), "out")?;
        Ok(VorosStatus::Ok)
    })
}

/// Stokes multiplier `D(x)`, evaluated directly from values of the product.
#[no_mangle]
pub unsafe extern "C" fn voros_stokes_d(handle: *const VorosProduct, x: VorosComplex, out: *mut VorosComplex) -> VorosStatus {
    guard(|| {
        let h = product_ref(handle)?;
        write(out, stokes_d(&h.product, &h.rot, x.into(), DRoute::Direct)?.into(), "out")?;
        Ok(VorosStatus::Ok)
    })
}

/// Creates an oracle for `y'' = (z^m + lambda) y`, `m >= 2`, with decay
/// imposed in the sectors `-ell` and `ell` (1 or 2).
#[no_mangle]
pub unsafe extern "C" fn voros_oracle_new(m: f64, ell: u8, out: *mut *mut VorosOracle) -> VorosStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let oracle = VorosOracle { problem: OdeProblem::new(m, ell)? };
        out.write(Box::into_raw(Box::new(oracle)));
        Ok(VorosStatus::Ok)
    })
}

/// Releases an oracle handle. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn voros_oracle_free(handle: *mut VorosOracle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// The lowest `count` real eigenvalues, ascending. `*written` receives how
/// many were found, which can be fewer than `count`.
#[no_mangle]
pub unsafe extern "C" fn voros_oracle_eigenvalues(
    handle: *const VorosOracle,
    count: usize,
    buf: *mut f64,
    written: *mut usize,
) -> VorosStatus {
    guard(|| {
        let set = oracle_ref(handle)?.problem.pt_eigenvalues(1e5, count)?;
        let values: Vec<f64> = set.values.iter().map(|z| z.re).collect();
        copy_out(&values, buf, count, written)
    })
}

/// The lowest `count` Dirichlet levels of `-y'' + x^m y` on the half line.
/// These are the values the ODE-mode quantization reproduces.
#[no_mangle]
pub unsafe extern "C" fn voros_oracle_halfline_levels(
    handle: *const VorosOracle,
    count: usize,
    buf: *mut f64,
    written: *mut usize,
) -> VorosStatus {
    guard(|| {
        let set = oracle_ref(handle)?.problem.halfline_dirichlet_spectrum(count)?;
        let values: Vec<f64> = set.values.iter().map(|z| z.re).collect();
        copy_out(&values, buf, count, written)
    })
}

/// Spectral determinant, normalized to 1 at `lambda = 0`.
#[no_mangle]
pub unsafe extern "C" fn voros_oracle_determinant(handle: *const VorosOracle, lambda: VorosComplex, out: *mut VorosComplex) -> VorosStatus {
    guard(|| {
        write(out, oracle_ref(handle)?.problem.determinant_f(lambda.into())?.into(), "out")?;
        Ok(VorosStatus::Ok)
    })
}

/// `C0(lambda)` from Wronskians of decaying solutions.
#[no_mangle]
pub unsafe extern "C" fn voros_oracle_c0(handle: *const VorosOracle, lambda: VorosComplex, out: *mut VorosComplex) -> VorosStatus {
    guard(|| {
        write(out, oracle_ref(handle)?.problem.stokes_c0(lambda.into())?.into(), "out")?;
        Ok(VorosStatus::Ok)
    })
}

/// `D0(lambda)`, through determinants when `m > 2`.
#[no_mangle]
pub unsafe extern "C" fn voros_oracle_d0(handle: *const VorosOracle, lambda: VorosComplex, out: *mut VorosComplex) -> VorosStatus {
    guard(|| {
        let oracle = oracle_ref(handle)?;
        let route = if oracle.problem.m() > 2.0 { D0Route::Determinant } else { D0Route::Wronskian };
        write(out, oracle.problem.stokes_d0(lambda.into(), route)?.into(), "out")?;
        Ok(VorosStatus::Ok)
    })
}
