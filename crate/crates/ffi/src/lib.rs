//! C ABI over `warpspec-core`.
//!
//! Objects are opaque handles created by `ws_*_new`/producer calls and released with the
//! matching `ws_*_free`. Every fallible call returns a [`WsStatus`]; on failure the
//! message is kept per thread and can be read with [`ws_last_error_message`].
//! Handles are not thread-safe to mutate, but none of the calls here mutate them.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use warpspec_core::distributions::s_density;
use warpspec_core::transforms::{
    default_modulated_grid, default_warped_grid, modulated_forward, modulated_inverse, warped_forward,
    WarpedMethod,
};
use warpspec_core::warp::{make_analytic_warp, make_numeric_warp};
use warpspec_core::{Error, SampledSignal, SpectrumGrid, SpectrumSamples, TimeGrid, WarpSpec};

/// Status codes. `Ok` is zero; everything else is a failure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    NullPointer = 1,
    Panic = 2,
    UnknownFamily = 10,
    NonMonotoneParameters = 11,
    NonPositiveG = 12,
    GridTooCoarse = 20,
    GridMismatch = 21,
    NonMonotoneWarp = 22,
    ResampleOutOfRange = 23,
    NyquistViolation = 30,
    RangeTooNarrow = 31,
    BadPotential = 40,
    ConvergenceFailure = 41,
    LinearSolveFailure = 42,
    InvalidGrid = 50,
    InvalidInput = 51,
    InsufficientRuns = 60,
    ConfigParse = 61,
    Io = 62,
}

impl From<&Error> for WsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::UnknownFamily(_) => WsStatus::UnknownFamily,
            Error::NonMonotoneParameters { .. } => WsStatus::NonMonotoneParameters,
            Error::NonPositiveG { .. } => WsStatus::NonPositiveG,
            Error::GridTooCoarse(_) => WsStatus::GridTooCoarse,
            Error::GridMismatch(_) => WsStatus::GridMismatch,
            Error::NonMonotoneWarp { .. } => WsStatus::NonMonotoneWarp,
            Error::ResampleOutOfRange { .. } => WsStatus::ResampleOutOfRange,
            Error::NyquistViolation(_) => WsStatus::NyquistViolation,
            Error::RangeTooNarrow(_) => WsStatus::RangeTooNarrow,
            Error::BadPotential(_) => WsStatus::BadPotential,
            Error::ConvergenceFailure(_) => WsStatus::ConvergenceFailure,
            Error::LinearSolveFailure(_) => WsStatus::LinearSolveFailure,
            Error::InvalidGrid(_) => WsStatus::InvalidGrid,
            Error::InvalidInput(_) => WsStatus::InvalidInput,
            Error::InsufficientRuns(_) => WsStatus::InsufficientRuns,
            Error::ConfigParse(_) => WsStatus::ConfigParse,
            Error::Io(_) => WsStatus::Io,
        }
    }
}

/// Transform flavor for [`ws_warped_forward`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsMethod {
    DirectQuadrature = 0,
    ResampleFft = 1,
}

/// Opaque warp handle.
pub struct WsWarp(WarpSpec);
/// Opaque complex signal on a uniform time grid.
pub struct WsSignal(SampledSignal);
/// Opaque complex spectrum on a uniform energy grid.
pub struct WsSpectrum(SpectrumSamples);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), WsStatus>) -> WsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            WsStatus::Panic
        }
    }
}

fn core<T>(r: warpspec_core::Result<T>) -> Result<T, WsStatus> {
    r.map_err(|e| {
        set_error(format!("{}: {e}", e.code()));
        WsStatus::from(&e)
    })
}

fn null(what: &str) -> WsStatus {
    set_error(format!("null pointer: {what}"));
    WsStatus::NullPointer
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], WsStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn give<T>(out: *mut *mut T, v: T) -> Result<(), WsStatus> {
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

macro_rules! deref {
    ($p:expr, $what:expr) => {
        match $p.as_ref() {
            Some(r) => r,
            None => return Err(null($what)),
        }
    };
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated, truncated
/// to `len`). Returns the full message length in bytes, or 0 if there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ws_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Analytic warp by family name (`identity`, `linear-scale`, `chirp`, `sin-perturbed`,
/// `exp-rate`, `zero`).
///
/// # Safety
/// `name` must be a NUL-terminated string, `params` must hold `n_params` doubles, and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_warp_analytic(
    name: *const c_char,
    params: *const f64,
    n_params: usize,
    out: *mut *mut WsWarp,
) -> WsStatus {
    guard(|| {
        if name.is_null() || out.is_null() {
            return Err(null("name/out"));
        }
        let name = CStr::from_ptr(name).to_str().map_err(|_| {
            set_error("warp name is not UTF-8".into());
            WsStatus::InvalidInput
        })?;
        let params = slice(params, n_params, "params")?;
        give(out, WsWarp(core(make_analytic_warp(name, params))?))
    })
}

/// Warp from `n` samples of `g` on `[t_min, t_max]`, with `h(t0) = c0`.
///
/// # Safety
/// `g` must hold `n` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_warp_numeric(
    t_min: f64,
    t_max: f64,
    n: usize,
    g: *const f64,
    t0: f64,
    c0: f64,
    out: *mut *mut WsWarp,
) -> WsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = core(TimeGrid::new(t_min, t_max, n))?;
        let g = slice(g, n, "g")?;
        give(out, WsWarp(core(make_numeric_warp(grid, g, t0, c0))?))
    })
}

/// Evaluates `g(t)` and `h(t)`; either output may be null.
///
/// # Safety
/// `w` must be a live warp handle.
#[no_mangle]
pub unsafe extern "C" fn ws_warp_eval(w: *const WsWarp, t: f64, g: *mut f64, h: *mut f64) -> WsStatus {
    guard(|| {
        let w = &deref!(w, "warp").0;
        if let Some(g) = g.as_mut() {
            *g = w.g(t);
        }
        if let Some(h) = h.as_mut() {
            *h = w.h(t);
        }
        Ok(())
    })
}

/// `h⁻¹(u)`.
///
/// # Safety
/// `w` must be a live warp handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ws_warp_h_inv(w: *const WsWarp, u: f64, out: *mut f64) -> WsStatus {
    guard(|| {
        let w = &deref!(w, "warp").0;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = w.h_inv(u);
        Ok(())
    })
}

/// # Safety
/// `w` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ws_warp_free(w: *mut WsWarp) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Signal from separate real and imaginary arrays of length `n` on `[t_min, t_max]`.
/// `im` may be null for a real signal.
///
/// # Safety
/// `re` (and `im` if non-null) must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_signal_new(
    t_min: f64,
    t_max: f64,
    n: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut WsSignal,
) -> WsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = core(TimeGrid::new(t_min, t_max, n))?;
        let re = slice(re, n, "re")?;
        let values = if im.is_null() {
            re.iter().map(|&r| Complex64::new(r, 0.0)).collect()
        } else {
            let im = slice(im, n, "im")?;
            re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect()
        };
        give(out, WsSignal(core(SampledSignal::new(grid, values))?))
    })
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_signal_len(s: *const WsSignal) -> usize {
    s.as_ref().map_or(0, |s| s.0.values.len())
}

/// Copies the samples out; `re`/`im` must each hold `ws_signal_len(s)` doubles.
///
/// # Safety
/// See above.
#[no_mangle]
pub unsafe extern "C" fn ws_signal_copy(s: *const WsSignal, re: *mut f64, im: *mut f64) -> WsStatus {
    guard(|| {
        let s = deref!(s, "signal");
        copy_out(&s.0.values, re, im)
    })
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ws_signal_free(s: *mut WsSignal) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of energies, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_spectrum_len(s: *const WsSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.values.len())
}

/// Energy grid end points.
///
/// # Safety
/// `s` must be a live handle; outputs may be null.
#[no_mangle]
pub unsafe extern "C" fn ws_spectrum_grid(s: *const WsSpectrum, e_min: *mut f64, e_max: *mut f64) -> WsStatus {
    guard(|| {
        let g = deref!(s, "spectrum").0.grid;
        if let Some(p) = e_min.as_mut() {
            *p = g.e_min;
        }
        if let Some(p) = e_max.as_mut() {
            *p = g.e_max;
        }
        Ok(())
    })
}

/// Copies the values out; `re`/`im` must each hold `ws_spectrum_len(s)` doubles.
///
/// # Safety
/// See above.
#[no_mangle]
pub unsafe extern "C" fn ws_spectrum_copy(s: *const WsSpectrum, re: *mut f64, im: *mut f64) -> WsStatus {
    guard(|| {
        let s = deref!(s, "spectrum");
        copy_out(&s.0.values, re, im)
    })
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ws_spectrum_free(s: *mut WsSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

unsafe fn copy_out(v: &[Complex64], re: *mut f64, im: *mut f64) -> Result<(), WsStatus> {
    if re.is_null() || im.is_null() {
        return Err(null("re/im"));
    }
    for (k, z) in v.iter().enumerate() {
        *re.add(k) = z.re;
        *im.add(k) = z.im;
    }
    Ok(())
}

// n == 0 selects the default grid
fn energy_grid(e_min: f64, e_max: f64, n: usize, default: impl FnOnce() -> warpspec_core::Result<SpectrumGrid>) -> Result<SpectrumGrid, WsStatus> {
    if n == 0 {
        core(default())
    } else {
        core(SpectrumGrid::new(e_min, e_max, n))
    }
}

/// Phase-modulated transform `(1/√2π) ∫ f e^{−i(Et + h)} dt`. Pass `n = 0` for the
/// FFT-conjugate grid of the signal.
///
/// # Safety
/// `f`, `w` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ws_modulated_forward(
    f: *const WsSignal,
    w: *const WsWarp,
    e_min: f64,
    e_max: f64,
    n: usize,
    out: *mut *mut WsSpectrum,
) -> WsStatus {
    guard(|| {
        let f = &deref!(f, "signal").0;
        let w = &deref!(w, "warp").0;
        if out.is_null() {
            return Err(null("out"));
        }
        let eg = energy_grid(e_min, e_max, n, || Ok(default_modulated_grid(&f.grid)))?;
        give(out, WsSpectrum(core(modulated_forward(f, w, &eg))?))
    })
}

/// Inverse of [`ws_modulated_forward`] onto `n` points of `[t_min, t_max]`.
///
/// # Safety
/// `s`, `w` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ws_modulated_inverse(
    s: *const WsSpectrum,
    w: *const WsWarp,
    t_min: f64,
    t_max: f64,
    n: usize,
    out: *mut *mut WsSignal,
) -> WsStatus {
    guard(|| {
        let s = &deref!(s, "spectrum").0;
        let w = &deref!(w, "warp").0;
        if out.is_null() {
            return Err(null("out"));
        }
        let tg = core(TimeGrid::new(t_min, t_max, n))?;
        give(out, WsSignal(core(modulated_inverse(s, w, &tg))?))
    })
}

/// Warped transform `(1/√2π) ∫ f e^{−iEh} dt`. Pass `n = 0` for the grid conjugate to
/// the `h` spacing.
///
/// # Safety
/// `f`, `w` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ws_warped_forward(
    f: *const WsSignal,
    w: *const WsWarp,
    e_min: f64,
    e_max: f64,
    n: usize,
    method: WsMethod,
    out: *mut *mut WsSpectrum,
) -> WsStatus {
    guard(|| {
        let f = &deref!(f, "signal").0;
        let w = &deref!(w, "warp").0;
        if out.is_null() {
            return Err(null("out"));
        }
        let eg = energy_grid(e_min, e_max, n, || default_warped_grid(w, &f.grid))?;
        let m = match method {
            WsMethod::DirectQuadrature => WarpedMethod::DirectQuadrature,
            WsMethod::ResampleFft => WarpedMethod::ResampleFft,
        };
        give(out, WsSpectrum(core(warped_forward(f, w, &eg, m))?))
    })
}

/// Regularized density `S(E)` on `n` energies of `[e_min, e_max]`.
///
/// # Safety
/// `w` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ws_s_density(
    w: *const WsWarp,
    e_min: f64,
    e_max: f64,
    n: usize,
    out: *mut *mut WsSpectrum,
) -> WsStatus {
    guard(|| {
        let w = &deref!(w, "warp").0;
        if out.is_null() {
            return Err(null("out"));
        }
        let eg = core(SpectrumGrid::new(e_min, e_max, n))?;
        give(out, WsSpectrum(core(s_density(w, &eg))?))
    })
}
