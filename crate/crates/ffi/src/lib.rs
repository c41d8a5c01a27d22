//! C ABI over the photon-dwell engines.
//!
//! Pulses and media are opaque heap handles created by the `pd_pulse_*` and
//! `pd_medium_*` constructors and released with the matching `*_free`. Every fallible call
//! returns a [`PdStatus`]; on failure the message is available from
//! [`pd_last_error_message`] on the same thread. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use photon_dwell::cavity::{self, CavityParams};
use photon_dwell::spectral::SpectralEngine;
use photon_dwell::timedomain::{analyze_timedomain, GridSpec};
use photon_dwell::{DelayReport, Error, MediumProfile, PulseSpec, WeakProbeConfig};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdStatus {
    Ok = 0,
    InvalidParameter = 1,
    Domain = 2,
    Numeric = 3,
    Unsupported = 4,
    Undefined = 5,
    OracleBudget = 6,
    NullPointer = 7,
    Panic = 8,
}

impl From<&Error> for PdStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) => PdStatus::InvalidParameter,
            Error::Domain { .. } => PdStatus::Domain,
            Error::Numeric(_) => PdStatus::Numeric,
            Error::Unsupported(_) => PdStatus::Unsupported,
            Error::Undefined(_) => PdStatus::Undefined,
            Error::OracleBudget { .. } => PdStatus::OracleBudget,
        }
    }
}

/// Opaque pulse handle.
pub struct PdPulse(PulseSpec);

/// Opaque medium handle.
pub struct PdMedium(MediumProfile);

/// Delay report; narrow-band-only entries are `NaN` for other pulses.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdDelayReport {
    pub p_t: f64,
    pub p_s: f64,
    pub tau_0: f64,
    pub tau_t: f64,
    pub tau_s: f64,
    pub t_g: f64,
    pub t_w: f64,
    pub t_s: f64,
    pub od_eff: f64,
    /// 0 for the spectral engine, 1 for the time-domain engine.
    pub method: u32,
}

impl From<&DelayReport> for PdDelayReport {
    fn from(r: &DelayReport) -> Self {
        Self {
            p_t: r.p_t,
            p_s: r.p_s,
            tau_0: r.tau_0,
            tau_t: r.tau_t,
            tau_s: r.tau_s,
            t_g: r.t_g.unwrap_or(f64::NAN),
            t_w: r.t_w.unwrap_or(f64::NAN),
            t_s: r.t_s.unwrap_or(f64::NAN),
            od_eff: r.od_eff,
            method: match r.method {
                photon_dwell::Method::Analytic => 0,
                photon_dwell::Method::TimeDomain => 1,
            },
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(PdStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(PdStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PdStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            PdStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            PdStatus::Panic
        }
    }
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn store<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: non-null and valid per the caller contract.
    unsafe { out.write(value) };
    Ok(())
}

/// # Safety
/// `p` must be null or point to a live handle.
unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    // SAFETY: per the caller contract.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn pd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Gaussian pulse of spectral width `sigma` and carrier detuning `detuning`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn pd_pulse_gaussian(sigma: f64, detuning: f64, out: *mut *mut PdPulse) -> PdStatus {
    guard(|| {
        let p = PulseSpec::gaussian(sigma, detuning)?;
        unsafe { store(out, Box::into_raw(Box::new(PdPulse(p)))) }
    })
}

/// Narrow-band (monochromatic) pulse.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn pd_pulse_narrow_band(detuning: f64, out: *mut *mut PdPulse) -> PdStatus {
    guard(|| unsafe { store(out, Box::into_raw(Box::new(PdPulse(PulseSpec::narrow_band(detuning))))) })
}

/// # Safety
/// `pulse` must be null or a handle from a `pd_pulse_*` constructor that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn pd_pulse_free(pulse: *mut PdPulse) {
    if !pulse.is_null() {
        drop(unsafe { Box::from_raw(pulse) });
    }
}

/// Uniform medium with resonant optical depth `od0` over `length`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn pd_medium_uniform(od0: f64, length: f64, out: *mut *mut PdMedium) -> PdStatus {
    guard(|| {
        let m = MediumProfile::uniform(od0, length)?;
        unsafe { store(out, Box::into_raw(Box::new(PdMedium(m)))) }
    })
}

/// Medium with coupling `g[k]` tabulated at positions `z[k]`, `k < n`.
///
/// # Safety
/// `z` and `g` must point to `n` readable doubles; `out` must be valid for a
/// pointer write.
#[no_mangle]
pub unsafe extern "C" fn pd_medium_tabulated(
    length: f64,
    z: *const f64,
    g: *const f64,
    n: usize,
    out: *mut *mut PdMedium,
) -> PdStatus {
    guard(|| {
        if z.is_null() || g.is_null() {
            return Err(null("table"));
        }
        // SAFETY: `n` readable values per the caller contract.
        let (z, g) = unsafe { (std::slice::from_raw_parts(z, n), std::slice::from_raw_parts(g, n)) };
        let m = MediumProfile::tabulated(length, z.to_vec(), g.to_vec())?;
        unsafe { store(out, Box::into_raw(Box::new(PdMedium(m)))) }
    })
}

/// # Safety
/// `medium` must be null or a live handle from a `pd_medium_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn pd_medium_free(medium: *mut PdMedium) {
    if !medium.is_null() {
        drop(unsafe { Box::from_raw(medium) });
    }
}

/// Spectral-engine delay report.
///
/// # Safety
/// `pulse` and `medium` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_analyze(pulse: *const PdPulse, medium: *const PdMedium, out: *mut PdDelayReport) -> PdStatus {
    guard(|| {
        let (p, m) = unsafe { (borrow(pulse, "pulse")?, borrow(medium, "medium")?) };
        let r = SpectralEngine::default().analyze(&p.0, &m.0)?;
        unsafe { store(out, PdDelayReport::from(&r)) }
    })
}

/// Time-domain delay report on a grid of `cells` spatial cells.
///
/// # Safety
/// `pulse` and `medium` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_analyze_timedomain(
    pulse: *const PdPulse,
    medium: *const PdMedium,
    cells: usize,
    out: *mut PdDelayReport,
) -> PdStatus {
    guard(|| {
        let (p, m) = unsafe { (borrow(pulse, "pulse")?, borrow(medium, "medium")?) };
        let grid = GridSpec::new(&p.0, &m.0, cells)?;
        let r = analyze_timedomain(&p.0, &m.0, &grid, &WeakProbeConfig::default())?;
        unsafe { store(out, PdDelayReport::from(&r)) }
    })
}

/// Resonant optical depth of a uniform medium whose transmission of `pulse`
/// is `exp(-od_eff)`.
///
/// # Safety
/// `pulse` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_od0_for_od_eff(pulse: *const PdPulse, od_eff: f64, out: *mut f64) -> PdStatus {
    guard(|| {
        let p = unsafe { borrow(pulse, "pulse")? };
        let od0 = SpectralEngine::default().od0_for_od_eff(&p.0, od_eff)?;
        unsafe { store(out, od0) }
    })
}

/// Reflected-photon pointer shift of a cavity with input and output mirror
/// rates `gamma1`, `gamma2`.
///
/// # Safety
/// `pulse` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_cavity_tau_b(gamma1: f64, gamma2: f64, pulse: *const PdPulse, out: *mut f64) -> PdStatus {
    guard(|| {
        let p = unsafe { borrow(pulse, "pulse")? };
        let t = cavity::tau_b_direct(&CavityParams::new(gamma1, gamma2)?, &p.0)?;
        unsafe { store(out, t) }
    })
}

/// Average intracavity dwell time.
///
/// # Safety
/// `pulse` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_cavity_dwell(gamma1: f64, gamma2: f64, pulse: *const PdPulse, out: *mut f64) -> PdStatus {
    guard(|| {
        let p = unsafe { borrow(pulse, "pulse")? };
        let t = cavity::dwell_avg(&CavityParams::new(gamma1, gamma2)?, &p.0)?;
        unsafe { store(out, t) }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;
    use std::ptr;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(pd_last_error_message()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn error_mapping_covers_variants() {
        assert_eq!(PdStatus::from(&Error::Numeric("x".into())), PdStatus::Numeric);
        assert_eq!(
            PdStatus::from(&Error::OracleBudget { required: 2, budget: 1 }),
            PdStatus::OracleBudget
        );
    }

    #[test]
    fn panics_are_contained() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, PdStatus::Panic);
        assert!(last_error().contains("boom"));
    }

    #[test]
    fn success_clears_message() {
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { pd_pulse_gaussian(-1.0, 0.0, &mut p) }, PdStatus::InvalidParameter);
        assert!(!last_error().is_empty());
        assert_eq!(unsafe { pd_pulse_gaussian(1.0, 0.0, &mut p) }, PdStatus::Ok);
        assert!(last_error().is_empty());
        unsafe { pd_pulse_free(p) };
    }
}
