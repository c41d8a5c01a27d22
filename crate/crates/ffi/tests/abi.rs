use std::ffi::CStr;
use std::ptr;

use photon_dwell_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(pd_last_error_message()) }.to_string_lossy().into_owned()
}

struct Handles {
    pulse: *mut PdPulse,
    medium: *mut PdMedium,
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            pd_pulse_free(self.pulse);
            pd_medium_free(self.medium);
        }
    }
}

fn gaussian(sigma: f64, od0: f64, length: f64) -> Handles {
    let mut h = Handles {
        pulse: ptr::null_mut(),
        medium: ptr::null_mut(),
    };
    assert_eq!(unsafe { pd_pulse_gaussian(sigma, 0.0, &mut h.pulse) }, PdStatus::Ok);
    assert_eq!(unsafe { pd_medium_uniform(od0, length, &mut h.medium) }, PdStatus::Ok);
    h
}

#[test]
fn spectral_report_satisfies_sum_rule() {
    let h = gaussian(1.0, 2.0, 1.0);
    let mut r = std::mem::MaybeUninit::<PdDelayReport>::uninit();
    assert_eq!(unsafe { pd_analyze(h.pulse, h.medium, r.as_mut_ptr()) }, PdStatus::Ok);
    let r = unsafe { r.assume_init() };
    assert!((r.p_t + r.p_s - 1.0).abs() < 1e-12);
    assert!((r.p_s * r.tau_s + r.p_t * r.tau_t - r.p_s).abs() < 1e-9);
    assert!((r.tau_0 - r.p_s).abs() < 1e-9);
    assert!(r.t_g.is_nan());
    assert_eq!(r.method, 0);
}

#[test]
fn narrow_band_report_has_group_delay() {
    let mut pulse = ptr::null_mut();
    let mut medium = ptr::null_mut();
    unsafe {
        assert_eq!(pd_pulse_narrow_band(0.0, &mut pulse), PdStatus::Ok);
        assert_eq!(pd_medium_uniform(3.0, 1.0, &mut medium), PdStatus::Ok);
    }
    let h = Handles { pulse, medium };
    let mut r = std::mem::MaybeUninit::<PdDelayReport>::uninit();
    assert_eq!(unsafe { pd_analyze(h.pulse, h.medium, r.as_mut_ptr()) }, PdStatus::Ok);
    let r = unsafe { r.assume_init() };
    assert_eq!(r.tau_t, -3.0);
    assert_eq!(r.t_g, -3.0);
    assert_eq!(r.t_w, 2.0);
}

#[test]
fn time_domain_agrees_with_spectral() {
    let h = gaussian(1.0, 2.0, 2.0);
    let mut a = std::mem::MaybeUninit::<PdDelayReport>::uninit();
    let mut b = std::mem::MaybeUninit::<PdDelayReport>::uninit();
    unsafe {
        assert_eq!(pd_analyze(h.pulse, h.medium, a.as_mut_ptr()), PdStatus::Ok);
        assert_eq!(pd_analyze_timedomain(h.pulse, h.medium, 200, b.as_mut_ptr()), PdStatus::Ok);
    }
    let (a, b) = unsafe { (a.assume_init(), b.assume_init()) };
    assert_eq!(b.method, 1);
    assert!((a.tau_t / b.tau_t - 1.0).abs() < 0.02);
    assert!((a.p_t / b.p_t - 1.0).abs() < 0.01);
}

#[test]
fn od_eff_inversion() {
    let h = gaussian(0.3, 1.0, 1.0);
    let mut od0 = 0.0;
    assert_eq!(unsafe { pd_od0_for_od_eff(h.pulse, 2.0, &mut od0) }, PdStatus::Ok);
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { pd_medium_uniform(od0, 1.0, &mut m) }, PdStatus::Ok);
    let mut r = std::mem::MaybeUninit::<PdDelayReport>::uninit();
    assert_eq!(unsafe { pd_analyze(h.pulse, m, r.as_mut_ptr()) }, PdStatus::Ok);
    assert!((unsafe { r.assume_init() }.od_eff - 2.0).abs() < 1e-9);
    unsafe { pd_medium_free(m) };
}

#[test]
fn tabulated_medium_matches_uniform() {
    let z: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    // OD₀ = 4g²L.
    let g = vec![0.5f64.sqrt(); z.len()];
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { pd_medium_tabulated(1.0, z.as_ptr(), g.as_ptr(), z.len(), &mut m) }, PdStatus::Ok);
    let h = gaussian(1.0, 2.0, 1.0);
    let mut a = std::mem::MaybeUninit::<PdDelayReport>::uninit();
    let mut b = std::mem::MaybeUninit::<PdDelayReport>::uninit();
    unsafe {
        assert_eq!(pd_analyze(h.pulse, h.medium, a.as_mut_ptr()), PdStatus::Ok);
        assert_eq!(pd_analyze(h.pulse, m, b.as_mut_ptr()), PdStatus::Ok);
        pd_medium_free(m);
    }
    let (a, b) = unsafe { (a.assume_init(), b.assume_init()) };
    assert!((a.tau_t - b.tau_t).abs() < 1e-12);
}

#[test]
fn cavity_entry_points() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { pd_pulse_narrow_band(0.0, &mut p) }, PdStatus::Ok);
    let (mut tau_b, mut dwell) = (0.0, 0.0);
    unsafe {
        assert_eq!(pd_cavity_tau_b(1.0, 3.0, p, &mut tau_b), PdStatus::Ok);
        assert_eq!(pd_cavity_dwell(1.0, 3.0, p, &mut dwell), PdStatus::Ok);
        assert_eq!(pd_cavity_tau_b(-1.0, 3.0, p, &mut tau_b), PdStatus::InvalidParameter);
        pd_pulse_free(p);
    }
    assert!((tau_b + 0.5).abs() < 1e-12);
    assert!(dwell > 0.0);
}

#[test]
fn errors_and_null_pointers() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { pd_pulse_gaussian(0.0, 0.0, &mut p) }, PdStatus::InvalidParameter);
    assert!(p.is_null());
    assert!(last_error().contains("invalid parameter"));

    assert_eq!(unsafe { pd_pulse_gaussian(1.0, 0.0, ptr::null_mut()) }, PdStatus::NullPointer);
    let mut r = std::mem::MaybeUninit::<PdDelayReport>::uninit();
    assert_eq!(unsafe { pd_analyze(ptr::null(), ptr::null(), r.as_mut_ptr()) }, PdStatus::NullPointer);
    assert_eq!(
        unsafe { pd_medium_tabulated(1.0, ptr::null(), ptr::null(), 3, &mut ptr::null_mut()) },
        PdStatus::NullPointer
    );

    let h = gaussian(1.0, 1.0, 1.0);
    let mut od0 = 0.0;
    assert_ne!(unsafe { pd_od0_for_od_eff(h.pulse, -1.0, &mut od0) }, PdStatus::Ok);

    // Narrow-band pulses have no time-domain representation.
    let mut nb = ptr::null_mut();
    assert_eq!(unsafe { pd_pulse_narrow_band(0.0, &mut nb) }, PdStatus::Ok);
    let s = unsafe { pd_analyze_timedomain(nb, h.medium, 200, r.as_mut_ptr()) };
    assert_eq!(s, PdStatus::Unsupported);
    unsafe {
        pd_pulse_free(nb);
        pd_pulse_free(ptr::null_mut());
        pd_medium_free(ptr::null_mut());
    }
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(pd_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/photon_dwell.h")).unwrap();
    for sym in ["pd_analyze", "pd_last_error_message", "PdDelayReport", "PD_STATUS_NULL_POINTER", "typedef struct PdPulse"] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}
