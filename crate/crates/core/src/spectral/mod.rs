//! Frequency-domain solutions of the forward and backward equations and the
//! dwell times that follow from them.
//!
//! Narrow-band pulses are always routed to closed forms; Gaussian and
//! tabulated spectra go through [`crate::quadrature`].

mod asymptotics;
mod delays;
mod fields;

pub use asymptotics::{asymptotics, Asymptotics};
pub use delays::{
    analyze, od0_for_od_eff, scattered_delay, tau_avg, tau_s, tau_t, tau_t_parseval,
    transmission_probability, SpectralEngine,
};
pub use fields::{backward_fields, forward_fields, Direction, SpectralFields};

use crate::domain::MediumProfile;
use crate::error::Result;

/// Atomic line shape `[1 + (2ω)²]⁻¹`, unit height and unit FWHM.
pub fn lorentzian(omega: f64) -> f64 {
    1.0 / (1.0 + 4.0 * omega * omega)
}

/// Optical depth and phase accumulated by frequency `omega` over `[0, z]`.
pub fn medium_response(medium: &MediumProfile, z: f64, omega: f64) -> Result<(f64, f64)> {
    let od = medium.od_integral(z)? * lorentzian(omega);
    Ok((od, -omega * od))
}

/// Narrow-band group delay relative to free propagation,
/// `−OD₀(1 − 4Δ²)/(1 + 4Δ²)²`.
pub fn group_delay(detuning: f64, od0: f64) -> f64 {
    let d2 = 4.0 * detuning * detuning;
    -od0 * (1.0 - d2) / ((1.0 + d2) * (1.0 + d2))
}

/// Elastic-scattering (Wigner) delay of a single two-level atom, `2L(Δ)`.
pub fn wigner_delay(detuning: f64) -> f64 {
    2.0 * lorentzian(detuning)
}

/// Delay of the scattered pulse at a single frequency for total depth `od0`:
/// the Wigner delay plus the group delay averaged over the depth at which
/// the photon scatters, weighted by the survival probability to that depth.
///
/// The depth average is done in closed form,
/// `t_W + L(1 − 4Δ²)[x/(eˣ − 1) − 1]` with `x = OD₀L(Δ)`, which stays
/// accurate as `x → 0`.
pub fn scattered_delay_narrow(detuning: f64, od0: f64) -> f64 {
    let l = lorentzian(detuning);
    let x = od0 * l;
    let ratio = if x == 0.0 { 1.0 } else { x / x.exp_m1() };
    wigner_delay(detuning) + l * (1.0 - 4.0 * detuning * detuning) * (ratio - 1.0)
}

/// Excitation time of scattered photons for a narrow-band pulse,
/// `1 − e^{−x}/(1 − e^{−x})·t_g` with `x = OD₀L(Δ)`.
pub fn tau_s_narrow(detuning: f64, od0: f64) -> f64 {
    let x = od0 * lorentzian(detuning);
    1.0 - group_delay(detuning, od0) / x.exp_m1()
}
