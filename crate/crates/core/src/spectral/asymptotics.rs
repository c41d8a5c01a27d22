use std::f64::consts::PI;

use super::SpectralEngine;
use crate::domain::{MediumProfile, PulseSpec};
use crate::error::{Error, Result};

/// Broadband approximations for a Gaussian pulse much shorter than the
/// atomic lifetime. `od_eff` is always the exact `−ln P_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptotics {
    pub od_eff: f64,
    /// `1 − √(π/2)·σ·OD₀`.
    pub p_t_low_od: f64,
    /// `exp(−σ√(2·OD₀))`.
    pub p_t_high_od: f64,
    /// `1 − √(2/π)·OD_eff/(4σ)`.
    pub tau_s_low_od: f64,
    /// `1 − e^{−OD_eff}/(1 − e^{−OD_eff})·OD_eff/2`.
    pub tau_s_high_od: f64,
    /// `√(π/2)·(σ/4)·OD₀²`.
    pub tau_t_low_od: f64,
    /// `OD_eff/2`.
    pub tau_t_high_od: f64,
}

pub fn asymptotics(pulse: &PulseSpec, medium: &MediumProfile) -> Result<Asymptotics> {
    asymptotics_with(&SpectralEngine::default(), pulse, medium)
}

impl SpectralEngine {
    pub fn asymptotics(&self, pulse: &PulseSpec, medium: &MediumProfile) -> Result<Asymptotics> {
        asymptotics_with(self, pulse, medium)
    }
}

fn asymptotics_with(engine: &SpectralEngine, pulse: &PulseSpec, medium: &MediumProfile) -> Result<Asymptotics> {
    let sigma = pulse
        .sigma()
        .ok_or_else(|| Error::Unsupported("broadband approximations need a Gaussian pulse".into()))?;
    if sigma > 0.2 {
        log::warn!("broadband approximations requested for sigma = {sigma}, outside sigma <= 0.2");
    }
    let od0 = medium.od0();
    let (p_t, _) = engine.transmission_probability(pulse, medium)?;
    let od_eff = -p_t.ln();
    let tau_s_high_od = if od_eff > 0.0 {
        1.0 - od_eff / (2.0 * od_eff.exp_m1())
    } else {
        0.5
    };
    Ok(Asymptotics {
        od_eff,
        p_t_low_od: 1.0 - (PI / 2.0).sqrt() * sigma * od0,
        p_t_high_od: (-sigma * (2.0 * od0).sqrt()).exp(),
        tau_s_low_od: 1.0 - (2.0 / PI).sqrt() * od_eff / (4.0 * sigma),
        tau_s_high_od,
        tau_t_low_od: (PI / 2.0).sqrt() * sigma / 4.0 * od0 * od0,
        tau_t_high_od: 0.5 * od_eff,
    })
}
