use num_complex::Complex64;

use super::{group_delay, lorentzian, scattered_delay_narrow, tau_s_narrow, wigner_delay};
use crate::domain::{DelayReport, MediumProfile, Method, PulseShape, PulseSpec};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_spectrum, integrate_spectrum_fixed, QuadratureConfig};

/// Frequency-domain engine with explicit quadrature controls.
///
/// The free functions of this module use [`SpectralEngine::default`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpectralEngine {
    pub quadrature: QuadratureConfig,
    /// Evaluate on a single grid of this many intervals instead of refining.
    pub fixed_intervals: Option<usize>,
}

impl SpectralEngine {
    pub fn new(quadrature: QuadratureConfig) -> Self {
        Self {
            quadrature,
            fixed_intervals: None,
        }
    }

    pub fn fixed(n: usize) -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            fixed_intervals: Some(n),
        }
    }

    fn integrate<const K: usize>(
        &self,
        pulse: &PulseSpec,
        f: impl Fn(f64, f64) -> [f64; K],
    ) -> Result<[f64; K]> {
        if !pulse.is_normalized() {
            return Err(invalid("pulse spectrum is not normalized"));
        }
        match self.fixed_intervals {
            Some(n) => integrate_spectrum_fixed(pulse, n, f),
            None => integrate_spectrum(pulse, &self.quadrature, f),
        }
    }

    /// `(P_T, P_S)`, with `P_T = ∫S·e^{−OD₀L(ω)}` and `P_S` integrated from
    /// `1 − e^{−OD₀L(ω)}` so that it keeps full relative precision at low
    /// optical depth.
    pub fn transmission_probability(&self, pulse: &PulseSpec, medium: &MediumProfile) -> Result<(f64, f64)> {
        let od0 = medium.od0();
        if let PulseShape::NarrowBand { detuning } = pulse.shape() {
            let x = od0 * lorentzian(*detuning);
            return Ok(((-x).exp(), -(-x).exp_m1()));
        }
        let [p_t, p_s] = self.integrate(pulse, |w, s| {
            let x = od0 * lorentzian(w);
            [s * (-x).exp(), -s * (-x).exp_m1()]
        })?;
        Ok((p_t, p_s))
    }

    /// Excitation time of the average photon, `∫S·[1 − e^{−OD₀L(ω)}]`.
    pub fn tau_avg(&self, pulse: &PulseSpec, medium: &MediumProfile) -> Result<f64> {
        let od0 = medium.od0();
        if let PulseShape::NarrowBand { detuning } = pulse.shape() {
            return Ok(1.0 - (-od0 * lorentzian(*detuning)).exp());
        }
        let [t] = self.integrate(pulse, |w, s| [s * (1.0 - (-od0 * lorentzian(w)).exp())])?;
        Ok(t)
    }

    /// Transmitted-photon excitation time as the transmitted-spectrum
    /// weighted average of the narrow-band group delay.
    pub fn tau_t(&self, pulse: &PulseSpec, medium: &MediumProfile) -> Result<f64> {
        let od0 = medium.od0();
        if let PulseShape::NarrowBand { detuning } = pulse.shape() {
            return Ok(group_delay(*detuning, od0));
        }
        let [num, p_t] = self.integrate(pulse, |w, s| {
            let weight = s * (-od0 * lorentzian(w)).exp();
            [weight * group_delay(w, od0), weight]
        })?;
        require_transmission(p_t)?;
        Ok(num / p_t)
    }

    /// Transmitted-photon excitation time from the overlap of the backward
    /// and forward excitation amplitudes,
    /// `Re (OD₀/(4P_T))∫S·e^{−OD₀L(ω)}/(ω² − 1/4 − iω)`.
    pub fn tau_t_parseval(&self, pulse: &PulseSpec, medium: &MediumProfile) -> Result<f64> {
        let od0 = medium.od0();
        let kernel = |w: f64| Complex64::new(w * w - 0.25, -w).inv();
        if let PulseShape::NarrowBand { detuning } = pulse.shape() {
            return Ok(0.25 * od0 * kernel(*detuning).re);
        }
        let [num, p_t] = self.integrate(pulse, |w, s| {
            let weight = s * (-od0 * lorentzian(w)).exp();
            [(weight * kernel(w)).re, weight]
        })?;
        require_transmission(p_t)?;
        Ok(0.25 * od0 * num / p_t)
    }

    /// Scattered-photon excitation time from the sum rule,
    /// `1 − (P_T/P_S)τ_T`. Narrow-band pulses use the closed form directly.
    pub fn tau_s(&self, pulse: &PulseSpec, medium: &MediumProfile) -> Result<f64> {
        let od0 = medium.od0();
        if let PulseShape::NarrowBand { detuning } = pulse.shape() {
            require_scattering(-(-od0 * lorentzian(*detuning)).exp_m1())?;
            return Ok(tau_s_narrow(*detuning, od0));
        }
        let (p_t, p_s) = self.transmission_probability(pulse, medium)?;
        require_scattering(p_s)?;
        let tau_t = self.tau_t(pulse, medium)?;
        Ok(1.0 - p_t / p_s * tau_t)
    }

    /// Delay of the scattered pulse: the single-frequency scattered delay
    /// averaged over the scattered spectrum `S·[1 − e^{−OD₀L(ω)}]`.
    pub fn scattered_delay(&self, pulse: &PulseSpec, medium: &MediumProfile) -> Result<f64> {
        let od0 = medium.od0();
        if let PulseShape::NarrowBand { detuning } = pulse.shape() {
            require_scattering(-(-od0 * lorentzian(*detuning)).exp_m1())?;
            return Ok(scattered_delay_narrow(*detuning, od0));
        }
        let [num, p_s] = self.integrate(pulse, |w, s| {
            let weight = -s * (-od0 * lorentzian(w)).exp_m1();
            [weight * scattered_delay_narrow(w, od0), weight]
        })?;
        require_scattering(p_s)?;
        Ok(num / p_s)
    }

    /// Full report. When nothing scatters, `tau_s` is `NaN` and `t_s` is
    /// absent.
    pub fn analyze(&self, pulse: &PulseSpec, medium: &MediumProfile) -> Result<DelayReport> {
        let (p_t, p_s) = self.transmission_probability(pulse, medium)?;
        require_transmission(p_t)?;
        let tau_0 = self.tau_avg(pulse, medium)?;
        let tau_t = self.tau_t(pulse, medium)?;
        let scatters = p_s > 0.0;
        let tau_s = if scatters { self.tau_s(pulse, medium)? } else { f64::NAN };
        let t_s = if scatters { Some(self.scattered_delay(pulse, medium)?) } else { None };
        let (t_g, t_w) = match pulse.shape() {
            PulseShape::NarrowBand { detuning } => {
                (Some(group_delay(*detuning, medium.od0())), Some(wigner_delay(*detuning)))
            }
            _ => (None, None),
        };
        Ok(DelayReport {
            p_t,
            p_s,
            tau_0,
            tau_t,
            tau_s,
            t_g,
            t_w,
            t_s,
            od_eff: -p_t.ln(),
            method: Method::Analytic,
        })
    }

    /// Resonant optical depth at which the pulse reaches the effective
    /// optical depth `od_eff = −ln P_T`, by bisection on the monotone `P_T`.
    pub fn od0_for_od_eff(&self, pulse: &PulseSpec, od_eff: f64) -> Result<f64> {
        if !(od_eff >= 0.0 && od_eff.is_finite()) {
            return Err(invalid(format!("effective optical depth must be non-negative, got {od_eff}")));
        }
        if od_eff == 0.0 {
            return Ok(0.0);
        }
        let eff = |od0: f64| -> Result<f64> {
            let medium = MediumProfile::uniform(od0, 1.0)?;
            Ok(-self.transmission_probability(pulse, &medium)?.0.ln())
        };
        let (mut lo, mut hi) = (0.0, od_eff.max(1e-6));
        while eff(hi)? < od_eff {
            lo = hi;
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::Numeric(format!("effective optical depth {od_eff} is out of reach")));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if eff(mid)? < od_eff {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

fn require_transmission(p_t: f64) -> Result<()> {
    if p_t > 0.0 {
        Ok(())
    } else {
        Err(Error::Undefined("transmission probability is zero".into()))
    }
}

fn require_scattering(p_s: f64) -> Result<()> {
    if p_s > 0.0 {
        Ok(())
    } else {
        Err(Error::Undefined("scattering probability is zero".into()))
    }
}

pub fn transmission_probability(pulse: &PulseSpec, medium: &MediumProfile) -> Result<(f64, f64)> {
    SpectralEngine::default().transmission_probability(pulse, medium)
}

pub fn tau_avg(pulse: &PulseSpec, medium: &MediumProfile) -> Result<f64> {
    SpectralEngine::default().tau_avg(pulse, medium)
}

pub fn tau_t(pulse: &PulseSpec, medium: &MediumProfile) -> Result<f64> {
    SpectralEngine::default().tau_t(pulse, medium)
}

pub fn tau_t_parseval(pulse: &PulseSpec, medium: &MediumProfile) -> Result<f64> {
    SpectralEngine::default().tau_t_parseval(pulse, medium)
}

pub fn tau_s(pulse: &PulseSpec, medium: &MediumProfile) -> Result<f64> {
    SpectralEngine::default().tau_s(pulse, medium)
}

pub fn scattered_delay(pulse: &PulseSpec, medium: &MediumProfile) -> Result<f64> {
    SpectralEngine::default().scattered_delay(pulse, medium)
}

pub fn analyze(pulse: &PulseSpec, medium: &MediumProfile) -> Result<DelayReport> {
    SpectralEngine::default().analyze(pulse, medium)
}

pub fn od0_for_od_eff(pulse: &PulseSpec, od_eff: f64) -> Result<f64> {
    SpectralEngine::default().od0_for_od_eff(pulse, od_eff)
}
