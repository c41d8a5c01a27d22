//! Value types shared by the spectral, time-domain and cavity engines.
//!
//! Everything internal is expressed in natural units: `c = 1` and `Γ = 1`,
//! so times are in units of `1/Γ`, frequencies in units of `Γ`, and lengths
//! in units of `c/Γ`. [`AtomParams`] carries the physical decay rate and
//! converts inputs and reports between physical and natural units.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Atomic decay rate `Γ` of the two-level transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    gamma: f64,
}

impl AtomParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("decay rate must be positive, got {gamma}")));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Re-expresses a pulse given in physical units (times in the same unit
    /// as `1/gamma`) in natural units.
    pub fn to_natural(&self, pulse: &PulseSpec) -> Result<PulseSpec> {
        let g = self.gamma;
        match &pulse.shape {
            PulseShape::Gaussian { sigma, detuning } => PulseSpec::gaussian(sigma * g, detuning / g),
            PulseShape::NarrowBand { detuning } => Ok(PulseSpec::narrow_band(detuning / g)),
            PulseShape::Tabulated(tab) => {
                let omega: Vec<f64> = tab.omega.iter().map(|w| w / g).collect();
                PulseSpec::tabulated(omega, tab.amplitude.clone(), pulse.normalized)
            }
        }
    }
}

impl Default for AtomParams {
    fn default() -> Self {
        Self { gamma: 1.0 }
    }
}

/// Spectrum of an input pulse sampled on an increasing frequency table.
///
/// Amplitudes are interpolated linearly between samples and vanish outside
/// the table.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSpectrum {
    omega: Vec<f64>,
    amplitude: Vec<Complex64>,
}

impl TabulatedSpectrum {
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn amplitude_at(&self, w: f64) -> Complex64 {
        let n = self.omega.len();
        if w < self.omega[0] || w > self.omega[n - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let k = match self.omega.partition_point(|&x| x <= w) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (w0, w1) = (self.omega[k], self.omega[k + 1]);
        let s = (w - w0) / (w1 - w0);
        self.amplitude[k] * (1.0 - s) + self.amplitude[k + 1] * s
    }

    /// `∫|a(ω)|² dω` of the piecewise-linear interpolant, evaluated exactly.
    fn norm(&self) -> f64 {
        self.omega
            .windows(2)
            .zip(self.amplitude.windows(2))
            .map(|(w, a)| {
                let h = w[1] - w[0];
                h * (a[0].norm_sqr() + (a[0].conj() * a[1]).re + a[1].norm_sqr()) / 3.0
            })
            .sum()
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            omega: self.omega.clone(),
            amplitude: self.amplitude.iter().map(|a| a * factor).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    /// Gaussian in time with RMS intensity duration `sigma`, carrier detuned
    /// by `detuning` from the atomic resonance.
    Gaussian { sigma: f64, detuning: f64 },
    /// Formal limit of an infinitely long pulse: `c|α̃_in(ω)|² = δ(ω − Δ)`.
    NarrowBand { detuning: f64 },
    Tabulated(TabulatedSpectrum),
}

/// A single-photon input amplitude `α_in`, specified by its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSpec {
    shape: PulseShape,
    normalized: bool,
}

impl PulseSpec {
    pub fn gaussian(sigma: f64, detuning: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(format!("pulse duration must be positive, got {sigma}")));
        }
        if !detuning.is_finite() {
            return Err(invalid("detuning must be finite"));
        }
        Ok(Self {
            shape: PulseShape::Gaussian { sigma, detuning },
            normalized: true,
        })
    }

    pub fn narrow_band(detuning: f64) -> Self {
        Self {
            shape: PulseShape::NarrowBand { detuning },
            normalized: true,
        }
    }

    /// Builds a tabulated spectrum. With `normalize`, amplitudes are rescaled
    /// so that the interpolated spectrum integrates to one; otherwise the
    /// pulse is flagged normalized only if it already is (to 1e-9).
    pub fn tabulated(omega: Vec<f64>, amplitude: Vec<Complex64>, normalize: bool) -> Result<Self> {
        if omega.len() < 2 || omega.len() != amplitude.len() {
            return Err(invalid(format!(
                "tabulated spectrum needs matching tables of at least two samples, got {} and {}",
                omega.len(),
                amplitude.len()
            )));
        }
        if omega.iter().any(|w| !w.is_finite()) || amplitude.iter().any(|a| !a.is_finite()) {
            return Err(invalid("tabulated spectrum contains non-finite samples"));
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("frequency samples must be strictly increasing"));
        }
        let tab = TabulatedSpectrum { omega, amplitude };
        let norm = tab.norm();
        if norm <= 0.0 {
            return Err(invalid("tabulated spectrum has zero weight"));
        }
        let (tab, normalized) = if normalize {
            (tab.scaled(norm.sqrt().recip()), true)
        } else {
            (tab, (norm - 1.0).abs() < 1e-9)
        };
        Ok(Self {
            shape: PulseShape::Tabulated(tab),
            normalized,
        })
    }

    pub fn shape(&self) -> &PulseShape {
        &self.shape
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn is_narrow_band(&self) -> bool {
        matches!(self.shape, PulseShape::NarrowBand { .. })
    }

    pub fn sigma(&self) -> Option<f64> {
        match self.shape {
            PulseShape::Gaussian { sigma, .. } => Some(sigma),
            _ => None,
        }
    }

    /// Carrier detuning; for tabulated spectra, the spectral centroid.
    pub fn detuning(&self) -> f64 {
        match &self.shape {
            PulseShape::Gaussian { detuning, .. } | PulseShape::NarrowBand { detuning } => *detuning,
            PulseShape::Tabulated(tab) => {
                let (mut num, mut den) = (0.0, 0.0);
                for (w, a) in tab.omega.windows(2).zip(tab.amplitude.windows(2)) {
                    let h = w[1] - w[0];
                    let (d0, d1) = (a[0].norm_sqr(), a[1].norm_sqr());
                    num += 0.5 * h * (d0 * w[0] + d1 * w[1]);
                    den += 0.5 * h * (d0 + d1);
                }
                num / den
            }
        }
    }

    /// Spectral amplitude `α̃_in(ω)` with `c = 1`; `None` for narrow-band
    /// pulses, whose spectrum is a delta function.
    pub fn spectral_amplitude(&self, w: f64) -> Option<Complex64> {
        match &self.shape {
            PulseShape::Gaussian { sigma, detuning } => {
                Some(Complex64::new(self::gaussian_density(*sigma, w - detuning).sqrt(), 0.0))
            }
            PulseShape::NarrowBand { .. } => None,
            PulseShape::Tabulated(tab) => Some(tab.amplitude_at(w)),
        }
    }

    /// Normalized spectral density `c|α̃_in(ω)|²`.
    pub fn spectral_density(&self, w: f64) -> Option<f64> {
        match &self.shape {
            PulseShape::Gaussian { sigma, detuning } => Some(gaussian_density(*sigma, w - detuning)),
            PulseShape::NarrowBand { .. } => None,
            PulseShape::Tabulated(tab) => Some(tab.amplitude_at(w).norm_sqr()),
        }
    }

    /// Input amplitude at the medium entrance, `α_in(t) = α→(0, t)`, with the
    /// intensity centroid at `t = 0`. Only Gaussian pulses have a closed form.
    pub fn time_amplitude(&self, t: f64) -> Option<Complex64> {
        match self.shape {
            PulseShape::Gaussian { sigma, detuning } => {
                let a = (2.0 * PI * sigma * sigma).powf(-0.25) * (-t * t / (4.0 * sigma * sigma)).exp();
                Some(Complex64::from_polar(a, detuning * t))
            }
            _ => None,
        }
    }

    /// Whether `α_in(t)` is symmetric in time, i.e. the spectrum has a single
    /// global phase. Centre-of-mass delay identities assume this.
    pub fn is_time_symmetric(&self) -> bool {
        match &self.shape {
            PulseShape::Gaussian { .. } | PulseShape::NarrowBand { .. } => true,
            PulseShape::Tabulated(tab) => {
                let peak = tab.amplitude.iter().map(|a| a.norm()).fold(0.0, f64::max);
                let Some(reference) = tab.amplitude.iter().find(|a| a.norm() > 1e-6 * peak) else {
                    return true;
                };
                let phase = reference / reference.norm();
                tab.amplitude
                    .iter()
                    .all(|a| (a * phase.conj()).im.abs() <= 1e-9 * peak)
            }
        }
    }
}

/// `√(2/π)·σ·exp(−2σ²ω²)`, the normalized intensity spectrum of a Gaussian
/// pulse with RMS intensity duration `σ`.
pub fn gaussian_density(sigma: f64, w: f64) -> f64 {
    (2.0 / PI).sqrt() * sigma * (-2.0 * sigma * sigma * w * w).exp()
}

/// Coupling profile `g(z)` of the medium.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    Uniform(f64),
    /// Piecewise-linear `g` through the samples; zero outside the table.
    Tabulated { z: Vec<f64>, g: Vec<f64> },
}

/// A one-dimensional two-level medium occupying `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumProfile {
    length: f64,
    coupling: Coupling,
    /// Cumulative `∫₀^{z_k} g²` at each tabulated sample.
    cumulative: Vec<f64>,
    od0: f64,
}

impl MediumProfile {
    /// Uniform medium with resonant optical depth `od0`:
    /// `g0 = √(od0·c·Γ/(4L))`.
    pub fn uniform(od0: f64, length: f64) -> Result<Self> {
        if !(od0 >= 0.0 && od0.is_finite()) {
            return Err(invalid(format!("optical depth must be non-negative, got {od0}")));
        }
        check_length(length)?;
        let g0 = (od0 / (4.0 * length)).sqrt();
        Ok(Self {
            length,
            coupling: Coupling::Uniform(g0),
            cumulative: Vec::new(),
            od0,
        })
    }

    pub fn uniform_coupling(g0: f64, length: f64) -> Result<Self> {
        if !(g0 >= 0.0 && g0.is_finite()) {
            return Err(invalid(format!("coupling must be non-negative, got {g0}")));
        }
        check_length(length)?;
        Ok(Self {
            length,
            coupling: Coupling::Uniform(g0),
            cumulative: Vec::new(),
            od0: 4.0 * g0 * g0 * length,
        })
    }

    /// Medium with `g` tabulated at increasing positions inside `[0, length]`.
    pub fn tabulated(length: f64, z: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        check_length(length)?;
        if z.len() < 2 || z.len() != g.len() {
            return Err(invalid("coupling table needs matching z and g samples, at least two"));
        }
        if z.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("coupling sample positions must be strictly increasing"));
        }
        if z[0] < 0.0 || z[z.len() - 1] > length {
            return Err(invalid("coupling samples must lie inside [0, L]"));
        }
        if g.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid("coupling samples must be finite and non-negative"));
        }
        let mut cumulative = Vec::with_capacity(z.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for k in 0..z.len() - 1 {
            let h = z[k + 1] - z[k];
            acc += h * (g[k] * g[k] + g[k] * g[k + 1] + g[k + 1] * g[k + 1]) / 3.0;
            cumulative.push(acc);
        }
        Ok(Self {
            length,
            od0: 4.0 * acc,
            coupling: Coupling::Tabulated { z, g },
            cumulative,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn od0(&self) -> f64 {
        self.od0
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    /// `g(z)`, zero outside `[0, L]`.
    pub fn g(&self, z: f64) -> f64 {
        if !(0.0..=self.length).contains(&z) {
            return 0.0;
        }
        match &self.coupling {
            Coupling::Uniform(g0) => *g0,
            Coupling::Tabulated { z: zs, g } => {
                let n = zs.len();
                if z < zs[0] || z > zs[n - 1] {
                    return 0.0;
                }
                let k = zs.partition_point(|&x| x <= z).clamp(1, n - 1) - 1;
                let s = (z - zs[k]) / (zs[k + 1] - zs[k]);
                g[k] * (1.0 - s) + g[k + 1] * s
            }
        }
    }

    /// Resonant optical depth of the slab `[0, z]`: `(4/cΓ)∫₀ᶻ g²`.
    pub fn od_integral(&self, z: f64) -> Result<f64> {
        if !(0.0..=self.length).contains(&z) {
            return Err(Error::Domain {
                what: "z",
                value: z,
                lo: 0.0,
                hi: self.length,
            });
        }
        Ok(match &self.coupling {
            Coupling::Uniform(_) => self.od0 * (z / self.length),
            Coupling::Tabulated { z: zs, g } => {
                let n = zs.len();
                if z <= zs[0] {
                    0.0
                } else if z >= zs[n - 1] {
                    self.od0
                } else {
                    let k = zs.partition_point(|&x| x <= z) - 1;
                    let h = z - zs[k];
                    let ga = g[k];
                    let gb = self.g(z);
                    4.0 * (self.cumulative[k] + h * (ga * ga + ga * gb + gb * gb) / 3.0)
                }
            }
        })
    }
}

fn check_length(length: f64) -> Result<()> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(invalid(format!("medium length must be positive, got {length}")));
    }
    Ok(())
}

pub fn make_gaussian_pulse(sigma: f64, detuning: f64) -> Result<PulseSpec> {
    PulseSpec::gaussian(sigma, detuning)
}

pub fn make_uniform_medium(od0: f64, length: f64) -> Result<MediumProfile> {
    MediumProfile::uniform(od0, length)
}

pub fn od_integral(medium: &MediumProfile, z: f64) -> Result<f64> {
    medium.od_integral(z)
}

/// Strength `ε` of the dispersive probe coupling, in radians per unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakProbeConfig {
    epsilon: f64,
}

impl WeakProbeConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid(format!("probe coupling must be positive, got {epsilon}")));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Default for WeakProbeConfig {
    fn default() -> Self {
        Self { epsilon: 1.0 }
    }
}

/// Which engine produced a [`DelayReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Analytic,
    TimeDomain,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::TimeDomain => "timedomain",
        })
    }
}

/// Probabilities, excitation times and delays for one pulse/medium pair.
///
/// Times are in units of `1/Γ` unless converted with
/// [`DelayReport::to_physical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayReport {
    pub p_t: f64,
    pub p_s: f64,
    /// Excitation time of the average photon.
    pub tau_0: f64,
    /// Excitation time post-selected on transmission.
    pub tau_t: f64,
    /// Excitation time post-selected on scattering; `NaN` when nothing scatters.
    pub tau_s: f64,
    /// Narrow-band group delay.
    pub t_g: Option<f64>,
    /// Narrow-band Wigner delay.
    pub t_w: Option<f64>,
    /// Delay of the scattered pulse.
    pub t_s: Option<f64>,
    pub od_eff: f64,
    pub method: Method,
}

impl DelayReport {
    /// Rescales all times from natural units to physical units of `1/Γ`.
    pub fn to_physical(&self, atom: &AtomParams) -> Self {
        let s = atom.gamma().recip();
        Self {
            tau_0: self.tau_0 * s,
            tau_t: self.tau_t * s,
            tau_s: self.tau_s * s,
            t_g: self.t_g.map(|v| v * s),
            t_w: self.t_w.map(|v| v * s),
            t_s: self.t_s.map(|v| v * s),
            ..*self
        }
    }
}
