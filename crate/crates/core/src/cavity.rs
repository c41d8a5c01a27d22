//! Two-mirror cavity analogue of the atomic medium.
//!
//! Mirror 1 couples the input into the cavity mode at intensity rate `γ₁`;
//! mirror 2 leaks it out the far side at rate `γ₂`. Reflection plays the role
//! of transmission through the atoms, the intracavity photon plays the role
//! of the atomic excitation, and transmission through the cavity plays the
//! role of scattering.

use num_complex::Complex64;

use crate::domain::{PulseShape, PulseSpec};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_spectrum, QuadratureConfig};

/// Mirror amplitude coefficients: `r_j` real and positive, `t_j = i|t_j|`,
/// `r_j² + |t_j|² = 1`.
///
/// The complements `1 − r_j` are stored alongside `r_j` so that nearly
/// lossless mirrors keep full relative precision in their leak rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mirrors {
    r1: f64,
    r2: f64,
    d1: f64,
    d2: f64,
    tau_rt: f64,
}

impl Mirrors {
    pub fn new(r1: f64, r2: f64, tau_rt: f64) -> Result<Self> {
        Self::with_complements(r1, 1.0 - r1, r2, 1.0 - r2, tau_rt)
    }

    fn with_complements(r1: f64, d1: f64, r2: f64, d2: f64, tau_rt: f64) -> Result<Self> {
        for (name, r) in [("r1", r1), ("r2", r2)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(invalid(format!("mirror reflectivity {name} must lie in [0, 1], got {r}")));
            }
        }
        if !(tau_rt > 0.0 && tau_rt.is_finite()) {
            return Err(invalid(format!("round-trip time must be positive, got {tau_rt}")));
        }
        Ok(Self { r1, r2, d1, d2, tau_rt })
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    /// Round-trip time of the cavity.
    pub fn tau_rt(&self) -> f64 {
        self.tau_rt
    }

    /// `|t₁|² = 1 − r₁²`.
    pub fn t1_sqr(&self) -> f64 {
        self.d1 * (2.0 - self.d1)
    }

    /// `|t₂|² = 1 − r₂²`.
    pub fn t2_sqr(&self) -> f64 {
        self.d2 * (2.0 - self.d2)
    }

    /// `r₁ − r₂`.
    fn gap(&self) -> f64 {
        self.d2 - self.d1
    }

    /// `1 − r₁r₂`.
    fn loss(&self) -> f64 {
        self.d1 + self.d2 - self.d1 * self.d2
    }

    /// Reflection probability summed over all paths, `((r₁−r₂)/(1−r₁r₂))²`.
    pub fn reflection_probability(&self) -> Result<f64> {
        self.round_trip_gain()?;
        Ok((self.gap() / self.loss()).powi(2))
    }

    /// Transmission probability summed over all paths, `(|t₁||t₂|/(1−r₁r₂))²`.
    pub fn transmission_probability(&self) -> Result<f64> {
        self.round_trip_gain()?;
        Ok(self.t1_sqr() * self.t2_sqr() / self.loss().powi(2))
    }

    fn round_trip_gain(&self) -> Result<f64> {
        let q = self.r1 * self.r2;
        if q >= 1.0 {
            return Err(Error::Numeric(format!("path series diverges: r1·r2 = {q} >= 1")));
        }
        Ok(q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    gamma1: f64,
    gamma2: f64,
    mirrors: Option<Mirrors>,
}

impl CavityParams {
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self> {
        for (name, g) in [("gamma1", gamma1), ("gamma2", gamma2)] {
            if !(g > 0.0 && g.is_finite()) {
                return Err(invalid(format!("mirror decay rate {name} must be positive, got {g}")));
            }
        }
        Ok(Self {
            gamma1,
            gamma2,
            mirrors: None,
        })
    }

    /// Rates implied by mirror coefficients.
    pub fn from_mirrors(mirrors: Mirrors) -> Result<Self> {
        let (gamma1, gamma2) = rates_from_mirrors(&mirrors)?;
        let mut p = Self::new(gamma1, gamma2)?;
        p.mirrors = Some(mirrors);
        Ok(p)
    }

    /// Attaches mirror coefficients consistent with the rates for a cavity
    /// of round-trip time `tau_rt`.
    pub fn with_round_trip(self, tau_rt: f64) -> Result<Self> {
        let mirrors = mirror_map(self.gamma1, self.gamma2, tau_rt)?;
        Ok(Self {
            mirrors: Some(mirrors),
            ..self
        })
    }

    /// `0.01/γ₂`, short enough for the small-cavity limit.
    pub fn default_round_trip(&self) -> f64 {
        0.01 / self.gamma2
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn mirrors(&self) -> Option<Mirrors> {
        self.mirrors
    }

    fn total(&self) -> f64 {
        self.gamma1 + self.gamma2
    }

    /// Resonant reflection probability `((γ₁−γ₂)/(γ₁+γ₂))²`.
    pub fn resonant_reflection(&self) -> f64 {
        ((self.gamma1 - self.gamma2) / self.total()).powi(2)
    }

    /// Resonant cavity optical depth `η₀ᶜ = −ln P_ref`, symmetric in the two
    /// rates. Infinite when they are equal.
    pub fn optical_depth(&self) -> f64 {
        let (lo, hi) = if self.gamma1 < self.gamma2 {
            (self.gamma1, self.gamma2)
        } else {
            (self.gamma2, self.gamma1)
        };
        if lo == hi {
            return f64::INFINITY;
        }
        2.0 * (2.0 * lo / (hi - lo)).ln_1p()
    }
}

/// Cavity, reflected and transmitted amplitudes per unit input amplitude at
/// detuning `omega` from the cavity resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityFields {
    pub beta: Complex64,
    pub alpha_ref: Complex64,
    pub alpha_tr: Complex64,
}

pub fn steady_fields(params: &CavityParams, omega: f64) -> CavityFields {
    let (g1, g2) = (params.gamma1, params.gamma2);
    let den = Complex64::new(g1 + g2, 2.0 * omega);
    CavityFields {
        beta: -2.0 * g1.sqrt() / den,
        alpha_ref: Complex64::new(g2 - g1, 2.0 * omega) / den,
        alpha_tr: -2.0 * (g1 * g2).sqrt() / den,
    }
}

/// Per-frequency integrands: reflection density, transmission density,
/// `|β̃|²` and the dwell numerator `4γ₁ Re[(γ₁−γ₂+2iω)/(γ₁+γ₂+2iω)]/((γ₁+γ₂)²+4ω²)`.
fn kernels(params: &CavityParams, w: f64) -> [f64; 4] {
    let (g1, g2) = (params.gamma1, params.gamma2);
    let s2 = (g1 + g2).powi(2) + 4.0 * w * w;
    let d2 = (g1 - g2).powi(2) + 4.0 * w * w;
    let cavity = 4.0 * g1 / s2;
    [d2 / s2, g2 * cavity, cavity, cavity * ((g1 * g1 - g2 * g2) + 4.0 * w * w) / s2]
}

fn spectral_averages(params: &CavityParams, pulse: &PulseSpec) -> Result<[f64; 4]> {
    if !pulse.is_normalized() {
        return Err(invalid("cavity averages need a normalized spectrum"));
    }
    match pulse.shape() {
        PulseShape::NarrowBand { detuning } => Ok(kernels(params, *detuning)),
        _ => integrate_spectrum(pulse, &QuadratureConfig::default(), |w, s| kernels(params, w).map(|k| k * s)),
    }
}

/// Reflection probability `P_ref` for the given input spectrum.
pub fn reflection_probability(params: &CavityParams, pulse: &PulseSpec) -> Result<f64> {
    Ok(spectral_averages(params, pulse)?[0])
}

/// Transmission probability `P_tr`, integrated directly.
pub fn transmission_probability(params: &CavityParams, pulse: &PulseSpec) -> Result<f64> {
    Ok(spectral_averages(params, pulse)?[1])
}

/// Reflection-post-selected cavity dwell time as a ratio of frequency
/// integrals. Accepts either ordering of the rates.
pub fn tau_b_direct(params: &CavityParams, pulse: &PulseSpec) -> Result<f64> {
    let [p_ref, _, _, num] = spectral_averages(params, pulse)?;
    if !(p_ref > 0.0) {
        return Err(Error::Undefined(
            "reflection probability is zero (impedance-matched cavity on resonance)".into(),
        ));
    }
    Ok(num / p_ref)
}

/// Unconditioned cavity dwell time `∫|β(t)|²dt`.
pub fn dwell_avg(params: &CavityParams, pulse: &PulseSpec) -> Result<f64> {
    Ok(spectral_averages(params, pulse)?[2])
}

/// Resonant narrow-band dwell time in terms of the cavity optical depth,
/// `−2 sinh(η₀ᶜ/2)/γ₂`. Requires `γ₁ < γ₂`, the branch analogous to a
/// weakly coupled atomic medium.
pub fn tau_b_closed(params: &CavityParams) -> Result<f64> {
    if params.gamma1 >= params.gamma2 {
        return Err(invalid(format!(
            "the atomic-analogy branch needs gamma1 < gamma2, got {} >= {}",
            params.gamma1, params.gamma2
        )));
    }
    Ok(-2.0 * (0.5 * params.optical_depth()).sinh() / params.gamma2)
}

/// Resonant narrow-band dwell time from the mirror coefficients,
/// `−(τ_rt/4)|t₁|²(1+r₂)²/((r₁−r₂)(1−r₁r₂))`.
pub fn tau_b_mirrors(mirrors: &Mirrors) -> Result<f64> {
    mirrors.round_trip_gain()?;
    let gap = mirrors.gap();
    if gap == 0.0 {
        return Err(Error::Undefined("equal mirrors reflect nothing on resonance".into()));
    }
    Ok(-0.25 * mirrors.tau_rt * mirrors.t1_sqr() * (1.0 + mirrors.r2).powi(2) / (gap * mirrors.loss()))
}

/// Pointer shift summed over reflection paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeynmanSeries {
    /// First `n_terms` round-trip paths, normalized by the net reflection
    /// amplitude.
    pub series: f64,
    /// Infinite sum, `−τ_rt r₂|t₁|²/((1−r₁r₂)(r₁−r₂))`.
    pub closed: f64,
}

/// Path `n` (n round trips) carries amplitude `−|t₁|²r₂(r₁r₂)^{n−1}` and shifts
/// the pointer by `n` round trips; the direct reflection shifts it by none.
/// To first order the shifted superposition is the unshifted pointer moved by
/// the amplitude-weighted mean of the shifts.
pub fn feynman_tau_b(mirrors: &Mirrors, n_terms: usize) -> Result<FeynmanSeries> {
    if n_terms == 0 {
        return Err(invalid("the path series needs at least one term"));
    }
    let q = mirrors.round_trip_gain()?;
    if mirrors.r2 >= mirrors.r1 {
        return Err(invalid(format!(
            "the path series needs r2 < r1, got r1 = {}, r2 = {}",
            mirrors.r1, mirrors.r2
        )));
    }
    let net = mirrors.gap() / mirrors.loss();
    let weight = mirrors.tau_rt * mirrors.t1_sqr() * mirrors.r2;
    let mut moment = 0.0;
    let mut power = 1.0;
    for n in 1..=n_terms {
        moment += n as f64 * power;
        power *= q;
    }
    Ok(FeynmanSeries {
        series: -weight * moment / net,
        closed: -weight / (mirrors.loss() * mirrors.gap()),
    })
}

/// Mirror coefficients of a cavity with the given rates, `r = (1−γτ/4)/(1+γτ/4)`.
pub fn mirror_map(gamma1: f64, gamma2: f64, tau_rt: f64) -> Result<Mirrors> {
    if !(tau_rt > 0.0 && tau_rt.is_finite()) {
        return Err(invalid(format!("round-trip time must be positive, got {tau_rt}")));
    }
    let r = |g: f64| -> Result<(f64, f64)> {
        let x = g * tau_rt / 4.0;
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Domain {
                what: "gamma·tau_rt",
                value: g * tau_rt,
                lo: 0.0,
                hi: 4.0,
            });
        }
        Ok(((1.0 - x) / (1.0 + x), 2.0 * x / (1.0 + x)))
    };
    let ((r1, d1), (r2, d2)) = (r(gamma1)?, r(gamma2)?);
    Mirrors::with_complements(r1, d1, r2, d2, tau_rt)
}

/// Rates of a cavity with the given mirrors, `γ = (4/τ_rt)(1−r)/(1+r)`.
pub fn rates_from_mirrors(mirrors: &Mirrors) -> Result<(f64, f64)> {
    let g = |d: f64| 4.0 / mirrors.tau_rt * d / (2.0 - d);
    for r in [mirrors.r1, mirrors.r2] {
        if !(r > 0.0) {
            return Err(Error::Domain {
                what: "mirror reflectivity",
                value: r,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    Ok((g(mirrors.d1), g(mirrors.d2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cav(g1: f64, g2: f64) -> CavityParams {
        CavityParams::new(g1, g2).unwrap()
    }

    #[test]
    fn impedance_matched_cavity_reflects_nothing() {
        let f = steady_fields(&cav(0.7, 0.7), 0.0);
        assert_eq!(f.alpha_ref, Complex64::new(0.0, 0.0));
        let err = tau_b_direct(&cav(0.7, 0.7), &PulseSpec::narrow_band(0.0));
        assert!(matches!(err, Err(Error::Undefined(_))));
    }

    #[test]
    fn resonant_reflection_density() {
        let f = steady_fields(&cav(1.0, 3.0), 0.0);
        assert_relative_eq!(f.alpha_ref.norm_sqr(), 0.25, max_relative = 1e-15);
        assert_relative_eq!(cav(1.0, 3.0).resonant_reflection(), 0.25, max_relative = 1e-15);
    }

    #[test]
    fn narrow_band_landmarks() {
        let p = cav(1.0, 3.0);
        let nb = PulseSpec::narrow_band(0.0);
        assert_relative_eq!(tau_b_direct(&p, &nb).unwrap(), -0.5, max_relative = 1e-14);
        assert_relative_eq!(tau_b_closed(&p).unwrap(), -0.5, max_relative = 1e-14);
        assert_relative_eq!(p.optical_depth(), 4f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(dwell_avg(&p, &nb).unwrap(), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn weak_coupling_matches_optical_depth() {
        let p = cav(0.01, 1.0);
        let t = tau_b_direct(&p, &PulseSpec::narrow_band(0.0)).unwrap();
        assert!((t + 0.04).abs() < 1e-3, "{t}");
        let eta = p.optical_depth();
        assert!(((t + eta) / eta).abs() < 0.02);
    }

    #[test]
    fn closed_form_branch_enforced() {
        assert!(matches!(tau_b_closed(&cav(3.0, 1.0)), Err(Error::InvalidParameter(_))));
        assert!(matches!(tau_b_closed(&cav(1.0, 1.0)), Err(Error::InvalidParameter(_))));
        // The direct ratio accepts either ordering.
        assert!(tau_b_direct(&cav(3.0, 1.0), &PulseSpec::narrow_band(0.0)).is_ok());
    }

    #[test]
    fn broadband_decoupled_cavity_has_no_dwell() {
        let pulse = PulseSpec::gaussian(0.3, 0.2).unwrap();
        let t = tau_b_direct(&cav(1e-9, 1.0), &pulse).unwrap();
        assert!(t.abs() < 1e-8);
        assert!(dwell_avg(&cav(1e-9, 1.0), &pulse).unwrap() < 1e-8);
    }

    /// Fourth-order Runge-Kutta on `β̇ = −γ̄β − √γ₁α_in` together with the
    /// retrodicted accumulator `Ġ = β − γ̄G`. Returns `(∫|β|², ∫|α_ref|²,
    /// Re∫α_ref*·√γ₁G)`.
    fn time_domain(params: &CavityParams, pulse: &PulseSpec, t0: f64, t1: f64, dt: f64) -> (f64, f64, f64) {
        let (g1, gbar) = (params.gamma1(), 0.5 * (params.gamma1() + params.gamma2()));
        let input = |t: f64| pulse.time_amplitude(t).unwrap();
        let rhs = |t: f64, y: [Complex64; 2]| [-gbar * y[0] - g1.sqrt() * input(t), y[0] - gbar * y[1]];
        let mut y = [Complex64::default(); 2];
        let n = ((t1 - t0) / dt).round() as usize;
        let (mut dwell, mut p_ref, mut num) = (0.0, 0.0, 0.0);
        for k in 0..=n {
            let t = t0 + k as f64 * dt;
            let w = if k == 0 || k == n { 0.5 * dt } else { dt };
            let a_ref = input(t) + g1.sqrt() * y[0];
            dwell += w * y[0].norm_sqr();
            p_ref += w * a_ref.norm_sqr();
            num += w * (a_ref.conj() * g1.sqrt() * y[1]).re;
            let add = |a: [Complex64; 2], b: [Complex64; 2], s: f64| [a[0] + b[0] * s, a[1] + b[1] * s];
            let k1 = rhs(t, y);
            let k2 = rhs(t + 0.5 * dt, add(y, k1, 0.5 * dt));
            let k3 = rhs(t + 0.5 * dt, add(y, k2, 0.5 * dt));
            let k4 = rhs(t + dt, add(y, k3, dt));
            for i in 0..2 {
                y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
            }
        }
        (dwell, p_ref, num)
    }

    #[test]
    fn spectral_forms_match_time_integration() {
        for (g1, g2, sigma, det) in [(1.0, 3.0, 1.0, 0.0), (0.4, 1.5, 0.5, 0.7), (2.0, 0.5, 2.0, -0.3)] {
            let p = cav(g1, g2);
            let pulse = PulseSpec::gaussian(sigma, det).unwrap();
            let (dwell, p_ref, num) = time_domain(&p, &pulse, -12.0 * sigma, 12.0 * sigma + 40.0 / (g1 + g2), 1e-3);
            assert_relative_eq!(dwell_avg(&p, &pulse).unwrap(), dwell, max_relative = 1e-9);
            assert_relative_eq!(reflection_probability(&p, &pulse).unwrap(), p_ref, max_relative = 1e-9);
            assert_relative_eq!(tau_b_direct(&p, &pulse).unwrap(), num / p_ref, max_relative = 1e-8);
        }
    }

    #[test]
    fn mirror_map_landmarks() {
        let m = mirror_map(0.01, 1.0, 0.01).unwrap();
        assert_relative_eq!(m.r2(), 0.9975 / 1.0025, max_relative = 1e-15);
        assert!((m.r2() - 0.99501).abs() < 1e-5);
        let lossless = mirror_map(0.0, 1.0, 0.01).unwrap();
        assert_eq!(lossless.r1(), 1.0);
        assert!(matches!(mirror_map(1.0, 400.0, 0.01), Err(Error::Domain { .. })));
    }

    #[test]
    fn feynman_series_converges_geometrically() {
        let m = mirror_map(0.01, 1.0, 0.01).unwrap();
        let q = m.r1() * m.r2();
        let gap = |n| {
            let s = feynman_tau_b(&m, n).unwrap();
            (s.series - s.closed).abs()
        };
        for n in [200, 800, 2000] {
            let ratio = gap(n + 1) / gap(n);
            // Successive tails shrink by q(1 + O(1/n)).
            assert!((ratio / q - 1.0).abs() < 2.0 / n as f64, "{n}: {ratio} vs {q}");
        }
        let s = feynman_tau_b(&m, 20_000).unwrap();
        assert_relative_eq!(s.series, s.closed, max_relative = 1e-12);
    }

    #[test]
    fn feynman_closed_form_matches_rate_form_in_small_cavity() {
        let p = cav(0.01, 1.0).with_round_trip(0.01).unwrap();
        let m = p.mirrors().unwrap();
        let s = feynman_tau_b(&m, 1).unwrap();
        let exact = tau_b_closed(&p).unwrap();
        assert!((s.closed / exact - 1.0).abs() < 0.02);
        assert_relative_eq!(tau_b_mirrors(&m).unwrap(), exact, max_relative = 1e-10);
    }

    #[test]
    fn feynman_preconditions() {
        let single = Mirrors::new(0.9, 0.0, 0.01).unwrap();
        let s = feynman_tau_b(&single, 5).unwrap();
        assert_eq!(s.series, 0.0);
        assert_eq!(s.closed, 0.0);
        assert!(matches!(
            feynman_tau_b(&Mirrors::new(1.0, 1.0, 0.01).unwrap(), 3),
            Err(Error::Numeric(_))
        ));
        assert!(feynman_tau_b(&Mirrors::new(0.5, 0.8, 0.01).unwrap(), 3).is_err());
        assert!(feynman_tau_b(&single, 0).is_err());
    }

    #[test]
    fn invalid_rates_rejected() {
        assert!(CavityParams::new(0.0, 1.0).is_err());
        assert!(CavityParams::new(1.0, f64::NAN).is_err());
        assert!(Mirrors::new(1.2, 0.5, 0.01).is_err());
    }

    #[test]
    fn sign_structure() {
        let p = cav(0.05, 1.0);
        let nb = PulseSpec::narrow_band(0.0);
        assert!(tau_b_direct(&p, &nb).unwrap() < 0.0);
        assert!(dwell_avg(&p, &nb).unwrap() > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn unitarity(g1 in 1e-3f64..10.0, g2 in 1e-3f64..10.0, w in -20.0f64..20.0) {
            let f = steady_fields(&cav(g1, g2), w);
            prop_assert!((f.alpha_ref.norm_sqr() + f.alpha_tr.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn rate_and_depth_forms_agree(g1 in 1e-3f64..10.0, frac in 0.001f64..0.999) {
            let p = cav(g1 * frac, g1);
            let direct = tau_b_direct(&p, &PulseSpec::narrow_band(0.0)).unwrap();
            let closed = tau_b_closed(&p).unwrap();
            prop_assert!((direct / closed - 1.0).abs() < 1e-12);
        }

        #[test]
        fn mirror_round_trip(g1 in 1e-3f64..10.0, g2 in 1e-3f64..10.0, tau in 1e-4f64..0.1) {
            let m = mirror_map(g1, g2, tau).unwrap();
            let (a, b) = rates_from_mirrors(&m).unwrap();
            prop_assert!((a / g1 - 1.0).abs() < 1e-12 && (b / g2 - 1.0).abs() < 1e-12);
            let p = cav(g1, g2);
            prop_assert!((m.reflection_probability().unwrap() - p.resonant_reflection()).abs() < 1e-10);
        }

        #[test]
        fn dwell_is_transmission_over_leak_rate(g1 in 1e-2f64..5.0, g2 in 1e-2f64..5.0, det in -2.0f64..2.0) {
            let p = cav(g1, g2);
            let pulse = PulseSpec::gaussian(1.0, det).unwrap();
            let dwell = dwell_avg(&p, &pulse).unwrap();
            let p_tr = 1.0 - reflection_probability(&p, &pulse).unwrap();
            prop_assert!((dwell - p_tr / g2).abs() < 1e-10 * dwell.max(1e-3));
        }
    }
}
