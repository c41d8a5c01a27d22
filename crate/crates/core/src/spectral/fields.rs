use num_complex::Complex64;

use super::{lorentzian, medium_response};
use crate::domain::{MediumProfile, PulseSpec};
use crate::error::{invalid, Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Photon and excitation amplitudes `α̃(z, ω)`, `β̃(z, ω)` sampled on a
/// `(z, ω)` grid, stored row-major with `z` as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFields {
    pub direction: Direction,
    pub z: Vec<f64>,
    pub omega: Vec<f64>,
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    /// Couplings `g(z)` and total optical depths `OD(L, ω)` kept for the
    /// backward construction.
    g: Vec<f64>,
    od_total: Vec<f64>,
    od_partial: Vec<f64>,
}

impl SpectralFields {
    pub fn index(&self, iz: usize, iw: usize) -> usize {
        iz * self.omega.len() + iw
    }

    pub fn alpha_at(&self, iz: usize, iw: usize) -> Complex64 {
        self.alpha[self.index(iz, iw)]
    }

    pub fn beta_at(&self, iz: usize, iw: usize) -> Complex64 {
        self.beta[self.index(iz, iw)]
    }
}

/// Forward solution: `α̃→ = α̃_in·e^{−iφ − OD/2 − izω}` and
/// `β̃→ = ig/(iω + 1/2)·α̃→`.
pub fn forward_fields(
    pulse: &PulseSpec,
    medium: &MediumProfile,
    z: &[f64],
    omega: &[f64],
) -> Result<SpectralFields> {
    if pulse.is_narrow_band() {
        return Err(Error::Unsupported(
            "narrow-band pulses have delta spectra; use the closed-form delays".into(),
        ));
    }
    let nw = omega.len();
    let mut alpha = Vec::with_capacity(z.len() * nw);
    let mut beta = Vec::with_capacity(z.len() * nw);
    let mut od_partial = Vec::with_capacity(z.len() * nw);
    let g: Vec<f64> = z.iter().map(|&zz| medium.g(zz)).collect();
    for (&zz, &gz) in z.iter().zip(&g) {
        for &w in omega {
            let (od, phase) = medium_response(medium, zz, w)?;
            let a_in = pulse.spectral_amplitude(w).unwrap_or_default();
            let a = a_in * Complex64::from_polar((-0.5 * od).exp(), -phase - zz * w);
            alpha.push(a);
            beta.push(I * gz / Complex64::new(0.5, w) * a);
            od_partial.push(od);
        }
    }
    let od_total = omega.iter().map(|&w| medium.od0() * lorentzian(w)).collect();
    Ok(SpectralFields {
        direction: Direction::Forward,
        z: z.to_vec(),
        omega: omega.to_vec(),
        alpha,
        beta,
        g,
        od_total,
        od_partial,
    })
}

/// Backward solution post-selected on transmission:
/// `α̃← = α̃→/√P_T·e^{OD(z,ω) − OD(L,ω)}` and `β̃← = ig/(iω − 1/2)·α̃←`.
pub fn backward_fields(forward: &SpectralFields, p_t: f64) -> Result<SpectralFields> {
    if !(p_t > 0.0 && p_t <= 1.0) {
        return Err(invalid(format!("transmission probability must lie in (0, 1], got {p_t}")));
    }
    if forward.direction != Direction::Forward {
        return Err(invalid("backward fields are built from forward fields"));
    }
    let nw = forward.omega.len();
    let scale = p_t.sqrt().recip();
    let mut alpha = Vec::with_capacity(forward.alpha.len());
    let mut beta = Vec::with_capacity(forward.alpha.len());
    for (iz, &gz) in forward.g.iter().enumerate() {
        for (iw, &w) in forward.omega.iter().enumerate() {
            let k = iz * nw + iw;
            let a = forward.alpha[k] * (scale * (forward.od_partial[k] - forward.od_total[iw]).exp());
            alpha.push(a);
            beta.push(I * gz / Complex64::new(-0.5, w) * a);
        }
    }
    Ok(SpectralFields {
        direction: Direction::Backward,
        alpha,
        beta,
        ..forward.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_gaussian_pulse, make_uniform_medium};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid() -> (Vec<f64>, Vec<f64>) {
        let z = (0..=10).map(|k| k as f64 * 0.1).collect();
        let w = (-20..=20).map(|k| k as f64 * 0.1).collect();
        (z, w)
    }

    #[test]
    fn free_propagation() {
        let p = make_gaussian_pulse(1.0, 0.3).unwrap();
        let m = make_uniform_medium(0.0, 1.0).unwrap();
        let (z, w) = grid();
        let f = forward_fields(&p, &m, &z, &w).unwrap();
        for (iz, &zz) in z.iter().enumerate() {
            for (iw, &ww) in w.iter().enumerate() {
                let expect = p.spectral_amplitude(ww).unwrap() * Complex64::from_polar(1.0, -zz * ww);
                assert!((f.alpha_at(iz, iw) - expect).norm() < 1e-15);
                assert_eq!(f.beta_at(iz, iw), Complex64::default());
            }
        }
        let b = backward_fields(&f, 1.0).unwrap();
        assert_eq!(b.alpha, f.alpha);
    }

    #[test]
    fn resonant_attenuation() {
        let p = make_gaussian_pulse(1.0, 0.0).unwrap();
        let m = make_uniform_medium(4.0, 1.0).unwrap();
        let f = forward_fields(&p, &m, &[0.0, 1.0], &[0.0]).unwrap();
        let a_in = p.spectral_amplitude(0.0).unwrap();
        assert_eq!(f.alpha_at(0, 0), a_in);
        assert_relative_eq!(f.alpha_at(1, 0).norm() / a_in.norm(), (-2f64).exp(), max_relative = 1e-14);
        let p_t = 0.3;
        let b = backward_fields(&f, p_t).unwrap();
        assert_relative_eq!(
            b.alpha_at(1, 0).norm(),
            f.alpha_at(1, 0).norm() / p_t.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            b.alpha_at(0, 0).norm() / a_in.norm(),
            (-4f64).exp() / p_t.sqrt(),
            max_relative = 1e-14
        );
        assert!(backward_fields(&f, 0.0).is_err());
    }

    #[test]
    fn narrow_band_unsupported() {
        let m = make_uniform_medium(1.0, 1.0).unwrap();
        let r = forward_fields(&PulseSpec::narrow_band(0.0), &m, &[0.0], &[0.0]);
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    proptest! {
        #[test]
        fn field_ratios(od0 in 0.1f64..10.0, zi in 0usize..=10, wi in 0usize..41) {
            let p = make_gaussian_pulse(0.7, 0.2).unwrap();
            let m = make_uniform_medium(od0, 1.0).unwrap();
            let (z, w) = grid();
            let f = forward_fields(&p, &m, &z, &w).unwrap();
            let b = backward_fields(&f, 0.5).unwrap();
            let g = m.g(z[zi]);
            let om = w[wi];
            let a = f.alpha_at(zi, wi);
            let fr = f.beta_at(zi, wi) - I * g / Complex64::new(0.5, om) * a;
            prop_assert!(fr.norm() <= 1e-14 * a.norm().max(1e-300) * (1.0 + g));
            let modulus = p.spectral_amplitude(om).unwrap().norm() * (-0.5 * m.od_integral(z[zi]).unwrap() * lorentzian(om)).exp();
            prop_assert!((a.norm() - modulus).abs() <= 1e-13 * modulus.max(1e-300));
            let ab = b.alpha_at(zi, wi);
            let br = b.beta_at(zi, wi) - I * g / Complex64::new(-0.5, om) * ab;
            prop_assert!(br.norm() <= 1e-14 * ab.norm().max(1e-300) * (1.0 + g));
        }
    }
}
