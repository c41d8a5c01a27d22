//! Brute-force scattered-photon excitation time.
//!
//! Every detection event "excitation found at cell `Z` at time `T`" is
//! retrodicted separately: a backward run starts from an excitation
//! localized in that cell (height `1/Δz`), and the weak value of the
//! excitation projector accumulated up to `T` is weighted by the detection
//! probability `Γ|β→(Z,T)|²`. The cost is one backward run per detection
//! cell, quartic in the grid resolution.

use num_complex::Complex64;
use rayon::prelude::*;

use super::evolve::{backward_props, step_back};
use super::{Evolution, FieldHistory};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Largest number of cell updates allowed, summed over all backward runs.
    pub budget: u128,
    /// Detection cells with `|β→|²` below this fraction of the peak are
    /// skipped.
    pub prune: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            budget: 10_000_000_000,
            prune: 1e-12,
        }
    }
}

/// Scattered-photon excitation time averaged over detection time and
/// position.
pub fn tau_s_oracle(forward: &FieldHistory, config: &OracleConfig) -> Result<f64> {
    if forward.evolution != Evolution::Forward {
        return Err(invalid("the scattering oracle needs a forward history"));
    }
    let p_s = 1.0 - forward.p_t;
    if !(p_s > 0.0) {
        return Err(Error::Undefined("scattering probability is zero".into()));
    }
    let grid = &forward.grid;
    let m = grid.cells();
    let h = grid.step();
    let steps = forward.steps();

    let peak = forward.beta.iter().map(|b| b.norm_sqr()).fold(0.0, f64::max);
    let threshold = config.prune * peak;
    let Some(first) = (0..=steps).find(|&n| forward.beta_slice(n).iter().any(|b| b.norm_sqr() > 0.0)) else {
        return Err(Error::Undefined("no excitation in the forward history".into()));
    };

    // Backward runs from cell j only touch cells 0..=j.
    let detections: Vec<(usize, usize)> = (first..=steps)
        .flat_map(|n| (0..m).map(move |j| (n, j)))
        .filter(|&(n, j)| forward.beta_slice(n)[j].norm_sqr() > threshold)
        .collect();
    let required: u128 = detections
        .iter()
        .map(|&(n, j)| ((n - first) as u128 + 1) * (j as u128 + 1))
        .sum();
    if required > config.budget {
        return Err(Error::OracleBudget {
            required,
            budget: config.budget,
        });
    }
    log::info!(
        "scattering oracle: {} detection cells, {required} cell updates",
        detections.len()
    );

    let props = backward_props(grid);
    let zero = Complex64::default();
    let contributions: Vec<f64> = detections
        .par_iter()
        .map(|&(n, j)| {
            let width = j + 1;
            let mut alpha = vec![zero; width];
            let mut beta = vec![zero; width];
            beta[j] = Complex64::new(1.0 / h, 0.0);
            let target = forward.beta_slice(n)[j];
            // ∫_{-∞}^{T} dt ∫dz β→ β←*, trapezoid with half weight at T.
            let mut acc = 0.5 * h * target;
            for k in (first..n).rev() {
                step_back(&props[..width], &mut alpha, &mut beta, zero);
                let overlap: Complex64 = forward.beta_slice(k)[..width]
                    .iter()
                    .zip(&beta)
                    .map(|(f, b)| f * b.conj())
                    .sum();
                acc += overlap * h * h;
            }
            (target.conj() * acc * h).re
        })
        .collect();

    let total: f64 = contributions.iter().sum();
    Ok(total * h / p_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_gaussian_pulse, make_uniform_medium};
    use crate::spectral;
    use crate::timedomain::{integrate_forward, GridSpec};

    #[test]
    fn budget_is_enforced() {
        let p = make_gaussian_pulse(1.0, 0.0).unwrap();
        let m = make_uniform_medium(1.0, 1.0).unwrap();
        let g = GridSpec::coarse(&p, &m, 50).unwrap();
        let f = integrate_forward(&p, &m, &g).unwrap();
        let cfg = OracleConfig {
            budget: 1000,
            ..Default::default()
        };
        assert!(matches!(tau_s_oracle(&f, &cfg), Err(Error::OracleBudget { .. })));
    }

    #[test]
    fn empty_medium_is_undefined() {
        let p = make_gaussian_pulse(1.0, 0.0).unwrap();
        let m = make_uniform_medium(0.0, 1.0).unwrap();
        let g = GridSpec::coarse(&p, &m, 50).unwrap();
        let f = integrate_forward(&p, &m, &g).unwrap();
        assert!(matches!(tau_s_oracle(&f, &OracleConfig::default()), Err(Error::Undefined(_))));
    }

    #[test]
    fn long_pulse_low_depth_exceeds_lifetime() {
        // Narrow-band-like pulse at low depth: the scattered time sits near
        // the Wigner delay, well above one lifetime.
        let p = make_gaussian_pulse(3.0, 0.0).unwrap();
        let m = make_uniform_medium(0.05, 3.0).unwrap();
        let g = GridSpec::coarse(&p, &m, 50).unwrap();
        let f = integrate_forward(&p, &m, &g).unwrap();
        let t = tau_s_oracle(&f, &OracleConfig::default()).unwrap();
        let s = spectral::tau_s(&p, &m).unwrap();
        assert!(t > 1.5, "{t}");
        assert!((t / s - 1.0).abs() < 0.05, "{t} vs {s}");
    }
}
