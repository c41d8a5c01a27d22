//! Vector-valued quadrature over frequency.
//!
//! Gaussian spectra are integrated with the composite trapezoid rule on a
//! uniform grid symmetric about the pulse detuning, doubling the node count
//! until every component settles. Tabulated spectra have kinks at their
//! samples, so their nodes are aligned with the table and the trapezoid
//! sequence is Richardson-extrapolated (Romberg).

use crate::domain::{PulseShape, PulseSpec};
use crate::error::{invalid, Error, Result};

/// Convergence controls for frequency integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Relative change between successive refinements accepted as converged,
    /// measured against the integral of the component's absolute value.
    pub rtol: f64,
    /// Initial number of intervals.
    pub n_min: usize,
    /// Largest number of intervals tried before giving up.
    pub n_max: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            n_min: 1024,
            n_max: 1 << 20,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.rtol.is_finite()) {
            return Err(invalid(format!("quadrature tolerance must be positive, got {}", self.rtol)));
        }
        if self.n_min < 2 || self.n_max < self.n_min {
            return Err(invalid(format!(
                "quadrature node limits must satisfy 2 <= n_min <= n_max, got {} and {}",
                self.n_min, self.n_max
            )));
        }
        Ok(())
    }
}

/// Uniform frequency grid `center ± half_width` with `n` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub center: f64,
    pub half_width: f64,
    pub n: usize,
}

impl FrequencyGrid {
    /// Grid for a Gaussian pulse: half-width `max(20, 8/σ)`, which leaves a
    /// truncated spectral mass below `erfc(8√2)`, far under 1e-10.
    pub fn for_gaussian(sigma: f64, detuning: f64, n: usize) -> Self {
        Self {
            center: detuning,
            half_width: f64::max(20.0, 8.0 / sigma),
            n: n + n % 2,
        }
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        self.center - self.half_width + k as f64 * self.step()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.node(k)).collect()
    }
}

/// Integrates `f` over the support of `pulse`'s spectrum. `f` receives the
/// frequency and the spectral density there.
pub fn integrate_spectrum<const K: usize>(
    pulse: &PulseSpec,
    cfg: &QuadratureConfig,
    f: impl Fn(f64, f64) -> [f64; K],
) -> Result<[f64; K]> {
    cfg.validate()?;
    match pulse.shape() {
        PulseShape::Gaussian { sigma, detuning } => {
            let grid = FrequencyGrid::for_gaussian(*sigma, *detuning, cfg.n_min);
            let density = |w: f64| crate::domain::gaussian_density(*sigma, w - detuning);
            trapezoid_doubling(grid, cfg, |w| f(w, density(w)))
        }
        PulseShape::Tabulated(tab) => {
            romberg_segments(tab.omega(), cfg, |w| f(w, tab.amplitude_at(w).norm_sqr()))
        }
        PulseShape::NarrowBand { .. } => Err(Error::Unsupported(
            "narrow-band spectra are delta functions and cannot be integrated numerically".into(),
        )),
    }
}

/// Same integrals on one fixed grid, without refinement.
pub fn integrate_spectrum_fixed<const K: usize>(
    pulse: &PulseSpec,
    n: usize,
    f: impl Fn(f64, f64) -> [f64; K],
) -> Result<[f64; K]> {
    if n < 2 {
        return Err(invalid("a fixed grid needs at least two intervals"));
    }
    match pulse.shape() {
        PulseShape::Gaussian { sigma, detuning } => {
            let grid = FrequencyGrid::for_gaussian(*sigma, *detuning, n);
            let density = |w: f64| crate::domain::gaussian_density(*sigma, w - detuning);
            let (sum, _) = trapezoid_sums(&grid, 0..=grid.n, 1, |w| f(w, density(w)));
            Ok(sum.map(|s| s * grid.step()))
        }
        PulseShape::Tabulated(tab) => {
            let per = n.div_ceil(tab.omega().len() - 1).max(1);
            let (t, _) = segment_trapezoid(tab.omega(), per, |w| f(w, tab.amplitude_at(w).norm_sqr()));
            Ok(t)
        }
        PulseShape::NarrowBand { .. } => Err(Error::Unsupported(
            "narrow-band spectra are delta functions and cannot be integrated numerically".into(),
        )),
    }
}

/// Sums `weight·f` over the node indices `range` taken with `stride`,
/// halving the weight of the two grid endpoints. Returns the signed and
/// absolute sums.
fn trapezoid_sums<const K: usize>(
    grid: &FrequencyGrid,
    range: std::ops::RangeInclusive<usize>,
    stride: usize,
    f: impl Fn(f64) -> [f64; K],
) -> ([f64; K], [f64; K]) {
    let mut sum = [0.0; K];
    let mut abs = [0.0; K];
    for k in range.step_by(stride) {
        let wt = if k == 0 || k == grid.n { 0.5 } else { 1.0 };
        let v = f(grid.node(k));
        for c in 0..K {
            sum[c] += wt * v[c];
            abs[c] += wt * v[c].abs();
        }
    }
    (sum, abs)
}

fn converged<const K: usize>(prev: &[f64; K], next: &[f64; K], abs: &[f64; K], rtol: f64) -> bool {
    (0..K).all(|c| (next[c] - prev[c]).abs() <= rtol * abs[c])
}

fn trapezoid_doubling<const K: usize>(
    mut grid: FrequencyGrid,
    cfg: &QuadratureConfig,
    f: impl Fn(f64) -> [f64; K],
) -> Result<[f64; K]> {
    let (mut sum, mut abs) = trapezoid_sums(&grid, 0..=grid.n, 1, &f);
    let mut estimate = sum.map(|s| s * grid.step());
    while 2 * grid.n <= cfg.n_max {
        grid.n *= 2;
        let (mid, mid_abs) = trapezoid_sums(&grid, 1..=grid.n - 1, 2, &f);
        for c in 0..K {
            sum[c] += mid[c];
            abs[c] += mid_abs[c];
        }
        let h = grid.step();
        let next = sum.map(|s| s * h);
        let scale = abs.map(|a| a * h);
        if converged(&estimate, &next, &scale, cfg.rtol) {
            log::debug!("trapezoid converged with {} intervals", grid.n);
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::Numeric(format!(
        "frequency quadrature did not reach relative tolerance {} within {} intervals",
        cfg.rtol, cfg.n_max
    )))
}

/// Composite trapezoid with `per` equal intervals on each table segment.
fn segment_trapezoid<const K: usize>(
    breaks: &[f64],
    per: usize,
    f: impl Fn(f64) -> [f64; K],
) -> ([f64; K], [f64; K]) {
    let mut sum = [0.0; K];
    let mut abs = [0.0; K];
    for seg in breaks.windows(2) {
        let h = (seg[1] - seg[0]) / per as f64;
        for j in 0..=per {
            let wt = if j == 0 || j == per { 0.5 * h } else { h };
            let w = if j == per { seg[1] } else { seg[0] + j as f64 * h };
            let v = f(w);
            for c in 0..K {
                sum[c] += wt * v[c];
                abs[c] += wt * v[c].abs();
            }
        }
    }
    (sum, abs)
}

fn romberg_segments<const K: usize>(
    breaks: &[f64],
    cfg: &QuadratureConfig,
    f: impl Fn(f64) -> [f64; K],
) -> Result<[f64; K]> {
    let segments = breaks.len() - 1;
    let mut per = cfg.n_min.div_ceil(segments).max(1).next_power_of_two();
    let mut rows: Vec<[f64; K]> = Vec::new();
    let (t, _) = segment_trapezoid(breaks, per, &f);
    rows.push(t);
    while (2 * per) * segments <= cfg.n_max {
        per *= 2;
        let (t, abs) = segment_trapezoid(breaks, per, &f);
        let mut next = vec![t];
        let mut factor = 4.0;
        for prev in &rows {
            let last = next[next.len() - 1];
            let mut e = [0.0; K];
            for c in 0..K {
                e[c] = last[c] + (last[c] - prev[c]) / (factor - 1.0);
            }
            next.push(e);
            factor *= 4.0;
        }
        let best = next[next.len() - 1];
        let prior = rows[rows.len() - 1];
        if converged(&prior, &best, &abs, cfg.rtol) {
            return Ok(best);
        }
        rows = next;
    }
    Err(Error::Numeric(format!(
        "tabulated-spectrum quadrature did not reach relative tolerance {} within {} intervals",
        cfg.rtol, cfg.n_max
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn gaussian_normalization() {
        let cfg = QuadratureConfig::default();
        for sigma in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let p = PulseSpec::gaussian(sigma, 0.3).unwrap();
            let [norm] = integrate_spectrum(&p, &cfg, |_, s| [s]).unwrap();
            assert!((norm - 1.0).abs() < 1e-10, "sigma {sigma}: {norm}");
        }
    }

    #[test]
    fn gaussian_first_moment() {
        let p = PulseSpec::gaussian(0.5, 1.7).unwrap();
        let [norm, mean, var] = integrate_spectrum(&p, &QuadratureConfig::default(), |w, s| {
            [s, w * s, (w - 1.7) * (w - 1.7) * s]
        })
        .unwrap();
        assert!((mean / norm - 1.7).abs() < 1e-12);
        // Intensity spectrum exp(−2σ²ω²) has variance 1/(4σ²).
        assert!((var - 1.0).abs() < 1e-10);
    }

    #[test]
    fn romberg_polynomial_segments() {
        // Tabulated amplitude linear on each segment: |a|² is quadratic there.
        let p = PulseSpec::tabulated(
            vec![-2.0, -0.5, 1.0, 3.0],
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.5),
                Complex64::new(0.8, 0.0),
                Complex64::new(0.0, 0.0),
            ],
            true,
        )
        .unwrap();
        let [norm] = integrate_spectrum(&p, &QuadratureConfig::default(), |_, s| [s]).unwrap();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn narrow_band_is_rejected() {
        let p = PulseSpec::narrow_band(0.0);
        let r = integrate_spectrum(&p, &QuadratureConfig::default(), |_, s| [s]);
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn cap_triggers_numeric_error() {
        let p = PulseSpec::gaussian(100.0, 0.0).unwrap();
        let cfg = QuadratureConfig {
            n_max: 2048,
            ..Default::default()
        };
        let r = integrate_spectrum(&p, &cfg, |_, s| [s]);
        assert!(matches!(r, Err(Error::Numeric(_))));
    }

    #[test]
    fn grid_half_width() {
        let g = FrequencyGrid::for_gaussian(0.05, 1.0, 1025);
        assert_eq!(g.half_width, 160.0);
        assert_eq!(g.n, 1026);
        assert_eq!(g.node(0), 1.0 - 160.0);
        assert_eq!(g.node(g.n), 1.0 + 160.0);
        let g = FrequencyGrid::for_gaussian(2.0, 0.0, 1024);
        assert_eq!(g.half_width, 20.0);
    }
}
