use super::{integrate_backward, integrate_forward, Evolution, FieldHistory, GridSpec};
use crate::domain::{DelayReport, MediumProfile, Method, PulseSpec, WeakProbeConfig};
use crate::error::{invalid, Error, Result};

/// Post-selected cross-phase shift on the probe at each slice.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakTrace {
    pub step: f64,
    pub epsilon: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// `φ(t) = ε/√P_T·Re ∫dz β←*(z,t)β→(z,t)`.
pub fn weak_trace(forward: &FieldHistory, backward: &FieldHistory, probe: &WeakProbeConfig) -> Result<WeakTrace> {
    if forward.evolution != Evolution::Forward || backward.evolution != Evolution::Backward {
        return Err(invalid("weak trace needs a forward and a backward history"));
    }
    if !forward.grid.same_as(&backward.grid) || forward.steps() != backward.steps() {
        return Err(invalid("forward and backward histories are on different grids"));
    }
    let h = forward.grid.step();
    let scale = probe.epsilon() * h / backward.p_t.sqrt();
    let values = (0..=forward.steps())
        .map(|n| {
            let s: f64 = forward
                .beta_slice(n)
                .iter()
                .zip(backward.beta_slice(n))
                .map(|(f, b)| (b.conj() * f).re)
                .sum();
            scale * s
        })
        .collect();
    let times = (0..=forward.steps()).map(|n| forward.grid.time(n)).collect();
    Ok(WeakTrace {
        step: h,
        epsilon: probe.epsilon(),
        times,
        values,
    })
}

fn trapezoid(values: impl ExactSizeIterator<Item = f64>, h: f64) -> f64 {
    let n = values.len();
    values
        .enumerate()
        .map(|(k, v)| if k == 0 || k + 1 == n { 0.5 * v } else { v })
        .sum::<f64>()
        * h
}

/// Transmitted-photon excitation time `(1/ε)∫φ dt`.
pub fn tau_t_td(trace: &WeakTrace) -> f64 {
    trapezoid(trace.values.iter().copied(), trace.step) / trace.epsilon
}

/// Average-photon excitation time `∫dt∫dz|β→|²`.
pub fn tau_avg_td(forward: &FieldHistory) -> f64 {
    trapezoid((0..forward.steps() + 1).map(|n| forward.excitation(n)), forward.grid.step())
}

/// Centre-of-mass delays relative to free propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComDelays {
    /// Delay of the transmitted pulse at `z = L`.
    pub transmitted: f64,
    /// Delay of the scattered light, with the travel time to each scattering
    /// position removed. `None` when nothing scatters.
    pub scattered: Option<f64>,
}

impl ComDelays {
    pub fn scattered(&self) -> Result<f64> {
        self.scattered
            .ok_or_else(|| Error::Undefined("no scattered light to take a centre of mass of".into()))
    }
}

/// Centre-of-mass delays of the transmitted and scattered light. The input
/// pulse must be symmetric in time for these to equal the excitation times.
pub fn com_delays(forward: &FieldHistory, p_t: f64) -> Result<ComDelays> {
    if forward.evolution != Evolution::Forward {
        return Err(invalid("centre-of-mass delays need a forward history"));
    }
    if !(p_t > 0.0) {
        return Err(Error::Undefined("nothing is transmitted".into()));
    }
    let g = &forward.grid;
    let h = g.step();
    // Boundary samples of step n are taken at t_n + h/2.
    let mid = |n: usize| g.time(n) + 0.5 * h;
    let moment = |series: &[num_complex::Complex64]| -> (f64, f64) {
        series.iter().enumerate().fold((0.0, 0.0), |(w, m), (n, a)| {
            let p = a.norm_sqr();
            (w + p, m + p * mid(n))
        })
    };
    let (w_in, m_in) = moment(&forward.left);
    let t_in = m_in / w_in;
    let (_, m_out) = moment(&forward.right);
    let transmitted = h * m_out / p_t - g.length() - t_in;

    let (mut w_s, mut m_s) = (0.0, 0.0);
    for n in 0..=forward.steps() {
        let t = g.time(n);
        for (j, b) in forward.beta_slice(n).iter().enumerate() {
            let p = b.norm_sqr();
            w_s += p;
            m_s += p * (t - g.z(j));
        }
    }
    let scattered = (w_s > 0.0).then(|| m_s / w_s - t_in);
    Ok(ComDelays { transmitted, scattered })
}

/// Forward and backward runs on `grid`, reduced to a report. `tau_s` uses
/// the sum rule; `t_s` carries the scattered centre-of-mass delay.
pub fn analyze_timedomain(
    pulse: &PulseSpec,
    medium: &MediumProfile,
    grid: &GridSpec,
    probe: &WeakProbeConfig,
) -> Result<DelayReport> {
    let forward = integrate_forward(pulse, medium, grid)?;
    let p_t = forward.p_t;
    let p_s = 1.0 - p_t;
    let backward = integrate_backward(&forward, p_t, grid)?;
    let trace = weak_trace(&forward, &backward, probe)?;
    let tau_t = tau_t_td(&trace);
    let tau_0 = tau_avg_td(&forward);
    let com = com_delays(&forward, p_t)?;
    let tau_s = if p_s > 0.0 { 1.0 - p_t / p_s * tau_t } else { f64::NAN };
    Ok(DelayReport {
        p_t,
        p_s,
        tau_0,
        tau_t,
        tau_s,
        t_g: None,
        t_w: None,
        t_s: com.scattered.filter(|_| p_s > 0.0),
        od_eff: -p_t.ln(),
        method: Method::TimeDomain,
    })
}
