//! Datasets behind the published curves.
//!
//! Axis ranges and the pulse-duration set of `fig2` are choices of this
//! crate: `σ ∈ {∞, 3, 1, 0.3, 0.05}`, `OD₀ ∈ [0, 10]`, `Δ ∈ [−4, 4]`,
//! `OD_eff ∈ [0.01, 8]`.

use rayon::prelude::*;

use super::csv::{Cell, Table};
use super::CliError;
use crate::domain::{MediumProfile, PulseSpec};
use crate::error::Result;
use crate::spectral::{self, asymptotics, group_delay, tau_s_narrow, wigner_delay, SpectralEngine};

pub const FIGURE_NAMES: [&str; 6] = ["fig2", "fig3a", "fig3b", "fig4", "figF1", "figG1"];

/// Pulse durations of the transmitted-time curves; `∞` is the narrow-band
/// limit.
pub const FIG2_SIGMAS: [f64; 5] = [f64::INFINITY, 3.0, 1.0, 0.3, 0.05];
/// Optical depths of the detuning curves; the smallest stands in for
/// `OD₀ → 0`.
pub const FIG3_OD0: [f64; 5] = [1e-3, 1.0, 2.0, 5.0, 10.0];
pub const FIG4_SIGMAS: [f64; 3] = [f64::INFINITY, 1.0, 0.05];
/// Pulse duration of the broadband approximation figures.
pub const BROADBAND_SIGMA: f64 = 0.05;

pub fn figure(name: &str) -> std::result::Result<Table, CliError> {
    let t = match name {
        "fig2" => fig2(),
        "fig3a" => Ok(fig3a()),
        "fig3b" => Ok(fig3b()),
        "fig4" => fig4(),
        "figF1" => fig_f1(),
        "figG1" => fig_g1(),
        other => return Err(CliError::UnknownFigure(other.to_owned())),
    };
    Ok(t?)
}

fn pulse_for(sigma: f64) -> Result<PulseSpec> {
    if sigma.is_infinite() {
        Ok(PulseSpec::narrow_band(0.0))
    } else {
        PulseSpec::gaussian(sigma, 0.0)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| (a.ln() + (b / a).ln() * k as f64 / (n - 1) as f64).exp()).collect()
}

/// Rows of `f` over the grid `sigmas × xs`, computed in parallel and kept in
/// grid order.
fn grid_rows(
    outer: &[f64],
    xs: &[f64],
    f: impl Fn(f64, f64) -> Result<Vec<Cell>> + Sync,
) -> Result<Vec<Vec<Cell>>> {
    let pairs: Vec<(f64, f64)> = outer.iter().flat_map(|a| xs.iter().map(move |x| (*a, *x))).collect();
    pairs.par_iter().map(|(a, x)| f(*a, *x)).collect()
}

pub fn fig2() -> Result<Table> {
    let mut t = Table::new(&["sigma", "od0", "tau_t"]);
    t.comment("fig2: transmitted-photon excitation time vs resonant optical depth, resonant Gaussian pulses");
    t.comment("tau_t = int S(w) exp(-OD0 L(w)) t_g(w) dw / P_T, the group delay averaged over the transmitted spectrum");
    t.comment("L(w) = 1/(1+4w^2), t_g(w) = -OD0 (1-4w^2)/(1+4w^2)^2; sigma = inf is the narrow-band limit t_g(0) = -OD0");
    let od0s = linspace(0.0, 10.0, 201);
    t.rows = grid_rows(&FIG2_SIGMAS, &od0s, |sigma, od0| {
        let pulse = pulse_for(sigma)?;
        let medium = MediumProfile::uniform(od0, 1.0)?;
        Ok(vec![sigma.into(), od0.into(), spectral::tau_t(&pulse, &medium)?.into()])
    })?;
    Ok(t)
}

fn detunings() -> Vec<f64> {
    linspace(-4.0, 4.0, 401)
}

pub fn fig3a() -> Table {
    let mut t = Table::new(&["od0", "detuning", "t_g"]);
    t.comment("fig3a: narrow-band group delay vs detuning");
    t.comment("t_g(D, OD0) = -OD0 (1-4D^2)/(1+4D^2)^2, equal to tau_t in the narrow-band limit");
    for od0 in FIG3_OD0 {
        for d in detunings() {
            t.push(vec![od0.into(), d.into(), group_delay(d, od0).into()]);
        }
    }
    t
}

pub fn fig3b() -> Table {
    let mut t = Table::new(&["od0", "detuning", "tau_s", "t_w"]);
    t.comment("fig3b: narrow-band scattered-photon excitation time vs detuning");
    t.comment("tau_s(D, OD0) = 1 - t_g(D, OD0)/(exp(OD0 L(D)) - 1), from the sum rule at a single frequency");
    t.comment("t_w(D) = 2 L(D), the Wigner delay approached as OD0 -> 0");
    for od0 in FIG3_OD0 {
        for d in detunings() {
            t.push(vec![od0.into(), d.into(), tau_s_narrow(d, od0).into(), wigner_delay(d).into()]);
        }
    }
    t
}

fn od_eff_axis() -> Vec<f64> {
    geomspace(0.01, 8.0, 120)
}

pub fn fig4() -> Result<Table> {
    let mut t = Table::new(&["sigma", "od_eff", "od0", "p_t", "tau_t", "tau_s"]);
    t.comment("fig4: transmitted and scattered excitation times vs effective optical depth OD_eff = -ln P_T");
    t.comment("tau_t: group delay averaged over the transmitted spectrum; tau_s: sum-rule complement 1 - (P_T/P_S) tau_t");
    t.comment("OD0 found by bisection on the monotone P_T(OD0); sigma = inf is the narrow-band limit");
    let engine = SpectralEngine::default();
    t.rows = grid_rows(&FIG4_SIGMAS, &od_eff_axis(), |sigma, od_eff| {
        let pulse = pulse_for(sigma)?;
        let od0 = engine.od0_for_od_eff(&pulse, od_eff)?;
        let medium = MediumProfile::uniform(od0, 1.0)?;
        let r = engine.analyze(&pulse, &medium)?;
        Ok(vec![sigma.into(), od_eff.into(), od0.into(), r.p_t.into(), r.tau_t.into(), r.tau_s.into()])
    })?;
    Ok(t)
}

fn broadband_rows(f: impl Fn(f64, f64, &PulseSpec, &MediumProfile) -> Result<Vec<Cell>> + Sync) -> Result<Vec<Vec<Cell>>> {
    let engine = SpectralEngine::default();
    let pulse = PulseSpec::gaussian(BROADBAND_SIGMA, 0.0)?;
    geomspace(1e-3, 8.0, 100)
        .par_iter()
        .map(|od_eff| {
            let od0 = engine.od0_for_od_eff(&pulse, *od_eff)?;
            let medium = MediumProfile::uniform(od0, 1.0)?;
            f(*od_eff, od0, &pulse, &medium)
        })
        .collect()
}

pub fn fig_f1() -> Result<Table> {
    let mut t = Table::new(&["od_eff", "od0", "tau_s", "tau_s_low_od", "tau_s_high_od"]);
    t.comment(format!("figF1: scattered-photon excitation time of a broadband pulse (sigma = {BROADBAND_SIGMA}) vs OD_eff"));
    t.comment("tau_s: exact sum-rule complement");
    t.comment("tau_s_low_od = 1 - sqrt(2/pi) OD_eff/(4 sigma), flat-spectrum expansion for OD0 << 1");
    t.comment("tau_s_high_od = 1 - exp(-OD_eff)/(1 - exp(-OD_eff)) OD_eff/2, from tau_t ~ OD_eff/2 and the sum rule");
    t.rows = broadband_rows(|od_eff, od0, pulse, medium| {
        let a = asymptotics(pulse, medium)?;
        Ok(vec![
            od_eff.into(),
            od0.into(),
            spectral::tau_s(pulse, medium)?.into(),
            a.tau_s_low_od.into(),
            a.tau_s_high_od.into(),
        ])
    })?;
    Ok(t)
}

pub fn fig_g1() -> Result<Table> {
    let mut t = Table::new(&["od_eff", "od0", "tau_t", "tau_t_low_od", "tau_t_high_od"]);
    t.comment(format!("figG1: transmitted-photon excitation time of a broadband pulse (sigma = {BROADBAND_SIGMA}) vs OD_eff"));
    t.comment("tau_t: group delay averaged over the transmitted spectrum");
    t.comment("tau_t_low_od = sqrt(pi/2) (sigma/4) OD0^2, flat-spectrum expansion for OD0 << 1");
    t.comment("tau_t_high_od = OD_eff/2, once the near-resonant components are absorbed");
    t.rows = broadband_rows(|od_eff, od0, pulse, medium| {
        let a = asymptotics(pulse, medium)?;
        Ok(vec![
            od_eff.into(),
            od0.into(),
            spectral::tau_t(pulse, medium)?.into(),
            a.tau_t_low_od.into(),
            a.tau_t_high_od.into(),
        ])
    })?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(c: &Cell) -> f64 {
        match c {
            Cell::Num(v) => *v,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_figure() {
        assert!(matches!(figure("fig9"), Err(CliError::UnknownFigure(_))));
    }

    #[test]
    fn fig2_narrow_band_series() {
        let t = fig2().unwrap();
        let row = t
            .rows
            .iter()
            .find(|r| num(&r[0]).is_infinite() && (num(&r[1]) - 5.0).abs() < 1e-12)
            .unwrap();
        assert!((num(&row[2]) + 5.0).abs() < 1e-12);
        // Every series starts at zero.
        for r in t.rows.iter().filter(|r| num(&r[1]) == 0.0) {
            assert!(num(&r[2]).abs() < 1e-12);
        }
    }

    #[test]
    fn fig3b_low_depth_starts_at_wigner_delay() {
        let t = fig3b();
        let row = t.rows.iter().find(|r| num(&r[0]) == 1e-3 && num(&r[1]).abs() < 1e-12).unwrap();
        assert!((num(&row[2]) - 2.0).abs() < 1e-3);
    }

    #[test]
    fn figures_carry_provenance_and_are_deterministic() {
        for name in ["fig3a", "fig3b"] {
            let a = figure(name).unwrap();
            assert!(!a.comments.is_empty());
            assert_eq!(a.render(), figure(name).unwrap().render());
        }
    }
}
