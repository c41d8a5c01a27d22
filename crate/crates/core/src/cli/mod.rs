//! Command-line front end: scenario runs, sweeps, figure datasets and the
//! validation suite. The binary is a thin wrapper over this module.

pub mod config;
pub mod csv;
pub mod figures;
pub mod validate;

use std::path::PathBuf;

use rayon::prelude::*;

use crate::domain::{DelayReport, MediumProfile, PulseSpec};
use crate::error::Error;
use crate::spectral::SpectralEngine;
use crate::timedomain::analyze_timedomain;
use config::{Axis, Config, ConfigError, EngineSelection, Scenario, SweepSpec};
use csv::{Cell, Table};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "PHOTON_DWELL_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("unknown figure '{0}', expected one of fig2, fig3a, fig3b, fig4, figF1, figG1")]
    UnknownFigure(String),
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    /// 1 validation failure, 2 config error, 3 numeric failure, 4
    /// precondition violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Engine(Error::Numeric(_) | Error::OracleBudget { .. }) | CliError::Io { .. } => 3,
            CliError::Engine(_) | CliError::UnknownFigure(_) => 4,
        }
    }
}

/// Reads the thread count from [`THREADS_ENV`] and sizes the global pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| ConfigError {
            line: None,
            message: format!("{THREADS_ENV} must be a positive integer, got '{raw}'"),
        })?;
    // A pool that is already initialized keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

impl Scenario {
    pub fn spectral_engine(&self) -> SpectralEngine {
        SpectralEngine {
            quadrature: self.quadrature,
            fixed_intervals: self.fixed_intervals,
        }
    }

    /// Runs the selected engines, spectral first.
    pub fn evaluate(&self) -> Result<(PulseSpec, MediumProfile, Vec<DelayReport>), Error> {
        let pulse = self.pulse.build()?;
        let medium = self.medium.build()?;
        // Check the time-domain preconditions before any work is done.
        let grid = match self.engine {
            EngineSelection::Spectral => None,
            _ => Some(self.grid.grid(&pulse, &medium)?),
        };
        let mut reports = Vec::new();
        if self.engine != EngineSelection::TimeDomain {
            reports.push(self.spectral_engine().analyze(&pulse, &medium)?);
        }
        if let Some(grid) = grid {
            reports.push(analyze_timedomain(&pulse, &medium, &grid, &self.probe)?);
        }
        Ok((pulse, medium, reports))
    }

    /// Copy with one parameter replaced. `od_eff` is converted to the
    /// resonant optical depth by bisection on the transmission.
    pub fn at(&self, axis: Axis, value: f64) -> Result<Scenario, Error> {
        let mut s = self.clone();
        match axis {
            Axis::Od0 => s.medium.od0 = Some(value),
            Axis::Detuning => s.pulse.detuning = value,
            Axis::Sigma => s.pulse.sigma = Some(value),
            Axis::OdEff => {
                let pulse = self.pulse.build()?;
                let od0 = self.spectral_engine().od0_for_od_eff(&pulse, value)?;
                // od0_for_od_eff works on a uniform medium; a tabulated
                // profile has the same spectral response at equal od0.
                s.medium.od0 = Some(od0);
            }
        }
        Ok(s)
    }
}

pub const REPORT_COLUMNS: [&str; 15] = [
    "index", "sigma", "detuning", "od0", "length", "method", "p_t", "p_s", "tau_0", "tau_t", "tau_s", "t_g", "t_w",
    "t_s", "od_eff",
];

fn report_row(index: usize, pulse: &PulseSpec, medium: &MediumProfile, r: &DelayReport) -> Vec<Cell> {
    let sigma = match pulse.sigma() {
        Some(s) => Cell::Num(s),
        None if pulse.is_narrow_band() => Cell::Num(f64::INFINITY),
        None => Cell::Empty,
    };
    vec![
        index.into(),
        sigma,
        pulse.detuning().into(),
        medium.od0().into(),
        medium.length().into(),
        r.method.to_string().into(),
        r.p_t.into(),
        r.p_s.into(),
        r.tau_0.into(),
        r.tau_t.into(),
        r.tau_s.into(),
        r.t_g.into(),
        r.t_w.into(),
        r.t_s.into(),
        r.od_eff.into(),
    ]
}

fn report_table() -> Table {
    let mut t = Table::new(&REPORT_COLUMNS);
    t.comment("photon-dwell delay report; times in units of 1/Gamma, sigma = inf marks a narrow-band pulse");
    t.comment("tau_0: time-integrated excitation probability of the average photon");
    t.comment("tau_t: transmission-weighted average of the group delay (weak value post-selected on transmission)");
    t.comment("tau_s: sum-rule complement (P_S tau_s + P_T tau_t = P_S)");
    t.comment("t_g / t_w: narrow-band group and Wigner delays; t_s: scattered-light delay");
    t
}

/// Runs one scenario. The config must not contain a sweep.
pub fn run(config: &Config) -> Result<Table, CliError> {
    if config.sweep.is_some() {
        return Err(ConfigError {
            line: None,
            message: "[sweep] section found; use the sweep subcommand".into(),
        }
        .into());
    }
    let (pulse, medium, reports) = config.scenario.evaluate()?;
    let mut t = report_table();
    for r in &reports {
        t.push(report_row(0, &pulse, &medium, r));
    }
    Ok(t)
}

/// Runs every point of the sweep concurrently; rows follow sweep order.
pub fn sweep(config: &Config) -> Result<Table, CliError> {
    let spec: &SweepSpec = config.sweep.as_ref().ok_or_else(|| ConfigError {
        line: None,
        message: "the sweep subcommand needs a [sweep] section".into(),
    })?;
    let values = spec.values();
    let results: Vec<Result<_, Error>> = values
        .par_iter()
        .map(|v| config.scenario.at(spec.axis, *v)?.evaluate())
        .collect();
    let mut t = report_table();
    t.comment(format!(
        "sweep over {} from {} to {} ({} points, {:?} spacing)",
        spec.axis.name(),
        spec.start,
        spec.stop,
        spec.points,
        spec.spacing
    ));
    for (index, res) in results.into_iter().enumerate() {
        let (pulse, medium, reports) = res?;
        for r in &reports {
            t.push(report_row(index, &pulse, &medium, r));
        }
    }
    Ok(t)
}

/// Writes `table` to `path`, or to stdout when `path` is `None`.
pub fn emit(table: &Table, path: Option<&std::path::Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, table.render()).map_err(|source| CliError::Io {
            path: p.to_owned(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            table.write_to(&mut out).and_then(|_| out.flush()).map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}
