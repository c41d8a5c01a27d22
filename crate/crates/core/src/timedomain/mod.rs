//! Space-time integration of the forward and backward equations of motion.
//!
//! The grid has unit Courant number (`Δz = Δt = h`), so advection is an
//! exact index shift. Each step is a Strang splitting: a half-step of the
//! local coupling/decay (an exact 2×2 matrix exponential per cell), the
//! shift, and another half-step. The backward step is the exact adjoint of
//! the forward step, which keeps the overlap of the two states constant to
//! rounding.
//!
//! Only the medium `[0, L]` is stored on the grid. The free regions on
//! either side are represented by boundary series: the input amplitude
//! entering at `z = 0` and the amplitude leaving at `z = L`, one sample per
//! step.

mod evolve;
mod observables;
mod oracle;

pub use evolve::{integrate_backward, integrate_forward, local_propagator};
pub use observables::{
    analyze_timedomain, com_delays, tau_avg_td, tau_t_td, weak_trace, ComDelays, WeakTrace,
};
pub use oracle::{tau_s_oracle, OracleConfig};

use num_complex::Complex64;

use crate::domain::{MediumProfile, PulseSpec};
use crate::error::{invalid, Error, Result};

/// `|α_in| < TRUNCATION·peak` outside the simulated input window.
pub const INPUT_TRUNCATION: f64 = 1e-8;

/// Discretization of one time-domain run.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    length: f64,
    cells: usize,
    step: f64,
    /// Input samples sit at `t_n + h/2 = (n − lead)·h`.
    lead: usize,
    /// Coupling in each cell, chosen so each cell carries its exact share of
    /// the optical depth.
    coupling: Vec<f64>,
    /// Stop once the excitation norm falls below this fraction of its peak.
    pub tail_tolerance: f64,
    pub max_steps: usize,
}

impl GridSpec {
    /// Production grid: at least 200 medium cells and 50 steps per pulse
    /// duration.
    pub fn new(pulse: &PulseSpec, medium: &MediumProfile, cells: usize) -> Result<Self> {
        Self::with_min_cells(pulse, medium, cells, 200)
    }

    /// Coarse grid for the scattering oracle: at least 50 medium cells.
    pub fn coarse(pulse: &PulseSpec, medium: &MediumProfile, cells: usize) -> Result<Self> {
        Self::with_min_cells(pulse, medium, cells, 50)
    }

    fn with_min_cells(pulse: &PulseSpec, medium: &MediumProfile, cells: usize, min_cells: usize) -> Result<Self> {
        let sigma = pulse.sigma().ok_or_else(|| {
            Error::Unsupported("the time-domain engine integrates Gaussian pulses only".into())
        })?;
        if cells < min_cells {
            return Err(invalid(format!("medium needs at least {min_cells} cells, got {cells}")));
        }
        let h = medium.length() / cells as f64;
        if h > sigma / 50.0 {
            return Err(invalid(format!(
                "time step {h} resolves the pulse with fewer than 50 samples per duration {sigma}"
            )));
        }
        let half_span = 2.0 * sigma * INPUT_TRUNCATION.recip().ln().sqrt();
        let lead = (half_span / h).ceil() as usize;
        let mut coupling = Vec::with_capacity(cells);
        for j in 0..cells {
            let a = medium.od_integral(j as f64 * h)?;
            let b = medium.od_integral(((j + 1) as f64 * h).min(medium.length()))?;
            coupling.push(((b - a).max(0.0) / (4.0 * h)).sqrt());
        }
        Ok(Self {
            length: medium.length(),
            cells,
            step: h,
            lead,
            coupling,
            tail_tolerance: 1e-8,
            max_steps: 1_000_000,
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// `Δz = cΔt`.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn coupling(&self) -> &[f64] {
        &self.coupling
    }

    /// Time of slice `n`.
    pub fn time(&self, n: usize) -> f64 {
        (n as f64 - self.lead as f64 - 0.5) * self.step
    }

    /// Centre of cell `j`.
    pub fn z(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.step
    }

    /// Number of nonzero input samples.
    pub fn input_len(&self) -> usize {
        2 * self.lead + 1
    }

    /// Input series `α_in(t_n + h/2)`.
    pub fn input_series(&self, pulse: &PulseSpec) -> Vec<Complex64> {
        (0..self.input_len())
            .map(|n| pulse.time_amplitude(self.time(n) + 0.5 * self.step).unwrap_or_default())
            .collect()
    }

    /// Spatial extent represented by the run, free regions included:
    /// `[−T_lead, L + T_trail]` for a run of `steps` steps.
    pub fn domain(&self, steps: usize) -> (f64, f64) {
        let lead = (self.lead as f64 + 0.5) * self.step;
        (-lead, self.length + (steps as f64 * self.step - lead).max(0.0))
    }

    fn same_as(&self, other: &GridSpec) -> bool {
        self.cells == other.cells && self.step == other.step && self.lead == other.lead
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evolution {
    Forward,
    Backward,
}

/// Time-ordered field slices `α(z_j, t_n)`, `β(z_j, t_n)` on the medium
/// cells, plus the boundary series standing in for the free regions.
#[derive(Debug, Clone)]
pub struct FieldHistory {
    pub evolution: Evolution,
    pub grid: GridSpec,
    /// Slices `0..=steps`, row-major with cells as the fast index.
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    /// Forward: amplitude entering at `z = 0` during step `n`.
    /// Backward: amplitude leaving through `z = 0` during step `n`.
    pub left: Vec<Complex64>,
    /// Forward: amplitude leaving through `z = L` during step `n`.
    /// Backward: amplitude entering at `z = L` during step `n`.
    pub right: Vec<Complex64>,
    /// State norm at each slice, free regions included.
    pub norm: Vec<f64>,
    /// Forward: `Γ∫₀ᵗ dt′∫dz|β|²` by the trapezoid rule. Backward: the overlap
    /// with the forward state at each slice.
    pub aux: Vec<f64>,
    /// Transmission probability of the forward run.
    pub p_t: f64,
}

impl FieldHistory {
    pub fn steps(&self) -> usize {
        self.norm.len() - 1
    }

    pub fn alpha_slice(&self, n: usize) -> &[Complex64] {
        let m = self.grid.cells;
        &self.alpha[n * m..(n + 1) * m]
    }

    pub fn beta_slice(&self, n: usize) -> &[Complex64] {
        let m = self.grid.cells;
        &self.beta[n * m..(n + 1) * m]
    }

    /// `∫dz|β(z, t_n)|²`.
    pub fn excitation(&self, n: usize) -> f64 {
        self.grid.step * self.beta_slice(n).iter().map(|b| b.norm_sqr()).sum::<f64>()
    }

    /// Largest deviation of `norm + scattered` from one over the run.
    pub fn bookkeeping_error(&self) -> f64 {
        self.norm
            .iter()
            .zip(&self.aux)
            .map(|(n, s)| (n + s - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
