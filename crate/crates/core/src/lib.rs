//! Atomic-excitation dwell times of a single photon crossing a
//! one-dimensional two-level medium, and of a photon reflected from a
//! two-mirror cavity.
//!
//! Two independent engines compute the same quantities: [`spectral`] uses
//! closed-form frequency-domain solutions, [`timedomain`] integrates the
//! forward and backward equations of motion on a space-time grid.
//! [`cavity`] holds the Fabry-Perot analogue.

pub mod cavity;
pub mod cli;
pub mod domain;
pub mod error;
pub mod quadrature;
pub mod spectral;
pub mod timedomain;

pub use domain::{
    make_gaussian_pulse, make_uniform_medium, od_integral, AtomParams, DelayReport, MediumProfile,
    Method, PulseShape, PulseSpec, WeakProbeConfig,
};
pub use error::{Error, Result};
