//! Deterministic and stochastic dynamics of the dissipative two-level system
//! under a shot-noise control field.

mod conventions;
mod ensemble;
mod fidelity;
mod params;
mod riccati;
mod state;

pub use conventions::{crosscheck_conventions, ConventionReport};
pub use ensemble::{
    ensemble_density, DensityCurve, DensityStderr, EnsembleSpec, EnvironmentNoise, TrainPolicy,
};
pub use fidelity::{fidelity_from_q, fidelity_with_convention, FidelityConvention, FidelityCurve};
pub use params::SystemParams;
pub use riccati::{integrate_q, integrate_q_with, AppliedKick, QTrajectory, StepConfig, DIVERGENCE_GUARD};
pub use state::{propagate_trajectory, propagate_trajectory_strided, StateTrajectory};

use thiserror::Error;

use crate::noise::NoiseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid parameter `{name}` = {value}: {rule}")]
    Parameter {
        name: &'static str,
        value: f64,
        rule: &'static str,
    },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("Riccati solution diverged at t = {time} (|Q| = {modulus:e})")]
    Divergence { time: f64, modulus: f64 },
    #[error("{excluded} of {total} trajectories diverged, above the 1% budget")]
    DivergenceBudget { excluded: usize, total: usize },
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

pub(crate) fn require(name: &'static str, value: f64, ok: bool, rule: &'static str) -> Result<(), DynamicsError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(DynamicsError::Parameter { name, value, rule })
    }
}

/// Divergences beyond this fraction of an ensemble fail the run.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.01;

pub(crate) fn check_exclusions(excluded: usize, total: usize) -> Result<(), DynamicsError> {
    if excluded as f64 > MAX_EXCLUDED_FRACTION * total as f64 {
        Err(DynamicsError::DivergenceBudget { excluded, total })
    } else {
        Ok(())
    }
}
