//! Figure-level experiments built on the dynamics: averaged fidelity curves,
//! `(J, W)` sweeps, memory-rate scans and the washout diagnostic.

mod averaging;
mod fig2;
mod markov;
mod sweep;
mod washout;

pub use averaging::{averaged_fidelity, probe_stride, AveragingSpec};
pub use fig2::{fig2_experiment, Fig2Config, Fig2Curve};
pub use markov::{markov_scan, GainTrend, MarkovConfig, MarkovScan};
pub use sweep::{fig3_sweep, PlateauOnset, SweepConfig, SweepGrid, HIGH_FIDELITY, PLATEAU_TOLERANCE};
pub use washout::{washout_diagnostic, IntegrandSeries};

use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::noise::NoiseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

impl From<NoiseError> for AnalysisError {
    fn from(e: NoiseError) -> Self {
        Self::Dynamics(e.into())
    }
}

pub(crate) fn strictly_increasing(name: &str, xs: &[f64]) -> Result<(), AnalysisError> {
    if xs.is_empty() {
        return Err(AnalysisError::Usage(format!("{name} must not be empty")));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().any(|x| !x.is_finite()) {
        return Err(AnalysisError::Usage(format!("{name} must be strictly increasing")));
    }
    Ok(())
}
