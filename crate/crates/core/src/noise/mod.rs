//! Stochastic inputs: biased Poissonian shot noise for the control field and
//! complex Ornstein-Uhlenbeck noise for the environment.

mod ou;
mod shot;

pub use ou::{ou_statistics, sample_ou_path, OuParams, OuPath, OuStatsReport, DEFAULT_MAX_GAMMA_DT};
pub use shot::{
    count_law_check, sample_shot_train, sampled_shot_moments, shot_train_moments, AmplitudeLaw, CountLawCheck, Kick,
    MomentCheck, MomentsReport, ShotNoiseParams, ShotTrain,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("invalid parameter `{name}` = {value}: {rule}")]
    Parameter {
        name: &'static str,
        value: f64,
        rule: &'static str,
    },
    #[error("usage error: {0}")]
    Usage(String),
}

pub(crate) fn require(name: &'static str, value: f64, ok: bool, rule: &'static str) -> Result<(), NoiseError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(NoiseError::Parameter { name, value, rule })
    }
}
