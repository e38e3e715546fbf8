//! Fidelity-versus-time comparison between free dynamics and several
//! shot-noise strengths and rates, per memory rate `γ`.

use super::{averaged_fidelity, AnalysisError, AveragingSpec};
use crate::dynamics::{FidelityConvention, FidelityCurve, StepConfig, SystemParams};
use crate::noise::{AmplitudeLaw, ShotNoiseParams};

#[derive(Clone, Debug, PartialEq)]
pub struct Fig2Config {
    pub gammas: Vec<f64>,
    /// Mean kick heights `J` (units of ω).
    pub amplitudes: Vec<f64>,
    /// Arrival rates `W` in units of `1/T`.
    pub rates_per_period: Vec<f64>,
    pub law: AmplitudeLaw,
    pub n_trains: usize,
    pub dt: f64,
    /// Horizon in units of `T`.
    pub horizon_periods: f64,
    pub record_stride: usize,
    pub convention: FidelityConvention,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self {
            gammas: vec![0.2, 0.5],
            amplitudes: vec![15.0, 8.0, 3.0],
            rates_per_period: vec![1000.0, 200.0],
            law: AmplitudeLaw::Exponential,
            n_trains: 32,
            dt: 1e-3,
            horizon_periods: 100.0,
            record_stride: 1000,
            convention: FidelityConvention::QExponent,
        }
    }
}

/// One averaged curve. `noise` is `None` for the free-dynamics reference.
#[derive(Clone, Debug, PartialEq)]
pub struct Fig2Curve {
    pub gamma: f64,
    pub noise: Option<ShotNoiseParams>,
    pub curve: FidelityCurve<f64>,
}

/// For every `γ`: the free curve first, then one curve per `(J, W)` in the
/// order the lists were given.
pub fn fig2_experiment(
    base: &SystemParams<f64>,
    config: &Fig2Config,
    master_seed: u64,
) -> Result<Vec<Fig2Curve>, AnalysisError> {
    if config.gammas.is_empty() {
        return Err(AnalysisError::Usage("fig2 needs at least one gamma".into()));
    }
    let horizon = config.horizon_periods * base.period;
    let spec = AveragingSpec {
        n_trains: config.n_trains,
        steps: StepConfig::new(config.dt, horizon).with_stride(config.record_stride),
        convention: config.convention,
    };
    let mut out = Vec::new();
    for &gamma in &config.gammas {
        let sys = base.with_gamma(gamma);
        sys.validate()?;
        out.push(Fig2Curve {
            gamma,
            noise: None,
            curve: averaged_fidelity(&sys, &ShotNoiseParams::silent(), &spec, master_seed)?,
        });
        for &j in &config.amplitudes {
            for &w in &config.rates_per_period {
                let noise = ShotNoiseParams::new(j, w / base.period)?.with_law(config.law)?;
                let curve = averaged_fidelity(&sys, &noise, &spec, master_seed)?;
                out.push(Fig2Curve {
                    gamma,
                    noise: Some(noise),
                    curve,
                });
            }
        }
    }
    Ok(out)
}
