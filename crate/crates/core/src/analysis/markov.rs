//! Suppression gain `F_noise(t) - F_free(t)` across memory rates `γ`.

use serde::{Deserialize, Serialize};

use super::{averaged_fidelity, strictly_increasing, AnalysisError, AveragingSpec};
use crate::dynamics::{FidelityConvention, StepConfig, SystemParams};
use crate::noise::ShotNoiseParams;

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovConfig {
    pub gammas: Vec<f64>,
    pub noise: ShotNoiseParams,
    /// Probe time in units of `T`.
    pub probe_periods: f64,
    pub n_trains: usize,
    pub dt: f64,
    pub convention: FidelityConvention,
}

impl MarkovConfig {
    /// `γ ∈ {0.2, 0.5, 1, 2, 5}`, `J = 15`, `W = 1000/T`, probe at `50T`.
    pub fn reference(period: f64) -> Self {
        Self {
            gammas: vec![0.2, 0.5, 1.0, 2.0, 5.0],
            noise: ShotNoiseParams::new(15.0, 1000.0 / period).expect("valid"),
            probe_periods: 50.0,
            n_trains: 64,
            dt: 1e-3,
            convention: FidelityConvention::QExponent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainTrend {
    /// Every step to larger `γ` lowers the gain.
    Decreasing,
    /// Every step to larger `γ` raises the gain.
    Increasing,
    /// All gains are zero.
    Flat,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovScan {
    pub gammas: Vec<f64>,
    pub probe_time: f64,
    pub f_noise: Vec<f64>,
    pub f_noise_stderr: Vec<f64>,
    pub f_free: Vec<f64>,
    pub gain: Vec<f64>,
    /// The free curve is deterministic, so this is the stderr of `f_noise`.
    pub gain_stderr: Vec<f64>,
    pub trend: GainTrend,
}

pub fn markov_scan(
    base: &SystemParams<f64>,
    config: &MarkovConfig,
    master_seed: u64,
) -> Result<MarkovScan, AnalysisError> {
    strictly_increasing("gamma values", &config.gammas)?;
    let probe_time = config.probe_periods * base.period;
    let spec = AveragingSpec {
        n_trains: config.n_trains,
        steps: StepConfig::new(config.dt, probe_time).with_stride(StepConfig::new(config.dt, probe_time).n_steps()),
        convention: config.convention,
    };
    let mut scan = MarkovScan {
        gammas: config.gammas.clone(),
        probe_time,
        f_noise: vec![],
        f_noise_stderr: vec![],
        f_free: vec![],
        gain: vec![],
        gain_stderr: vec![],
        trend: GainTrend::Mixed,
    };
    for &gamma in &config.gammas {
        let sys = base.with_gamma(gamma);
        sys.validate()?;
        let noisy = averaged_fidelity(&sys, &config.noise, &spec, master_seed)?;
        let free = averaged_fidelity(&sys, &ShotNoiseParams::silent(), &spec, master_seed)?;
        let f = *noisy.values.last().expect("non-empty");
        let se = noisy.stderr.as_ref().and_then(|s| s.last().copied()).unwrap_or(0.0);
        let f0 = *free.values.last().expect("non-empty");
        scan.f_noise.push(f);
        scan.f_noise_stderr.push(se);
        scan.f_free.push(f0);
        scan.gain.push(f - f0);
        scan.gain_stderr.push(se);
    }
    scan.trend = classify(&scan.gain);
    Ok(scan)
}

fn classify(gain: &[f64]) -> GainTrend {
    if gain.iter().all(|&g| g == 0.0) {
        GainTrend::Flat
    } else if gain.windows(2).all(|w| w[1] < w[0]) {
        GainTrend::Decreasing
    } else if gain.windows(2).all(|w| w[1] > w[0]) {
        GainTrend::Increasing
    } else {
        GainTrend::Mixed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_coupling_means_no_gain() {
        let sys = SystemParams::reference().with_g(0.0);
        let cfg = MarkovConfig {
            probe_periods: 2.0,
            n_trains: 4,
            ..MarkovConfig::reference(sys.period)
        };
        let scan = markov_scan(&sys, &cfg, 1).unwrap();
        assert_eq!(scan.gain, vec![0.0; 5]);
        assert_eq!(scan.trend, GainTrend::Flat);
        assert!(scan.f_free.iter().all(|&f| f == 1.0));
    }

    #[test]
    fn gains_are_bounded() {
        let sys = SystemParams::reference();
        let cfg = MarkovConfig {
            gammas: vec![0.2, 5.0],
            probe_periods: 4.0,
            n_trains: 4,
            ..MarkovConfig::reference(sys.period)
        };
        let scan = markov_scan(&sys, &cfg, 1).unwrap();
        assert!(scan.gain.iter().all(|g| g.abs() < 1.0));
        assert!((scan.probe_time - 20.0).abs() < 1e-12);
    }

    #[test]
    fn trend_classification() {
        assert_eq!(classify(&[0.3, 0.2, 0.1]), GainTrend::Decreasing);
        assert_eq!(classify(&[0.1, 0.2]), GainTrend::Increasing);
        assert_eq!(classify(&[0.1, 0.2, 0.0]), GainTrend::Mixed);
    }
}
