use rayon::prelude::*;

use super::AnalysisError;
use crate::dynamics::{
    integrate_q_with, DynamicsError, FidelityConvention, FidelityCurve, StepConfig, SystemParams,
    MAX_EXCLUDED_FRACTION,
};
use crate::noise::{sample_shot_train, ShotNoiseParams, ShotTrain};
use crate::provenance::Provenance;
use crate::rng::{lane, RngStream};
use crate::stats::Welford;

/// Control-field average of the fidelity over independent trains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AveragingSpec {
    pub n_trains: usize,
    pub steps: StepConfig<f64>,
    pub convention: FidelityConvention,
}

const CHUNK: usize = 64;

/// Average of `F(t)` over `n_trains` trains; train `i` comes from substream
/// `i` of `master_seed`, so cells that share a seed use common random
/// numbers. A silent control field is integrated once (the curve is then
/// deterministic and its standard error is zero).
pub fn averaged_fidelity(
    sys: &SystemParams<f64>,
    noise: &ShotNoiseParams,
    spec: &AveragingSpec,
    master_seed: u64,
) -> Result<FidelityCurve<f64>, AnalysisError> {
    noise.validate()?;
    if spec.n_trains == 0 {
        return Err(AnalysisError::Usage("n_trains must be at least 1".into()));
    }
    let steps = spec.steps;
    let scale = spec.convention.exponent_scale(sys.g);
    let n_rec = steps.n_steps() / steps.record_stride.max(1) + 1;
    let horizon = steps.dt * steps.n_steps() as f64;

    let run_one = |i: usize| -> Result<Option<Vec<f64>>, DynamicsError> {
        let stream = RngStream::new(master_seed, i as u64).lane(lane::SHOT_TRAIN);
        let train: ShotTrain<f64> = sample_shot_train(noise, horizon.max(steps.dt), &stream)?;
        match integrate_q_with(sys, &train, &steps) {
            Ok(q) => Ok(Some(
                q.exponent
                    .iter()
                    .enumerate()
                    .map(|(k, s)| if k == 0 { 1.0 } else { (-scale * s).exp() })
                    .collect(),
            )),
            Err(DynamicsError::Divergence { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let n_trains = if noise.is_silent() { 1 } else { spec.n_trains };
    let mut acc = vec![Welford::default(); n_rec];
    let mut excluded = 0usize;
    for start in (0..n_trains).step_by(CHUNK) {
        let end = (start + CHUNK).min(n_trains);
        let batch: Vec<_> = (start..end).into_par_iter().map(run_one).collect();
        for r in batch {
            match r? {
                Some(f) => acc.iter_mut().zip(&f).for_each(|(w, &v)| w.push(v)),
                None => excluded += 1,
            }
        }
    }
    if excluded as f64 > MAX_EXCLUDED_FRACTION * n_trains as f64 || excluded == n_trains {
        return Err(DynamicsError::DivergenceBudget {
            excluded,
            total: n_trains,
        }
        .into());
    }

    let record_step = steps.record_step();
    Ok(FidelityCurve {
        times: (0..n_rec).map(|k| k as f64 * record_step).collect(),
        values: acc.iter().map(Welford::mean).collect(),
        stderr: Some(acc.iter().map(Welford::stderr).collect()),
        provenance: Provenance::new()
            .with("omega", sys.omega)
            .with("g", sys.g)
            .with("gamma", sys.gamma)
            .with("T", sys.period)
            .with("J", noise.mean_amplitude)
            .with("W", noise.rate)
            .with("amplitude_law", noise.law.to_string())
            .with("dt", steps.dt)
            .with("horizon", horizon)
            .with("n_trains", n_trains)
            .with("excluded", excluded)
            .with("master_seed", master_seed)
            .with("convention", spec.convention.as_str()),
    })
}

/// Largest record stride (in steps of `dt`) that puts every probe time on the
/// recorded grid.
pub fn probe_stride(dt: f64, probes: &[f64]) -> Result<usize, AnalysisError> {
    let mut stride = 0usize;
    for &p in probes {
        let steps = (p / dt).round();
        if steps < 1.0 || (steps * dt - p).abs() > 1e-9 * p.max(1.0) {
            return Err(AnalysisError::Usage(format!("probe time {p} is not a positive multiple of dt = {dt}")));
        }
        stride = gcd(stride, steps as usize);
    }
    Ok(stride.max(1))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
