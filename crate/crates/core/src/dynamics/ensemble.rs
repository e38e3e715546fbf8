//! Ensemble reconstruction of the density matrix,
//! `ρ_t = M[|ψ_t⟩⟨ψ_t|]` over unnormalized trajectories.
//!
//! Trajectory `i` draws its inputs from substream `i` of the master seed.
//! Trajectories are evaluated in fixed-size chunks in parallel and folded into
//! the accumulators strictly in index order, so the result is bit-identical
//! for any worker count.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_exclusions, propagate_trajectory_strided, DynamicsError, StepConfig, SystemParams};
use crate::noise::{sample_ou_path, sample_shot_train, OuParams, OuPath, ShotNoiseParams, ShotTrain};
use crate::provenance::Provenance;
use crate::rng::{lane, RngStream};
use crate::stats::Welford;

/// Whether every trajectory sees the same control-field realization.
#[derive(Clone, Debug, PartialEq)]
pub enum TrainPolicy {
    Shared(ShotTrain<f64>),
    Fresh(ShotNoiseParams),
}

impl TrainPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Shared(_) => "shared",
            Self::Fresh(_) => "fresh",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvironmentNoise {
    #[default]
    OrnsteinUhlenbeck,
    /// `z* ≡ 0`.
    Disabled,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub n_traj: usize,
    pub steps: StepConfig<f64>,
    pub environment: EnvironmentNoise,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DensityStderr {
    pub excited: f64,
    pub ground: f64,
    pub coherence_re: f64,
    pub coherence_im: f64,
}

/// Ensemble density matrix on the recorded grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityCurve {
    pub times: Vec<f64>,
    /// `⟨1|ρ|1⟩`.
    pub excited: Vec<f64>,
    /// `⟨0|ρ|0⟩`.
    pub ground: Vec<f64>,
    /// `⟨1|ρ|0⟩`; `⟨0|ρ|1⟩` is its conjugate.
    pub coherence: Vec<Complex64>,
    pub stderr: Vec<DensityStderr>,
    pub n_traj: usize,
    pub excluded: usize,
    pub provenance: Provenance,
}

impl DensityCurve {
    /// `ρ(t_k)` in the ordered basis `(|1⟩, |0⟩)`.
    pub fn matrix(&self, k: usize) -> [[Complex64; 2]; 2] {
        let c = self.coherence[k];
        [
            [Complex64::new(self.excited[k], 0.0), c],
            [c.conj(), Complex64::new(self.ground[k], 0.0)],
        ]
    }

    /// `sqrt(⟨1|ρ|1⟩)`.
    pub fn survival_amplitude(&self) -> Vec<f64> {
        self.excited.iter().map(|p| p.max(0.0).sqrt()).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

struct Sample {
    excited: Vec<f64>,
    ground: Vec<f64>,
    coherence: Vec<Complex64>,
}

pub(crate) const CHUNK: usize = 64;

pub fn ensemble_density(
    sys: &SystemParams<f64>,
    policy: &TrainPolicy,
    spec: &EnsembleSpec,
    master_seed: u64,
) -> Result<DensityCurve, DynamicsError> {
    sys.validate()?;
    let steps = spec.steps;
    let n = steps.validate(sys)?;
    if spec.n_traj == 0 {
        return Err(DynamicsError::Usage("ensemble needs at least one trajectory".into()));
    }
    if let TrainPolicy::Fresh(p) = policy {
        p.validate()?;
    }
    let ou_params = OuParams::new(sys.gamma, steps.dt, n)?;
    let horizon = steps.dt * n as f64;
    let n_rec = n / steps.record_stride + 1;

    let run_one = |i: usize| -> Result<Option<Sample>, DynamicsError> {
        let stream = RngStream::new(master_seed, i as u64);
        let fresh;
        let train = match policy {
            TrainPolicy::Shared(t) => t,
            TrainPolicy::Fresh(p) => {
                fresh = sample_shot_train(p, horizon, &stream.lane(lane::SHOT_TRAIN))?;
                &fresh
            }
        };
        let ou: OuPath<f64> = match spec.environment {
            EnvironmentNoise::OrnsteinUhlenbeck => sample_ou_path(&ou_params, &stream.lane(lane::OU_PATH))?,
            EnvironmentNoise::Disabled => OuPath::zeros(ou_params),
        };
        match propagate_trajectory_strided(sys, train, &ou, steps.dt, steps.record_stride) {
            Ok(st) => Ok(Some(Sample {
                excited: (0..st.len()).map(|k| st.excited_population(k)).collect(),
                ground: (0..st.len()).map(|k| st.ground_population(k)).collect(),
                coherence: (0..st.len()).map(|k| st.coherence(k)).collect(),
            })),
            Err(DynamicsError::Divergence { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let mut acc = vec![[Welford::default(); 4]; n_rec];
    let mut excluded = 0usize;
    for start in (0..spec.n_traj).step_by(CHUNK) {
        let end = (start + CHUNK).min(spec.n_traj);
        let samples: Vec<Result<Option<Sample>, DynamicsError>> = (start..end).into_par_iter().map(run_one).collect();
        for s in samples {
            match s? {
                Some(s) => {
                    for k in 0..n_rec {
                        let w = &mut acc[k];
                        w[0].push(s.excited[k]);
                        w[1].push(s.ground[k]);
                        w[2].push(s.coherence[k].re);
                        w[3].push(s.coherence[k].im);
                    }
                }
                None => excluded += 1,
            }
        }
    }
    check_exclusions(excluded, spec.n_traj)?;
    if excluded == spec.n_traj {
        return Err(DynamicsError::DivergenceBudget {
            excluded,
            total: spec.n_traj,
        });
    }

    let record_step = steps.record_step();
    let times = (0..n_rec).map(|k| k as f64 * record_step).collect();
    let mut curve = DensityCurve {
        times,
        excited: Vec::with_capacity(n_rec),
        ground: Vec::with_capacity(n_rec),
        coherence: Vec::with_capacity(n_rec),
        stderr: Vec::with_capacity(n_rec),
        n_traj: spec.n_traj - excluded,
        excluded,
        provenance: Provenance::new()
            .with("omega", sys.omega)
            .with("g", sys.g)
            .with("gamma", sys.gamma)
            .with("T", sys.period)
            .with("dt", steps.dt)
            .with("horizon", horizon)
            .with("n_traj", spec.n_traj)
            .with("excluded", excluded)
            .with("master_seed", master_seed)
            .with("train_policy", policy.name())
            .with("environment", spec.environment),
    };
    for w in &acc {
        curve.excited.push(w[0].mean());
        curve.ground.push(w[1].mean());
        curve.coherence.push(Complex64::new(w[2].mean(), w[3].mean()));
        curve.stderr.push(DensityStderr {
            excited: w[0].stderr(),
            ground: w[1].stderr(),
            coherence_re: w[2].stderr(),
            coherence_im: w[3].stderr(),
        });
    }
    Ok(curve)
}
