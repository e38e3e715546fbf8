//! `(J, W)` grid of averaged fidelities at fixed probe times.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{averaged_fidelity, probe_stride, strictly_increasing, AnalysisError, AveragingSpec};
use crate::dynamics::{FidelityConvention, StepConfig, SystemParams};
use crate::noise::{AmplitudeLaw, ShotNoiseParams};

/// Cells above this fidelity are flagged.
pub const HIGH_FIDELITY: f64 = 0.99;
/// A cell is on the plateau when within this distance of the largest-`W` value.
pub const PLATEAU_TOLERANCE: f64 = 0.005;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    /// `J` values (units of ω), strictly increasing.
    pub amplitudes: Vec<f64>,
    /// `W` values in units of `1/T`, strictly increasing.
    pub rates_per_period: Vec<f64>,
    /// Probe times in units of `T`, strictly increasing.
    pub probe_periods: Vec<f64>,
    pub law: AmplitudeLaw,
    pub n_traj: usize,
    pub dt: f64,
    pub convention: FidelityConvention,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let lin = |a: f64, b: f64, n: usize| (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        Self {
            amplitudes: lin(0.0, 20.0, 16),
            rates_per_period: lin(50.0, 1200.0, 16),
            probe_periods: vec![50.0, 100.0],
            law: AmplitudeLaw::Exponential,
            n_traj: 2000,
            dt: 1e-3,
            convention: FidelityConvention::QExponent,
        }
    }
}

/// Smallest `W` from which every larger grid `W` stays within
/// [`PLATEAU_TOLERANCE`] of the value at the largest `W`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlateauOnset {
    pub amplitude: f64,
    pub probe_period: f64,
    pub rate_per_period: f64,
    pub plateau_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub amplitudes: Vec<f64>,
    pub rates_per_period: Vec<f64>,
    pub probe_periods: Vec<f64>,
    /// Row-major `[J][W][t]`.
    pub fidelity: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_traj: usize,
    pub plateau: Vec<PlateauOnset>,
}

impl SweepGrid {
    fn index(&self, j: usize, w: usize, t: usize) -> usize {
        (j * self.rates_per_period.len() + w) * self.probe_periods.len() + t
    }

    pub fn fidelity_at(&self, j: usize, w: usize, t: usize) -> f64 {
        self.fidelity[self.index(j, w, t)]
    }

    pub fn stderr_at(&self, j: usize, w: usize, t: usize) -> f64 {
        self.stderr[self.index(j, w, t)]
    }

    pub fn above_threshold(&self, j: usize, w: usize, t: usize) -> bool {
        self.fidelity_at(j, w, t) > HIGH_FIDELITY
    }
}

pub fn fig3_sweep(
    sys: &SystemParams<f64>,
    config: &SweepConfig,
    master_seed: u64,
) -> Result<SweepGrid, AnalysisError> {
    sys.validate()?;
    strictly_increasing("J values", &config.amplitudes)?;
    strictly_increasing("W values", &config.rates_per_period)?;
    strictly_increasing("probe times", &config.probe_periods)?;
    if config.n_traj == 0 {
        return Err(AnalysisError::Usage("n_traj must be at least 1".into()));
    }
    let probes: Vec<f64> = config.probe_periods.iter().map(|p| p * sys.period).collect();
    let stride = probe_stride(config.dt, &probes)?;
    let horizon = *probes.last().expect("non-empty");
    let spec = AveragingSpec {
        n_trains: config.n_traj,
        steps: StepConfig::new(config.dt, horizon).with_stride(stride),
        convention: config.convention,
    };
    let probe_index: Vec<usize> = probes.iter().map(|p| (p / (config.dt * stride as f64)).round() as usize).collect();

    let cells: Vec<(f64, f64)> = config
        .amplitudes
        .iter()
        .flat_map(|&j| config.rates_per_period.iter().map(move |&w| (j, w)))
        .collect();
    let results: Vec<Result<(Vec<f64>, Vec<f64>), AnalysisError>> = cells
        .par_iter()
        .map(|&(j, w)| {
            let noise = ShotNoiseParams::new(j, w / sys.period)?.with_law(config.law)?;
            let curve = averaged_fidelity(sys, &noise, &spec, master_seed)?;
            let se = curve.stderr.as_ref().expect("averaged curves carry stderr");
            Ok((
                probe_index.iter().map(|&k| curve.values[k]).collect(),
                probe_index.iter().map(|&k| se[k]).collect(),
            ))
        })
        .collect();

    let mut fidelity = Vec::with_capacity(cells.len() * probes.len());
    let mut stderr = Vec::with_capacity(cells.len() * probes.len());
    for r in results {
        let (f, s) = r?;
        fidelity.extend(f);
        stderr.extend(s);
    }
    let mut grid = SweepGrid {
        amplitudes: config.amplitudes.clone(),
        rates_per_period: config.rates_per_period.clone(),
        probe_periods: config.probe_periods.clone(),
        fidelity,
        stderr,
        n_traj: config.n_traj,
        plateau: Vec::new(),
    };
    grid.plateau = plateau_onsets(&grid);
    Ok(grid)
}

fn plateau_onsets(grid: &SweepGrid) -> Vec<PlateauOnset> {
    let nw = grid.rates_per_period.len();
    let mut out = Vec::new();
    for (ji, &j) in grid.amplitudes.iter().enumerate() {
        for (ti, &t) in grid.probe_periods.iter().enumerate() {
            let plateau = grid.fidelity_at(ji, nw - 1, ti);
            let mut onset = nw - 1;
            while onset > 0 && (grid.fidelity_at(ji, onset - 1, ti) - plateau).abs() <= PLATEAU_TOLERANCE {
                onset -= 1;
            }
            out.push(PlateauOnset {
                amplitude: j,
                probe_period: t,
                rate_per_period: grid.rates_per_period[onset],
                plateau_value: plateau,
            });
        }
    }
    out
}
