//! Executes a validated [`ExperimentConfig`] and writes its outputs.
//!
//! Files are first written into a staging directory inside the output
//! directory and moved into place only after every file, including the
//! manifest, has been written.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::config::{validate, ConfigErrors, ExperimentConfig, Mode, TrainPolicyKind};
use super::emit::{render_csv, PlotData, SweepSlice};
use crate::analysis::{
    averaged_fidelity, fig3_sweep, markov_scan, washout_diagnostic, AnalysisError, AveragingSpec, MarkovConfig,
    SweepConfig,
};
use crate::dynamics::{
    crosscheck_conventions, ensemble_density, DynamicsError, EnsembleSpec, EnvironmentNoise, StepConfig,
    SystemParams, TrainPolicy,
};
use crate::noise::{
    ou_statistics, sample_shot_train, sampled_shot_moments, MomentsReport, NoiseError, OuParams, OuStatsReport,
    ShotNoiseParams, ShotTrain,
};
use crate::rng::{lane, RngStream};
use crate::CODE_VERSION;

/// Largest acceptable RMS relative error of the OU autocorrelation.
pub const OU_RMS_TOLERANCE: f64 = 0.05;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigErrors),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("{excluded} of {total} trajectories diverged, above the 1% budget")]
    DivergenceBudget { excluded: usize, total: usize },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Other(String),
}

impl RunError {
    /// 0 is success; 2 validation, 3 divergence budget, 4 i/o, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Validation(_) => 2,
            RunError::DivergenceBudget { .. } => 3,
            RunError::Io(_) => 4,
            RunError::Other(_) => 1,
        }
    }
}

impl From<DynamicsError> for RunError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::DivergenceBudget { excluded, total } => RunError::DivergenceBudget { excluded, total },
            DynamicsError::Parameter { .. } | DynamicsError::Usage(_) => RunError::Validation(e.to_string()),
            DynamicsError::Noise(n) => n.into(),
            DynamicsError::Divergence { .. } => RunError::Other(e.to_string()),
        }
    }
}

impl From<NoiseError> for RunError {
    fn from(e: NoiseError) -> Self {
        RunError::Validation(e.to_string())
    }
}

impl From<AnalysisError> for RunError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Usage(m) => RunError::Validation(m),
            AnalysisError::Dynamics(d) => d.into(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Output directory; falls back to the config's `out_dir`.
    pub out_dir: Option<PathBuf>,
    /// Worker threads; `None` uses every available core.
    pub threads: Option<usize>,
    /// Replaces the manifest's wall-clock field (for reproducibility checks).
    pub wall_clock_override: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub code_version: &'static str,
    pub mode: String,
    pub master_seed: u64,
    pub wall_clock: String,
    pub excluded_trajectories: usize,
    pub config: String,
    pub files: Vec<ManifestEntry>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub manifest: Manifest,
}

struct Outputs {
    files: Vec<(String, String)>,
    excluded: usize,
}

impl Outputs {
    fn csv(&mut self, name: &str, data: &impl PlotData, header: &[String]) {
        self.files.push((name.into(), render_csv(data, header)));
    }

    fn json(&mut self, name: &str, data: &impl Serialize) -> Result<(), RunError> {
        let text = serde_json::to_string_pretty(data).map_err(|e| RunError::Other(e.to_string()))? + "\n";
        self.files.push((name.into(), text));
        Ok(())
    }
}

/// Runs `config` and writes its outputs. Results do not depend on the
/// thread count.
pub fn run(config: &ExperimentConfig, options: &RunOptions) -> Result<RunSummary, RunError> {
    validate(config)?;
    let started = Instant::now();
    let started_at = chrono::Utc::now();
    let outputs = match options.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| RunError::Other(e.to_string()))?
            .install(|| dispatch(config))?,
        None => dispatch(config)?,
    };
    let wall_clock = options.wall_clock_override.clone().unwrap_or_else(|| {
        format!(
            "started {} elapsed {:.3} s",
            started_at.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            started.elapsed().as_secs_f64()
        )
    });
    let manifest = Manifest {
        code_version: CODE_VERSION,
        mode: config.mode.to_string(),
        master_seed: config.master_seed,
        wall_clock,
        excluded_trajectories: outputs.excluded,
        config: config.to_config_text(),
        files: outputs
            .files
            .iter()
            .map(|(name, text)| ManifestEntry {
                file: name.clone(),
                bytes: text.len(),
                sha256: hex(&Sha256::digest(text.as_bytes())),
            })
            .collect(),
    };
    let out_dir = options.out_dir.clone().unwrap_or_else(|| PathBuf::from(&config.out_dir));
    let mut files = outputs.files;
    let manifest_text = serde_json::to_string_pretty(&manifest).map_err(|e| RunError::Other(e.to_string()))? + "\n";
    files.push(("manifest.json".into(), manifest_text));
    let written = write_atomically(&out_dir, &files)?;
    Ok(RunSummary {
        out_dir,
        files: written,
        manifest,
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn with_path(path: &Path, e: io::Error) -> io::Error {
    io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

fn write_atomically(out_dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(out_dir).map_err(|e| with_path(out_dir, e))?;
    let staging = out_dir.join(format!(".staging-{}-{}", std::process::id(), unique_suffix()));
    fs::create_dir(&staging).map_err(|e| with_path(&staging, e))?;
    let result = (|| {
        for (name, text) in files {
            let p = staging.join(name);
            fs::write(&p, text).map_err(|e| with_path(&p, e))?;
        }
        let mut done = Vec::with_capacity(files.len());
        for (name, _) in files {
            let dest = out_dir.join(name);
            fs::rename(staging.join(name), &dest).map_err(|e| with_path(&dest, e))?;
            done.push(dest);
        }
        Ok(done)
    })();
    let _ = fs::remove_dir_all(&staging);
    result.map_err(RunError::Io)
}

fn unique_suffix() -> u128 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_nanos())
}

fn system(c: &ExperimentConfig) -> Result<SystemParams<f64>, RunError> {
    let sys = SystemParams::new(c.omega, c.g, c.gamma, c.period)?;
    Ok(sys)
}

fn noise(c: &ExperimentConfig) -> Result<ShotNoiseParams, RunError> {
    Ok(ShotNoiseParams::new(c.mean_amplitude, c.rate)?.with_law(c.amplitude_law)?)
}

/// The single train used by modes that need one realization.
fn first_train(c: &ExperimentConfig) -> Result<ShotTrain<f64>, RunError> {
    let stream = RngStream::new(c.master_seed, 0).lane(lane::SHOT_TRAIN);
    Ok(sample_shot_train(&noise(c)?, c.horizon, &stream)?)
}

fn header(c: &ExperimentConfig, what: &str) -> Vec<String> {
    let mut h = vec![
        format!("washout {CODE_VERSION}"),
        format!("output: {what}"),
        format!("mode: {}", c.mode),
        format!("master_seed: {}", c.master_seed),
    ];
    h.extend(c.to_config_text().lines().map(|l| format!("config: {l}")));
    h
}

fn excluded_of(p: &crate::provenance::Provenance) -> usize {
    p.get("excluded").and_then(|v| v.as_u64()).unwrap_or(0) as usize
}

fn dispatch(c: &ExperimentConfig) -> Result<Outputs, RunError> {
    let mut out = Outputs {
        files: vec![],
        excluded: 0,
    };
    let sys = system(c)?;
    match c.mode {
        Mode::Simulate => {
            let spec = AveragingSpec {
                n_trains: c.n_trains,
                steps: StepConfig::new(c.dt, c.horizon).with_stride(c.record_stride()),
                convention: c.fidelity_convention,
            };
            let noisy = averaged_fidelity(&sys, &noise(c)?, &spec, c.master_seed)?;
            let free = averaged_fidelity(&sys, &ShotNoiseParams::silent(), &spec, c.master_seed)?;
            out.excluded += excluded_of(&noisy.provenance);
            out.csv("fidelity.csv", &noisy, &header(c, "control-averaged fidelity"));
            out.csv("fidelity_free.csv", &free, &header(c, "free-dynamics fidelity"));
            if c.density {
                let policy = match c.train_policy {
                    TrainPolicyKind::Shared => TrainPolicy::Shared(first_train(c)?),
                    TrainPolicyKind::Fresh => TrainPolicy::Fresh(noise(c)?),
                };
                let spec = EnsembleSpec {
                    n_traj: c.n_traj,
                    steps: StepConfig::new(c.dt, c.horizon).with_stride(c.record_stride()),
                    environment: EnvironmentNoise::OrnsteinUhlenbeck,
                };
                let rho = ensemble_density(&sys, &policy, &spec, c.master_seed)?;
                out.excluded += rho.excluded;
                out.csv("density.csv", &rho, &header(c, "ensemble density matrix"));
            }
        }
        Mode::Sweep => {
            let cfg = SweepConfig {
                amplitudes: c.j_values.clone(),
                rates_per_period: c.w_values.iter().map(|w| w * c.period).collect(),
                probe_periods: c.probe_times.iter().map(|t| t / c.period).collect(),
                law: c.amplitude_law,
                n_traj: c.n_traj,
                dt: c.dt,
                convention: c.fidelity_convention,
            };
            let grid = fig3_sweep(&sys, &cfg, c.master_seed)?;
            for (i, &t) in c.probe_times.iter().enumerate() {
                let slice = SweepSlice {
                    grid: &grid,
                    probe: i,
                    period: c.period,
                };
                let name = format!("sweep_t{}.csv", label(t / c.period));
                out.csv(&name, &slice, &header(c, &format!("sweep at t = {t}")));
            }
            out.json("plateau.json", &grid.plateau)?;
        }
        Mode::MarkovScan => {
            let cfg = MarkovConfig {
                gammas: c.gamma_values.clone(),
                noise: noise(c)?,
                probe_periods: c.t_probe / c.period,
                n_trains: c.n_trains,
                dt: c.dt,
                convention: c.fidelity_convention,
            };
            let scan = markov_scan(&sys, &cfg, c.master_seed)?;
            out.csv("markov.csv", &scan, &header(c, "suppression gain versus gamma"));
            out.json("markov.json", &scan)?;
        }
        Mode::Washout => {
            let train = first_train(c)?;
            let series = washout_diagnostic(&sys, &train, c.dt, c.horizon, c.record_stride())?;
            let mut h = header(c, "washout integrand");
            h.push(format!("kicks: {}", series.kicks));
            h.push(format!("final |I|: {}", series.final_magnitude()));
            out.csv("washout.csv", &series, &h);
        }
        Mode::NoiseTest => {
            let report = noise_test(c)?;
            out.json("noise_test.json", &report)?;
        }
        Mode::Crosscheck => {
            let train = first_train(c)?;
            let report = crosscheck_conventions(&sys, &train, c.dt, c.horizon, c.record_stride())?;
            out.csv("crosscheck.csv", &report, &header(c, "fidelity convention cross-check"));
            out.json("crosscheck.json", &report)?;
        }
    }
    Ok(out)
}

/// `50` for whole periods, otherwise the shortest exact decimal.
fn label(periods: f64) -> String {
    if periods.fract() == 0.0 && periods.abs() < 1e15 {
        format!("{}T", periods as i64)
    } else {
        format!("{periods}T")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OuCheck {
    pub rms_tolerance: f64,
    pub autocorrelation_ok: bool,
    pub mean_ok: bool,
    pub report: OuStatsReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoiseTestReport {
    pub shot: MomentsReport,
    pub ou: OuCheck,
    pub passed: bool,
}

fn noise_test(c: &ExperimentConfig) -> Result<NoiseTestReport, RunError> {
    let shot = sampled_shot_moments(&noise(c)?, c.horizon, c.n_trains, c.master_seed)?;
    let n_steps = (c.ou_horizon / c.ou_dt).round() as usize;
    let params = OuParams::new(c.gamma, c.ou_dt, n_steps)?;
    let lag_max_steps = ((c.max_lag / c.ou_dt).round() as usize).min(n_steps);
    let lag_stride = (lag_max_steps / 50).max(1);
    let lags: Vec<usize> = (0..=lag_max_steps).step_by(lag_stride).collect();
    // reference times every quarter time unit; far below the correlation time
    let ref_stride = ((0.25 / c.ou_dt).round() as usize).max(1);
    let probes = vec![0, n_steps / 2, n_steps];
    let report = ou_statistics(&params, c.n_paths, c.master_seed, &lags, ref_stride, &probes)?;
    let ou = OuCheck {
        rms_tolerance: OU_RMS_TOLERANCE,
        autocorrelation_ok: report.rms_relative_error < OU_RMS_TOLERANCE,
        mean_ok: report.mean_consistent_with_zero,
        report,
    };
    let passed = shot.all_passed() && ou.autocorrelation_ok && ou.mean_ok;
    Ok(NoiseTestReport { shot, ou, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(label(50.0), "50T");
        assert_eq!(label(0.5), "0.5T");
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            RunError::Validation("x".into()).exit_code(),
            RunError::DivergenceBudget { excluded: 2, total: 3 }.exit_code(),
            RunError::Io(io::Error::other("x")).exit_code(),
            RunError::Other("x".into()).exit_code(),
        ];
        assert_eq!(codes, [2, 3, 4, 1]);
    }
}
