//! Complex Ornstein-Uhlenbeck environment noise.
//!
//! The path stores `z*_t` on a uniform grid and is advanced with
//!
//! ```text
//! z*_{t+dt} = z*_t - γ z*_t dt + sqrt(dt/2) γ w*,   w* = w1 + i w2,
//! ```
//!
//! with `w1`, `w2` independent standard normals. Then `E|w*|² = 2` and the
//! stationary second moment is `(dt γ²/2)·2 / (2γ dt) = γ/2` to first order in
//! `γ dt`, which is `G(t, t)` for `G(t, s) = (γ/2) e^{-γ|t-s|}`.

use num_complex::{Complex, Complex64};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{require, NoiseError};
use crate::rng::{lane, RngStream};
use crate::scalar::Real;

pub const DEFAULT_MAX_GAMMA_DT: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuParams {
    pub gamma: f64,
    pub dt: f64,
    pub n_steps: usize,
    /// Upper bound on `γ dt`.
    pub max_gamma_dt: f64,
}

impl OuParams {
    pub fn new(gamma: f64, dt: f64, n_steps: usize) -> Result<Self, NoiseError> {
        let p = Self {
            gamma,
            dt,
            n_steps,
            max_gamma_dt: DEFAULT_MAX_GAMMA_DT,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        require("gamma", self.gamma, self.gamma > 0.0, "must be positive")?;
        require("dt", self.dt, self.dt > 0.0, "must be positive")?;
        require("n_steps", self.n_steps as f64, self.n_steps >= 1, "must be at least 1")?;
        require(
            "dt",
            self.dt,
            self.gamma * self.dt <= self.max_gamma_dt,
            "gamma * dt exceeds the stability bound",
        )
    }

    /// `G(τ) = (γ/2) e^{-γ|τ|}`.
    pub fn correlation(&self, lag: f64) -> f64 {
        0.5 * self.gamma * (-self.gamma * lag.abs()).exp()
    }
}

/// One realization `z*_0 … z*_{n_steps}`.
#[derive(Clone, Debug, PartialEq)]
pub struct OuPath<T> {
    pub values: Vec<Complex<T>>,
    pub params: OuParams,
}

impl<T: Real> OuPath<T> {
    /// The identically-zero path, for runs without environment noise.
    pub fn zeros(params: OuParams) -> Self {
        Self {
            values: vec![Complex::new(T::zero(), T::zero()); params.n_steps + 1],
            params,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Samples one path with a stationary start, `E|z*_0|² = γ/2`.
pub fn sample_ou_path<T: Real>(params: &OuParams, stream: &RngStream) -> Result<OuPath<T>, NoiseError> {
    params.validate()?;
    let mut rng = stream.rng();
    let raw = ou_path_f64(params, &mut rng);
    Ok(OuPath {
        values: raw.into_iter().map(|z| Complex::new(T::lit(z.re), T::lit(z.im))).collect(),
        params: *params,
    })
}

fn ou_path_f64<R: Rng + ?Sized>(params: &OuParams, rng: &mut R) -> Vec<Complex64> {
    let mut normal = || -> f64 { StandardNormal.sample(rng) };
    let g = params.gamma;
    let decay = 1.0 - g * params.dt;
    let kick = (params.dt / 2.0).sqrt() * g;
    let start = (g / 4.0).sqrt();
    let mut z = Complex64::new(start * normal(), start * normal());
    let mut values = Vec::with_capacity(params.n_steps + 1);
    values.push(z);
    for _ in 0..params.n_steps {
        let w = Complex64::new(normal(), normal());
        z = z * decay + w * kick;
        values.push(z);
    }
    values
}

/// Ensemble statistics of many OU paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuStatsReport {
    pub params: OuParams,
    pub n_paths: usize,
    pub lags: Vec<f64>,
    /// Estimated `E[z_{t+τ} z*_t]` (real part) per lag, averaged over paths
    /// and over reference times.
    pub autocorrelation: Vec<f64>,
    pub autocorrelation_imag: Vec<f64>,
    pub target: Vec<f64>,
    pub rms_relative_error: f64,
    pub probe_times: Vec<f64>,
    pub mean_re: Vec<f64>,
    pub mean_im: Vec<f64>,
    pub mean_stderr: Vec<f64>,
    /// `E|z_t|²` at each probe time with its standard error.
    pub second_moment: Vec<f64>,
    pub second_moment_stderr: Vec<f64>,
    /// Every probed mean is within 3 standard errors of zero (per component).
    pub mean_consistent_with_zero: bool,
}

#[derive(Clone, Default)]
struct PathSums {
    lag_sum: Vec<Complex64>,
    lag_count: Vec<usize>,
    probe: Vec<Complex64>,
}

/// Runs `n_paths` independent paths (path `i` uses substream `i` of
/// `master_seed`) and reduces them in path order, so the report does not
/// depend on the worker count.
///
/// Lags and probes are given in grid steps; the autocorrelation at each lag
/// is averaged over reference steps `0, ref_stride, 2·ref_stride, …`.
pub fn ou_statistics(
    params: &OuParams,
    n_paths: usize,
    master_seed: u64,
    lag_steps: &[usize],
    ref_stride: usize,
    probe_steps: &[usize],
) -> Result<OuStatsReport, NoiseError> {
    params.validate()?;
    if n_paths < 2 {
        return Err(NoiseError::Usage("need at least two paths".into()));
    }
    if ref_stride == 0 {
        return Err(NoiseError::Usage("reference stride must be positive".into()));
    }
    if let Some(&bad) = lag_steps.iter().chain(probe_steps).find(|&&s| s > params.n_steps) {
        return Err(NoiseError::Usage(format!("step {bad} exceeds path length {}", params.n_steps)));
    }

    const CHUNK: usize = 256;
    let mut lag_sum = vec![Complex64::new(0.0, 0.0); lag_steps.len()];
    let mut lag_count = vec![0usize; lag_steps.len()];
    let mut probe_values: Vec<Vec<Complex64>> = vec![Vec::with_capacity(n_paths); probe_steps.len()];

    for chunk_start in (0..n_paths).step_by(CHUNK) {
        let chunk_end = (chunk_start + CHUNK).min(n_paths);
        let partial: Vec<PathSums> = (chunk_start..chunk_end)
            .into_par_iter()
            .map(|i| {
                let mut rng = RngStream::new(master_seed, i as u64).lane(lane::OU_PATH).rng();
                let path = ou_path_f64(params, &mut rng);
                let mut sums = PathSums {
                    lag_sum: vec![Complex64::new(0.0, 0.0); lag_steps.len()],
                    lag_count: vec![0; lag_steps.len()],
                    probe: probe_steps.iter().map(|&s| path[s]).collect(),
                };
                for (li, &lag) in lag_steps.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut count = 0;
                    let mut t0 = 0;
                    while t0 + lag <= params.n_steps {
                        // values are z*, so z_{t0+lag} z*_{t0} = conj(v[t0+lag]) v[t0]
                        acc += path[t0 + lag].conj() * path[t0];
                        count += 1;
                        t0 += ref_stride;
                    }
                    sums.lag_sum[li] = acc;
                    sums.lag_count[li] = count;
                }
                sums
            })
            .collect();
        for sums in partial {
            for li in 0..lag_steps.len() {
                lag_sum[li] += sums.lag_sum[li];
                lag_count[li] += sums.lag_count[li];
            }
            for (pi, z) in sums.probe.into_iter().enumerate() {
                probe_values[pi].push(z);
            }
        }
    }

    let lags: Vec<f64> = lag_steps.iter().map(|&l| l as f64 * params.dt).collect();
    let autocorrelation: Vec<f64> = lag_sum
        .iter()
        .zip(&lag_count)
        .map(|(s, &c)| s.re / c as f64)
        .collect();
    let autocorrelation_imag = lag_sum.iter().zip(&lag_count).map(|(s, &c)| s.im / c as f64).collect();
    let target: Vec<f64> = lags.iter().map(|&l| params.correlation(l)).collect();
    let rms_relative_error = if lags.is_empty() {
        0.0
    } else {
        (autocorrelation
            .iter()
            .zip(&target)
            .map(|(a, t)| ((a - t) / t).powi(2))
            .sum::<f64>()
            / lags.len() as f64)
            .sqrt()
    };

    let n = n_paths as f64;
    let mut mean_re = Vec::new();
    let mut mean_im = Vec::new();
    let mut mean_stderr = Vec::new();
    let mut second_moment = Vec::new();
    let mut second_moment_stderr = Vec::new();
    let mut consistent = true;
    for vals in &probe_values {
        let m = vals.iter().sum::<Complex64>() / n;
        let var_re = vals.iter().map(|z| (z.re - m.re).powi(2)).sum::<f64>() / (n - 1.0);
        let var_im = vals.iter().map(|z| (z.im - m.im).powi(2)).sum::<f64>() / (n - 1.0);
        let se = ((var_re + var_im) / 2.0 / n).sqrt();
        consistent &= m.re.abs() <= 3.0 * (var_re / n).sqrt() && m.im.abs() <= 3.0 * (var_im / n).sqrt();
        let sq: Vec<f64> = vals.iter().map(|z| z.norm_sqr()).collect();
        let (msq, msq_se) = super::shot::mean_and_stderr(&sq);
        mean_re.push(m.re);
        mean_im.push(m.im);
        mean_stderr.push(se);
        second_moment.push(msq);
        second_moment_stderr.push(msq_se);
    }

    Ok(OuStatsReport {
        params: *params,
        n_paths,
        lags,
        autocorrelation,
        autocorrelation_imag,
        target,
        rms_relative_error,
        probe_times: probe_steps.iter().map(|&s| s as f64 * params.dt).collect(),
        mean_re,
        mean_im,
        mean_stderr,
        second_moment,
        second_moment_stderr,
        mean_consistent_with_zero: consistent,
    })
}
