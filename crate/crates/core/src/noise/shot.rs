use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{require, NoiseError};
use crate::rng::{lane, RngStream};
use crate::scalar::Real;
use crate::stats::Welford;

/// Distribution of the kick heights `x_j`. Every law has mean `J`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum AmplitudeLaw {
    /// Exponential with mean `J`; second moment `2J²`.
    Exponential,
    /// Every kick has height exactly `J`.
    Constant,
    /// Gamma with the given shape and mean `J`; second moment `J²(1 + 1/shape)`.
    Gamma { shape: f64 },
}

impl Default for AmplitudeLaw {
    fn default() -> Self {
        Self::Exponential
    }
}

impl AmplitudeLaw {
    /// `M[x_j²]` for mean `j`.
    pub fn second_moment(&self, j: f64) -> f64 {
        match *self {
            Self::Exponential => 2.0 * j * j,
            Self::Constant => j * j,
            Self::Gamma { shape } => j * j * (1.0 + 1.0 / shape),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, j: f64, rng: &mut R) -> f64 {
        loop {
            let x = match *self {
                Self::Exponential => {
                    let e: f64 = Exp1.sample(rng);
                    j * e
                }
                Self::Constant => j,
                Self::Gamma { shape } => Gamma::new(shape, j / shape)
                    .expect("shape validated")
                    .sample(rng),
            };
            if x > 0.0 {
                return x;
            }
        }
    }
}

impl fmt::Display for AmplitudeLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential => f.write_str("exponential"),
            Self::Constant => f.write_str("constant"),
            Self::Gamma { shape } => write!(f, "gamma:{shape:?}"),
        }
    }
}

impl FromStr for AmplitudeLaw {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "exponential" => Ok(Self::Exponential),
            "constant" => Ok(Self::Constant),
            other => {
                let shape = other
                    .strip_prefix("gamma:")
                    .ok_or_else(|| format!("unknown amplitude law `{other}` (expected exponential, constant or gamma:<shape>)"))?;
                let shape: f64 = shape
                    .trim()
                    .parse()
                    .map_err(|_| format!("gamma shape `{shape}` is not a number"))?;
                if shape > 0.0 && shape.is_finite() {
                    Ok(Self::Gamma { shape })
                } else {
                    Err(format!("gamma shape must be positive, got {shape}"))
                }
            }
        }
    }
}

/// Mean kick height `J` (dimensionless phase), mean arrival rate `W` and the
/// kick-height law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotNoiseParams {
    pub mean_amplitude: f64,
    pub rate: f64,
    pub law: AmplitudeLaw,
}

impl ShotNoiseParams {
    pub fn new(mean_amplitude: f64, rate: f64) -> Result<Self, NoiseError> {
        let p = Self {
            mean_amplitude,
            rate,
            law: AmplitudeLaw::Exponential,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_law(mut self, law: AmplitudeLaw) -> Result<Self, NoiseError> {
        self.law = law;
        self.validate()?;
        Ok(self)
    }

    /// No control field at all.
    pub fn silent() -> Self {
        Self {
            mean_amplitude: 0.0,
            rate: 0.0,
            law: AmplitudeLaw::Exponential,
        }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        require("J", self.mean_amplitude, self.mean_amplitude >= 0.0, "must be non-negative")?;
        require("W", self.rate, self.rate >= 0.0, "must be non-negative")?;
        if let AmplitudeLaw::Gamma { shape } = self.law {
            require("amplitude_law", shape, shape > 0.0, "gamma shape must be positive")?;
        }
        Ok(())
    }

    /// `M[c(t)] = J W`.
    pub fn mean_drive(&self) -> f64 {
        self.mean_amplitude * self.rate
    }

    /// True when every sampled train is empty.
    pub fn is_silent(&self) -> bool {
        self.rate == 0.0 || self.mean_amplitude == 0.0
    }
}

/// One delta kick `x δ(t - t_j)` of the control field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kick<T> {
    pub time: T,
    pub amplitude: T,
}

/// One realization of `c(t) = Σ x_j δ(t - t_j)` on `[0, horizon)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotTrain<T> {
    horizon: T,
    arrivals: Vec<Kick<T>>,
}

impl<T: Real> ShotTrain<T> {
    /// Builds a train from explicit kicks, checking ordering and positivity.
    pub fn new(horizon: T, arrivals: Vec<Kick<T>>) -> Result<Self, NoiseError> {
        require("horizon", horizon.to_f64_lossy(), horizon > T::zero(), "must be positive")?;
        let mut last: Option<T> = None;
        for k in &arrivals {
            if k.time < T::zero() || k.time >= horizon {
                return Err(NoiseError::Usage(format!(
                    "kick at t = {} lies outside [0, {})",
                    k.time, horizon
                )));
            }
            if last.is_some_and(|l| k.time <= l) {
                return Err(NoiseError::Usage("kick times must be strictly increasing".into()));
            }
            if !(k.amplitude > T::zero()) {
                return Err(NoiseError::Usage(format!(
                    "kick amplitude must be positive, got {}",
                    k.amplitude
                )));
            }
            last = Some(k.time);
        }
        Ok(Self { horizon, arrivals })
    }

    pub fn empty(horizon: T) -> Self {
        Self {
            horizon,
            arrivals: Vec::new(),
        }
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn arrivals(&self) -> &[Kick<T>] {
        &self.arrivals
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    pub fn total_amplitude(&self) -> f64 {
        self.arrivals.iter().map(|k| k.amplitude.to_f64_lossy()).sum()
    }

    /// Time average of `c` over the horizon: total kick height / horizon.
    pub fn mean_drive(&self) -> f64 {
        self.total_amplitude() / self.horizon.to_f64_lossy()
    }

    /// Number of arrivals with `a <= t_j < b`.
    pub fn count_in(&self, a: T, b: T) -> usize {
        let lo = self.arrivals.partition_point(|k| k.time < a);
        let hi = self.arrivals.partition_point(|k| k.time < b);
        hi.saturating_sub(lo)
    }
}

/// Draws one train: exponential gaps with mean `1/W`, heights from the
/// configured law. Sampling happens in `f64`; kicks that coincide after the
/// conversion to `T` are merged.
pub fn sample_shot_train<T: Real>(
    params: &ShotNoiseParams,
    horizon: T,
    stream: &RngStream,
) -> Result<ShotTrain<T>, NoiseError> {
    params.validate()?;
    let h = horizon.to_f64_lossy();
    require("horizon", h, h > 0.0, "must be positive")?;
    if params.is_silent() {
        return Ok(ShotTrain::empty(horizon));
    }
    let mut rng = stream.rng();
    let mut arrivals: Vec<Kick<T>> = Vec::with_capacity((params.rate * h * 1.1) as usize + 8);
    let mut t = 0.0_f64;
    loop {
        let gap: f64 = Exp1.sample(&mut rng);
        t += gap / params.rate;
        if t >= h {
            break;
        }
        let x = params.law.sample(params.mean_amplitude, &mut rng);
        let time = T::lit(t);
        match arrivals.last_mut() {
            Some(last) if time <= last.time => last.amplitude += T::lit(x),
            _ if time >= horizon => break,
            _ => arrivals.push(Kick {
                time,
                amplitude: T::lit(x),
            }),
        }
    }
    Ok(ShotTrain { horizon, arrivals })
}

/// One named comparison between an empirical moment and its target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    /// Absolute tolerance that was applied.
    pub tolerance: f64,
    pub passed: bool,
}

impl MomentCheck {
    fn new(name: &str, observed: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_owned(),
            observed,
            expected,
            tolerance,
            passed: (observed - expected).abs() <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentsReport {
    pub n_trains: usize,
    pub horizon: f64,
    pub params: ShotNoiseParams,
    pub total_kicks: usize,
    pub expected_rate: f64,
    pub empirical_rate: f64,
    pub rate_stderr: f64,
    pub empirical_mean_amplitude: Option<f64>,
    pub mean_amplitude_stderr: Option<f64>,
    pub empirical_second_moment: Option<f64>,
    pub expected_second_moment: f64,
    /// Target `J W`.
    pub expected_mean_drive: f64,
    pub empirical_mean_drive: f64,
    pub mean_drive_stderr: f64,
    pub checks: Vec<MomentCheck>,
}

impl MomentsReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&MomentCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const MIN_TRAINS_FOR_MOMENTS: usize = 100;

/// Empirical moments of a batch of trains compared against `W`, `J`,
/// `M[x²]` and `J W`.
///
/// Rate and mean height are checked at 2% relative, the second moment at 5%
/// relative and the drive mean at three standard errors.
pub fn shot_train_moments<T: Real>(
    trains: &[ShotTrain<T>],
    params: &ShotNoiseParams,
) -> Result<MomentsReport, NoiseError> {
    let Some(first) = trains.first() else {
        return Err(too_few(0));
    };
    let horizon = first.horizon;
    if trains.iter().any(|t| t.horizon != horizon) {
        return Err(NoiseError::Usage("all trains must share one horizon".into()));
    }
    let mut acc = MomentAccumulator::new(horizon.to_f64_lossy());
    trains.iter().for_each(|t| acc.push(TrainSummary::of(t)));
    acc.finish(params)
}

/// Same report as [`shot_train_moments`] for `n_trains` freshly sampled trains,
/// without keeping them in memory. Train `i` is drawn from
/// `RngStream::new(master_seed, i).lane(lane::SHOT_TRAIN)`.
pub fn sampled_shot_moments(
    params: &ShotNoiseParams,
    horizon: f64,
    n_trains: usize,
    master_seed: u64,
) -> Result<MomentsReport, NoiseError> {
    const CHUNK: usize = 256;
    params.validate()?;
    let mut acc = MomentAccumulator::new(horizon);
    for start in (0..n_trains).step_by(CHUNK) {
        let batch: Vec<Result<TrainSummary, NoiseError>> = (start..(start + CHUNK).min(n_trains))
            .into_par_iter()
            .map(|i| {
                let stream = RngStream::new(master_seed, i as u64).lane(lane::SHOT_TRAIN);
                sample_shot_train::<f64>(params, horizon, &stream).map(|t| TrainSummary::of(&t))
            })
            .collect();
        for s in batch {
            acc.push(s?);
        }
    }
    acc.finish(params)
}

fn too_few(n: usize) -> NoiseError {
    NoiseError::Usage(format!("need at least {MIN_TRAINS_FOR_MOMENTS} trains, got {n}"))
}

#[derive(Clone, Copy, Debug)]
struct TrainSummary {
    kicks: usize,
    sum: f64,
    sum_sq: f64,
}

impl TrainSummary {
    fn of<T: Real>(train: &ShotTrain<T>) -> Self {
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for k in &train.arrivals {
            let x = k.amplitude.to_f64_lossy();
            sum += x;
            sum_sq += x * x;
        }
        Self {
            kicks: train.len(),
            sum,
            sum_sq,
        }
    }
}

struct MomentAccumulator {
    horizon: f64,
    rates: Welford,
    drives: Welford,
    total_kicks: usize,
    s1: f64,
    s2: f64,
}

impl MomentAccumulator {
    fn new(horizon: f64) -> Self {
        Self {
            horizon,
            rates: Welford::default(),
            drives: Welford::default(),
            total_kicks: 0,
            s1: 0.0,
            s2: 0.0,
        }
    }

    fn push(&mut self, s: TrainSummary) {
        self.rates.push(s.kicks as f64 / self.horizon);
        self.drives.push(s.sum / self.horizon);
        self.total_kicks += s.kicks;
        self.s1 += s.sum;
        self.s2 += s.sum_sq;
    }

    fn finish(self, params: &ShotNoiseParams) -> Result<MomentsReport, NoiseError> {
        let n_trains = self.rates.count() as usize;
        if n_trains < MIN_TRAINS_FOR_MOMENTS {
            return Err(too_few(n_trains));
        }
        let (mut m1, mut m2, mut m1_stderr) = (None, None, None);
        if self.total_kicks > 0 {
            let k = self.total_kicks as f64;
            let mean = self.s1 / k;
            let var = if self.total_kicks > 1 { (self.s2 - k * mean * mean) / (k - 1.0) } else { 0.0 };
            m1 = Some(mean);
            m2 = Some(self.s2 / k);
            m1_stderr = Some((var.max(0.0) / k).sqrt());
        }

        let j = params.mean_amplitude;
        let w = params.rate;
        let expected_second_moment = params.law.second_moment(j);
        let mut checks = vec![
            MomentCheck::new("rate", self.rates.mean(), w, 0.02 * w),
            MomentCheck::new(
                "mean_drive",
                self.drives.mean(),
                params.mean_drive(),
                3.0 * self.drives.stderr(),
            ),
        ];
        if let (Some(m1), Some(m2)) = (m1, m2) {
            checks.push(MomentCheck::new("mean_amplitude", m1, j, 0.02 * j));
            checks.push(MomentCheck::new(
                "second_moment",
                m2,
                expected_second_moment,
                0.05 * expected_second_moment,
            ));
        }

        Ok(MomentsReport {
            n_trains,
            horizon: self.horizon,
            params: *params,
            total_kicks: self.total_kicks,
            expected_rate: w,
            empirical_rate: self.rates.mean(),
            rate_stderr: self.rates.stderr(),
            empirical_mean_amplitude: m1,
            mean_amplitude_stderr: m1_stderr,
            empirical_second_moment: m2,
            expected_second_moment,
            expected_mean_drive: params.mean_drive(),
            empirical_mean_drive: self.drives.mean(),
            mean_drive_stderr: self.drives.stderr(),
            checks,
        })
    }
}

/// Mean/variance check of arrival counts on `[a, b)` against the Poisson law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountLawCheck {
    pub expected: f64,
    pub mean: f64,
    pub mean_stderr: f64,
    pub variance: f64,
    pub variance_stderr: f64,
    pub mean_ok: bool,
    pub variance_ok: bool,
}

pub fn count_law_check<T: Real>(trains: &[ShotTrain<T>], a: T, b: T, rate: f64) -> CountLawCheck {
    let counts: Vec<f64> = trains.iter().map(|t| t.count_in(a, b) as f64).collect();
    let n = counts.len() as f64;
    let expected = rate * (b - a).to_f64_lossy();
    let mean = counts.iter().sum::<f64>() / n;
    let variance = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = counts.iter().map(|c| (c - mean).powi(4)).sum::<f64>() / n;
    // Large-sample standard error of the unbiased sample variance.
    let variance_stderr = ((m4 - variance * variance * (n - 3.0) / (n - 1.0)) / n).max(0.0).sqrt();
    let mean_stderr = (expected / n).sqrt();
    CountLawCheck {
        expected,
        mean,
        mean_stderr,
        variance,
        variance_stderr,
        mean_ok: (mean - expected).abs() <= 3.0 * mean_stderr,
        variance_ok: (variance - expected).abs() <= 3.0 * variance_stderr,
    }
}

pub(crate) fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_gives_empty_train() {
        let p = ShotNoiseParams::new(3.0, 0.0).unwrap();
        for i in 0..10 {
            let t: ShotTrain<f64> = sample_shot_train(&p, 50.0, &RngStream::new(9, i)).unwrap();
            assert!(t.is_empty());
            assert_eq!(t.mean_drive(), 0.0);
        }
    }

    #[test]
    fn negative_parameters_rejected() {
        let err = ShotNoiseParams::new(-1.0, 10.0).unwrap_err();
        assert!(matches!(err, NoiseError::Parameter { name: "J", .. }));
        let err = ShotNoiseParams::new(1.0, -1.0).unwrap_err();
        assert!(matches!(err, NoiseError::Parameter { name: "W", .. }));
        let p = ShotNoiseParams { mean_amplitude: 1.0, rate: 1.0, law: AmplitudeLaw::Exponential };
        assert!(sample_shot_train::<f64>(&p, 0.0, &RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn sampled_train_satisfies_invariants() {
        let p = ShotNoiseParams::new(15.0, 200.0).unwrap();
        let t: ShotTrain<f64> = sample_shot_train(&p, 10.0, &RngStream::new(1, 3)).unwrap();
        assert!(t.len() > 1000);
        let rebuilt = ShotTrain::new(t.horizon(), t.arrivals().to_vec()).unwrap();
        assert_eq!(rebuilt, t);
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = ShotNoiseParams::new(3.0, 40.0).unwrap();
        let s = RngStream::new(77, 12);
        let a: ShotTrain<f64> = sample_shot_train(&p, 100.0, &s).unwrap();
        let b: ShotTrain<f64> = sample_shot_train(&p, 100.0, &s).unwrap();
        assert_eq!(a, b);
        let c: ShotTrain<f64> = sample_shot_train(&p, 100.0, &s.substream(13)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn f32_trains_stay_strictly_increasing() {
        let p = ShotNoiseParams::new(1.0, 5000.0).unwrap();
        let t: ShotTrain<f32> = sample_shot_train(&p, 20.0, &RngStream::new(5, 0)).unwrap();
        assert!(ShotTrain::new(t.horizon(), t.arrivals().to_vec()).is_ok());
    }

    #[test]
    fn hand_built_train_validation() {
        let k = |time, amplitude| Kick { time, amplitude };
        assert!(ShotTrain::new(1.0, vec![k(0.5, 1.0), k(0.5, 1.0)]).is_err());
        assert!(ShotTrain::new(1.0, vec![k(0.5, 0.0)]).is_err());
        assert!(ShotTrain::new(1.0, vec![k(1.0, 1.0)]).is_err());
        let t = ShotTrain::new(1.0, vec![k(0.25, 1.0)]).unwrap();
        assert_eq!(t.mean_drive(), 1.0);
        assert_eq!(t.count_in(0.0, 0.25), 0);
        assert_eq!(t.count_in(0.0, 0.5), 1);
    }

    #[test]
    fn moments_require_enough_matching_trains() {
        let p = ShotNoiseParams::new(1.0, 1.0).unwrap();
        let few = vec![ShotTrain::<f64>::empty(1.0); 10];
        assert!(matches!(shot_train_moments(&few, &p), Err(NoiseError::Usage(_))));
        let mut mixed = vec![ShotTrain::<f64>::empty(1.0); 150];
        mixed.push(ShotTrain::empty(2.0));
        assert!(matches!(shot_train_moments(&mixed, &p), Err(NoiseError::Usage(_))));
    }

    #[test]
    fn empty_trains_have_zero_drive() {
        let p = ShotNoiseParams::new(3.0, 0.0).unwrap();
        let trains = vec![ShotTrain::<f64>::empty(50.0); 200];
        let r = shot_train_moments(&trains, &p).unwrap();
        assert_eq!(r.empirical_mean_drive, 0.0);
        assert_eq!(r.empirical_rate, 0.0);
        assert!(r.empirical_mean_amplitude.is_none());
        assert!(r.all_passed());
    }

    #[test]
    fn amplitude_law_parsing() {
        assert_eq!("exponential".parse::<AmplitudeLaw>(), Ok(AmplitudeLaw::Exponential));
        assert_eq!("gamma:2.5".parse::<AmplitudeLaw>(), Ok(AmplitudeLaw::Gamma { shape: 2.5 }));
        assert!("gamma:-1".parse::<AmplitudeLaw>().is_err());
        assert!("pareto".parse::<AmplitudeLaw>().is_err());
        let law = AmplitudeLaw::Gamma { shape: 0.1 };
        assert_eq!(law.to_string().parse::<AmplitudeLaw>(), Ok(law));
    }
}
