//! Fixed-step integration of the impulsive complex Riccati equation
//!
//! ```text
//! dQ/dt = gγ/2 + (-γ + iω + i c(t)) Q + g Q²,   Q(0) = 0.
//! ```
//!
//! Between kicks the smooth part is advanced with classical RK4. A kick
//! `x_j δ(t - t_j)` only enters through `i c Q`, whose exact integral across
//! the delta is the rotation `Q → Q e^{i x_j}`. Kick times are snapped to the
//! nearest grid point. Recorded values are left limits: the sample at a grid
//! point is taken before any kick scheduled there is applied.
//!
//! The running exponent `∫₀ᵗ Re Q ds` is carried as an extra RK4 component so
//! that fidelities inherit the fourth-order accuracy of `Q`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{require, DynamicsError, SystemParams};
use crate::noise::ShotTrain;
use crate::scalar::{unit_phase, Real};

/// `|Q|` above this aborts the trajectory.
pub const DIVERGENCE_GUARD: f64 = 1e6;

/// Integration step, horizon and how often to record a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepConfig<T> {
    pub dt: T,
    pub horizon: T,
    /// Record every `record_stride`-th step; must divide the step count.
    pub record_stride: usize,
}

impl<T: Real> StepConfig<T> {
    pub fn new(dt: T, horizon: T) -> Self {
        Self {
            dt,
            horizon,
            record_stride: 1,
        }
    }

    pub fn with_stride(self, record_stride: usize) -> Self {
        Self { record_stride, ..self }
    }

    /// Number of integration steps, `round(horizon / dt)`.
    pub fn n_steps(&self) -> usize {
        (self.horizon / self.dt).round().to_usize().unwrap_or(0)
    }

    pub(crate) fn validate(&self, sys: &SystemParams<T>) -> Result<usize, DynamicsError> {
        let dt = self.dt.to_f64_lossy();
        let max_dt = sys.max_dt().to_f64_lossy();
        require("dt", dt, dt > 0.0, "must be positive")?;
        require("dt", dt, dt <= max_dt * (1.0 + 1e-9), "must not exceed min(0.01/omega, 0.1/gamma)")?;
        let horizon = self.horizon.to_f64_lossy();
        require("horizon", horizon, horizon >= dt * (1.0 - 1e-9), "must be at least dt")?;
        let n = self.n_steps();
        if self.record_stride == 0 || n % self.record_stride != 0 {
            return Err(DynamicsError::Usage(format!(
                "record stride {} must divide the step count {n}",
                self.record_stride
            )));
        }
        Ok(n)
    }

    /// Spacing of recorded samples.
    pub fn record_step(&self) -> T {
        self.dt * T::lit(self.record_stride as f64)
    }
}

/// A kick as applied on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppliedKick<T> {
    pub time: T,
    pub snapped_time: T,
    pub amplitude: T,
}

/// Kicks snapped to integration steps and merged per step.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct KickSchedule<T> {
    /// `(step index, total phase)` sorted by step.
    pub entries: Vec<(usize, T)>,
    pub applied: Vec<AppliedKick<T>>,
    pub max_snap_error: T,
}

impl<T: Real> KickSchedule<T> {
    pub fn new(train: &ShotTrain<T>, dt: T, n_steps: usize) -> Self {
        let mut entries: Vec<(usize, T)> = Vec::new();
        let mut applied = Vec::with_capacity(train.len());
        let mut max_snap_error = T::zero();
        for k in train.arrivals() {
            let idx = (k.time / dt).round().to_usize().unwrap_or(usize::MAX);
            if idx > n_steps {
                continue;
            }
            let snapped = dt * T::lit(idx as f64);
            max_snap_error = max_snap_error.max((snapped - k.time).abs());
            applied.push(AppliedKick {
                time: k.time,
                snapped_time: snapped,
                amplitude: k.amplitude,
            });
            match entries.last_mut() {
                Some((last, phase)) if *last == idx => *phase += k.amplitude,
                _ => entries.push((idx, k.amplitude)),
            }
        }
        Self {
            entries,
            applied,
            max_snap_error,
        }
    }

    /// Total phase applied at `step`, zero if none.
    pub fn phase_at(&self, step: usize) -> T {
        match self.entries.binary_search_by_key(&step, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => T::zero(),
        }
    }
}

/// Time-discretized `Q(t)` for one control-field realization.
#[derive(Clone, Debug, PartialEq)]
pub struct QTrajectory<T> {
    pub dt: T,
    pub record_stride: usize,
    /// Recorded left-limit values `Q(t_k⁻)`, `t_k = k · record_stride · dt`.
    pub values: Vec<Complex<T>>,
    /// `∫₀^{t_k} Re Q ds` at each recorded point.
    pub exponent: Vec<T>,
    pub kicks: Vec<AppliedKick<T>>,
    pub max_snap_error: T,
    pub(crate) schedule: KickSchedule<T>,
}

impl<T: Real> QTrajectory<T> {
    /// Builds a trajectory from samples on a uniform grid with no kicks; the
    /// exponent is accumulated with the trapezoid rule.
    pub fn from_samples(step: T, values: Vec<Complex<T>>) -> Self {
        let mut exponent = Vec::with_capacity(values.len());
        let mut acc = T::zero();
        for (k, v) in values.iter().enumerate() {
            if k > 0 {
                acc += step * (values[k - 1].re + v.re) / T::lit(2.0);
            }
            exponent.push(acc);
        }
        Self {
            dt: step,
            record_stride: 1,
            values,
            exponent,
            kicks: Vec::new(),
            max_snap_error: T::zero(),
            schedule: KickSchedule::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn record_step(&self) -> T {
        self.dt * T::lit(self.record_stride as f64)
    }

    pub fn time(&self, k: usize) -> T {
        self.record_step() * T::lit(k as f64)
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    /// Phase applied at recorded point `k` (sum of kicks snapped there).
    pub fn kick_phase_at(&self, k: usize) -> T {
        self.schedule.phase_at(k * self.record_stride)
    }

    /// `Q(t_k⁺)`.
    pub fn right_limit(&self, k: usize) -> Complex<T> {
        let phase = self.kick_phase_at(k);
        if phase == T::zero() {
            self.values[k]
        } else {
            self.values[k] * unit_phase(phase)
        }
    }
}

#[inline]
pub(crate) fn riccati_rhs<T: Real>(forcing: T, linear: Complex<T>, g: T, q: Complex<T>) -> Complex<T> {
    Complex::new(forcing, T::zero()) + linear * q + q * q * g
}

/// One RK4 step of `(Q, ∫Re Q)`.
#[inline]
pub(crate) fn rk4_q_step<T: Real>(
    forcing: T,
    linear: Complex<T>,
    g: T,
    h: T,
    q: Complex<T>,
) -> (Complex<T>, T) {
    let half = h / T::lit(2.0);
    let k1 = riccati_rhs(forcing, linear, g, q);
    let q2 = q + k1 * half;
    let k2 = riccati_rhs(forcing, linear, g, q2);
    let q3 = q + k2 * half;
    let k3 = riccati_rhs(forcing, linear, g, q3);
    let q4 = q + k3 * h;
    let k4 = riccati_rhs(forcing, linear, g, q4);
    let two = T::lit(2.0);
    let sixth = h / T::lit(6.0);
    let dq = (k1 + k2 * two + k3 * two + k4) * sixth;
    let ds = (q.re + two * q2.re + two * q3.re + q4.re) * sixth;
    (q + dq, ds)
}

pub(crate) fn guard<T: Real>(q: Complex<T>, t: T) -> Result<(), DynamicsError> {
    let m = q.norm().to_f64_lossy();
    if m.is_finite() && m <= DIVERGENCE_GUARD {
        Ok(())
    } else {
        Err(DynamicsError::Divergence {
            time: t.to_f64_lossy(),
            modulus: m,
        })
    }
}

/// `integrate_q_with` recording every step.
pub fn integrate_q<T: Real>(
    sys: &SystemParams<T>,
    train: &ShotTrain<T>,
    dt: T,
    horizon: T,
) -> Result<QTrajectory<T>, DynamicsError> {
    integrate_q_with(sys, train, &StepConfig::new(dt, horizon))
}

pub fn integrate_q_with<T: Real>(
    sys: &SystemParams<T>,
    train: &ShotTrain<T>,
    steps: &StepConfig<T>,
) -> Result<QTrajectory<T>, DynamicsError> {
    sys.validate()?;
    let n = steps.validate(sys)?;
    let dt = steps.dt;
    if train.horizon() < steps.horizon - dt / T::lit(2.0) {
        return Err(DynamicsError::Usage(format!(
            "shot train covers [0, {}) but the run needs [0, {}]",
            train.horizon(),
            steps.horizon
        )));
    }
    let schedule = KickSchedule::new(train, dt, n);
    let forcing = sys.g * sys.gamma / T::lit(2.0);
    let linear = Complex::new(-sys.gamma, sys.omega);
    let stride = steps.record_stride;

    let n_rec = n / stride + 1;
    let mut values = Vec::with_capacity(n_rec);
    let mut exponent = Vec::with_capacity(n_rec);
    let mut q = Complex::new(T::zero(), T::zero());
    let mut s = T::zero();
    values.push(q);
    exponent.push(s);

    let mut next_kick = 0;
    for step in 0..n {
        if let Some(&(idx, phase)) = schedule.entries.get(next_kick) {
            if idx == step {
                q = q * unit_phase(phase);
                next_kick += 1;
            }
        }
        let (q_new, ds) = rk4_q_step(forcing, linear, sys.g, dt, q);
        q = q_new;
        s += ds;
        guard(q, dt * T::lit((step + 1) as f64))?;
        if (step + 1) % stride == 0 {
            values.push(q);
            exponent.push(s);
        }
    }

    Ok(QTrajectory {
        dt,
        record_stride: stride,
        values,
        exponent,
        kicks: schedule.applied.clone(),
        max_snap_error: schedule.max_snap_error,
        schedule,
    })
}
