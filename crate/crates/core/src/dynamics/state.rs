//! Linear (unnormalized) stochastic Schrödinger equation for the two-level
//! system, `i dψ/dt = H ψ` with
//!
//! ```text
//! H = (ω + c(t)) σz/2 + i z*_t g σ₋ - i g Q σ₊σ₋
//! ```
//!
//! written on `ψ = A|1⟩ + B|0⟩`. With `Φ(t) = ωt + Σ_{t_j<t} x_j` the
//! amplitudes are integrated in the co-rotating frame `A = e^{-iΦ/2} Ã`,
//! `B = e^{iΦ/2} B̃`:
//!
//! ```text
//! dÃ/dt = -g Q Ã
//! dB̃/dt =  g z*_t e^{-iΦ} Ã
//! ```
//!
//! so a kick only advances `Φ` (and rotates `Q`), and populations are read
//! directly from `|Ã|²`, `|B̃|²`. `Q`, `Ã`, `B̃` and `∫Re Q` are advanced together
//! with RK4; `z*` is linearly interpolated to the half step.

use num_complex::Complex;

use super::riccati::{guard, riccati_rhs, KickSchedule, StepConfig};
use super::{DynamicsError, SystemParams};
use crate::noise::{OuPath, ShotTrain};
use crate::scalar::{unit_phase, wrap_phase, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct StateTrajectory<T> {
    pub dt: T,
    pub record_stride: usize,
    /// Co-rotating `|1⟩` amplitude `Ã`, left limits.
    pub a_rot: Vec<Complex<T>>,
    /// Co-rotating `|0⟩` amplitude `B̃`, left limits.
    pub b_rot: Vec<Complex<T>>,
    /// `Φ(t_k⁻)` wrapped into `[0, 4π)`.
    pub phase: Vec<T>,
    /// `Q` on the same grid, left limits.
    pub q: Vec<Complex<T>>,
    pub exponent: Vec<T>,
    pub(crate) schedule: KickSchedule<T>,
}

impl<T: Real> StateTrajectory<T> {
    pub fn len(&self) -> usize {
        self.a_rot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_rot.is_empty()
    }

    pub fn record_step(&self) -> T {
        self.dt * T::lit(self.record_stride as f64)
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.record_step() * T::lit(k as f64)).collect()
    }

    pub fn kick_phase_at(&self, k: usize) -> T {
        self.schedule.phase_at(k * self.record_stride)
    }

    /// `A(t_k) = ⟨1|ψ_{t_k}⟩`.
    pub fn a(&self, k: usize) -> Complex<T> {
        self.a_rot[k] * unit_phase(-self.phase[k] / T::lit(2.0))
    }

    /// `B(t_k) = ⟨0|ψ_{t_k}⟩`.
    pub fn b(&self, k: usize) -> Complex<T> {
        self.b_rot[k] * unit_phase(self.phase[k] / T::lit(2.0))
    }

    /// `|A|²`, exact in the co-rotating frame.
    pub fn excited_population(&self, k: usize) -> T {
        self.a_rot[k].norm_sqr()
    }

    pub fn ground_population(&self, k: usize) -> T {
        self.b_rot[k].norm_sqr()
    }

    /// `A B*`.
    pub fn coherence(&self, k: usize) -> Complex<T> {
        self.a_rot[k] * self.b_rot[k].conj() * unit_phase(-self.phase[k])
    }
}

/// Propagates one trajectory on the OU path's grid, recording every step.
pub fn propagate_trajectory<T: Real>(
    sys: &SystemParams<T>,
    train: &ShotTrain<T>,
    ou: &OuPath<T>,
    dt: T,
) -> Result<StateTrajectory<T>, DynamicsError> {
    propagate_trajectory_strided(sys, train, ou, dt, 1)
}

pub fn propagate_trajectory_strided<T: Real>(
    sys: &SystemParams<T>,
    train: &ShotTrain<T>,
    ou: &OuPath<T>,
    dt: T,
    record_stride: usize,
) -> Result<StateTrajectory<T>, DynamicsError> {
    sys.validate()?;
    let ou_dt = ou.params.dt;
    let dtf = dt.to_f64_lossy();
    if (ou_dt - dtf).abs() > 1e-9 * dtf || ou.values.len() != ou.params.n_steps + 1 {
        return Err(DynamicsError::Usage(format!(
            "environment noise sampled with dt = {ou_dt}, trajectory requested dt = {dtf}"
        )));
    }
    let n = ou.params.n_steps;
    let horizon = dt * T::lit(n as f64);
    let steps = StepConfig {
        dt,
        horizon,
        record_stride,
    };
    steps.validate(sys)?;
    if train.horizon() < horizon - dt / T::lit(2.0) {
        return Err(DynamicsError::Usage(format!(
            "shot train covers [0, {}) but the run needs [0, {}]",
            train.horizon(),
            horizon
        )));
    }

    let schedule = KickSchedule::new(train, dt, n);
    let forcing = sys.g * sys.gamma / T::lit(2.0);
    let linear = Complex::new(-sys.gamma, sys.omega);
    let g = sys.g;
    let two = T::lit(2.0);
    let half = dt / two;
    let sixth = dt / T::lit(6.0);
    // e^{-iΦ} advances by these factors over half and full steps between kicks
    let rot_half = unit_phase(-sys.omega * half);
    let rot_full = unit_phase(-sys.omega * dt);

    let zero = Complex::new(T::zero(), T::zero());
    let mut q = zero;
    let mut a = Complex::new(T::one(), T::zero());
    let mut b = zero;
    let mut s = T::zero();
    let mut kick_phase = T::zero();

    let n_rec = n / record_stride + 1;
    let mut rec_a = Vec::with_capacity(n_rec);
    let mut rec_b = Vec::with_capacity(n_rec);
    let mut rec_phase = Vec::with_capacity(n_rec);
    let mut rec_q = Vec::with_capacity(n_rec);
    let mut rec_s = Vec::with_capacity(n_rec);
    rec_a.push(a);
    rec_b.push(b);
    rec_phase.push(T::zero());
    rec_q.push(q);
    rec_s.push(s);

    let mut next_kick = 0;
    for step in 0..n {
        if let Some(&(idx, x)) = schedule.entries.get(next_kick) {
            if idx == step {
                q = q * unit_phase(x);
                kick_phase = wrap_phase(kick_phase + x);
                next_kick += 1;
            }
        }
        let t = dt * T::lit(step as f64);
        let phi = wrap_phase(sys.omega * t) + kick_phase;
        let rot0 = unit_phase(-phi);
        let rotm = rot0 * rot_half;
        let rot1 = rot0 * rot_full;
        let drive0 = ou.values[step] * rot0 * g;
        let drive1 = ou.values[step + 1] * rot1 * g;
        let drivem = (ou.values[step] + ou.values[step + 1]) / two * rotm * g;

        let kq1 = riccati_rhs(forcing, linear, g, q);
        let ka1 = -(q * a * g);
        let kb1 = drive0 * a;

        let q2 = q + kq1 * half;
        let a2 = a + ka1 * half;
        let kq2 = riccati_rhs(forcing, linear, g, q2);
        let ka2 = -(q2 * a2 * g);
        let kb2 = drivem * a2;

        let q3 = q + kq2 * half;
        let a3 = a + ka2 * half;
        let kq3 = riccati_rhs(forcing, linear, g, q3);
        let ka3 = -(q3 * a3 * g);
        let kb3 = drivem * a3;

        let q4 = q + kq3 * dt;
        let a4 = a + ka3 * dt;
        let kq4 = riccati_rhs(forcing, linear, g, q4);
        let ka4 = -(q4 * a4 * g);
        let kb4 = drive1 * a4;

        s += (q.re + two * q2.re + two * q3.re + q4.re) * sixth;
        q = q + (kq1 + kq2 * two + kq3 * two + kq4) * sixth;
        a = a + (ka1 + ka2 * two + ka3 * two + ka4) * sixth;
        b = b + (kb1 + kb2 * two + kb3 * two + kb4) * sixth;
        guard(q, dt * T::lit((step + 1) as f64))?;

        if (step + 1) % record_stride == 0 {
            let t1 = dt * T::lit((step + 1) as f64);
            rec_a.push(a);
            rec_b.push(b);
            rec_phase.push(wrap_phase(wrap_phase(sys.omega * t1) + kick_phase));
            rec_q.push(q);
            rec_s.push(s);
        }
    }

    Ok(StateTrajectory {
        dt,
        record_stride,
        a_rot: rec_a,
        b_rot: rec_b,
        phase: rec_phase,
        q: rec_q,
        exponent: rec_s,
        schedule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrate_q;
    use crate::noise::{sample_ou_path, Kick, OuParams};
    use crate::rng::RngStream;

    fn zero_ou(dt: f64, n: usize) -> OuPath<f64> {
        OuPath::zeros(OuParams::new(0.2, dt, n).unwrap())
    }

    #[test]
    fn free_phase_evolution() {
        let sys = SystemParams::<f64>::reference().with_g(0.0);
        let dt = 0.001;
        let ou = sample_ou_path(&OuParams::new(0.2, dt, 20_000).unwrap(), &RngStream::new(1, 0)).unwrap();
        let st = propagate_trajectory(&sys, &ShotTrain::empty(20.0), &ou, dt).unwrap();
        for (k, t) in st.times().into_iter().enumerate() {
            let expected = Complex::from_polar(1.0, -t / 2.0);
            assert!((st.a(k) - expected).norm() < 1e-9);
            assert!((st.a(k).norm() - 1.0).abs() < 1e-9);
            assert_eq!(st.excited_population(k), 1.0);
            assert_eq!(st.b(k), Complex::new(0.0, 0.0));
        }
    }

    #[test]
    fn amplitude_decay_without_environment_noise() {
        let sys = SystemParams::<f64>::reference();
        let dt = 0.001;
        let n = 50_000;
        let st = propagate_trajectory(&sys, &ShotTrain::empty(50.0), &zero_ou(dt, n), dt).unwrap();
        for k in (0..st.len()).step_by(997) {
            let expected = (-sys.g * st.exponent[k]).exp();
            assert!((st.a(k).norm() - expected).abs() < 1e-10, "k = {k}");
        }
        assert!(st.b_rot.iter().all(|b| b.norm() == 0.0));
        // Q agrees with the stand-alone Riccati integration
        let q = integrate_q(&sys, &ShotTrain::empty(50.0), dt, 50.0).unwrap();
        assert_eq!(q.values, st.q);
    }

    #[test]
    fn initial_state_is_excited() {
        let sys = SystemParams::<f64>::reference();
        let dt = 0.001;
        let stream = RngStream::new(99, 4);
        let ou = sample_ou_path(&OuParams::new(0.2, dt, 1000).unwrap(), &stream).unwrap();
        let train = ShotTrain::new(1.0, vec![Kick { time: 0.0, amplitude: 2.0 }]).unwrap();
        let st = propagate_trajectory(&sys, &train, &ou, dt).unwrap();
        assert_eq!(st.a(0), Complex::new(1.0, 0.0));
        assert_eq!(st.b(0), Complex::new(0.0, 0.0));
    }

    #[test]
    fn kicks_preserve_component_moduli() {
        let sys = SystemParams::<f64>::reference();
        let dt = 0.001;
        let ou = sample_ou_path(&OuParams::new(0.2, dt, 3000).unwrap(), &RngStream::new(5, 5)).unwrap();
        let train = ShotTrain::new(3.0, vec![Kick { time: 1.5, amplitude: 2.7 }]).unwrap();
        let kicked = propagate_trajectory(&sys, &train, &ou, dt).unwrap();
        let free = propagate_trajectory(&sys, &ShotTrain::empty(3.0), &ou, dt).unwrap();
        let k = 1500;
        assert_eq!(kicked.kick_phase_at(k), 2.7);
        assert_eq!(kicked.a(k), free.a(k));
        assert_eq!(kicked.b(k), free.b(k));
        // Right after the kick the lab-frame components are rotated by
        // e^{∓ix/2} and keep their moduli.
        let a_plus = kicked.a(k) * Complex::from_polar(1.0, -1.35);
        let b_plus = kicked.b(k) * Complex::from_polar(1.0, 1.35);
        assert!((a_plus.norm() - free.a(k).norm()).abs() < 1e-15);
        assert!((b_plus.norm() - free.b(k).norm()).abs() < 1e-15);
        let dphase = wrap_phase(kicked.phase[k + 1] - free.phase[k + 1]);
        assert!((dphase - 2.7).abs() < 1e-12);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let sys = SystemParams::<f64>::reference();
        let ou = zero_ou(0.002, 100);
        let err = propagate_trajectory(&sys, &ShotTrain::empty(1.0), &ou, 0.001).unwrap_err();
        assert!(matches!(err, DynamicsError::Usage(_)));
    }
}
