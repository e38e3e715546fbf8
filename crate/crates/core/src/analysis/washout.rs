//! The washout integrand for the two-level system.
//!
//! With `Φ(t) = ωt + Σ_{t_j<t} x_j`, the fast factor is `N(t) = e^{-iΦ(t)}` and
//! the slow one `h(t) = -Q(t)⟨ψ₀|ψ_t⟩`, where `⟨ψ₀|ψ_t⟩ = A(t)` is taken from the
//! `z* ≡ 0` trajectory (it does not depend on `z*` for `ψ₀ = |1⟩`). The running
//! integral is
//!
//! ```text
//! I(t) = ∫₀ᵗ N*(s) h(s) ds = -∫₀ᵗ Q(s) e^{iΦ(s)/2} Ã(s) ds
//! ```
//!
//! evaluated by the trapezoid rule on the full step grid, using right limits
//! at kick points. `N` and `Q` jump at kicks; `Ã` does not.

use num_complex::Complex64;

use super::AnalysisError;
use crate::dynamics::{propagate_trajectory, StepConfig, SystemParams};
use crate::noise::{OuParams, OuPath, ShotTrain};
use crate::scalar::unit_phase;

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrandSeries {
    pub times: Vec<f64>,
    /// `N(t)` (left limits).
    pub n: Vec<Complex64>,
    /// `h(t)` (left limits).
    pub h: Vec<Complex64>,
    /// `I(t)`.
    pub partial_integral: Vec<Complex64>,
    /// `(1/t) ∫₀ᵗ N ds`: the integral with `h` frozen at 1, as a running mean.
    /// Zero is stored at `t = 0`.
    pub running_mean_n: Vec<Complex64>,
    /// Grid points carrying a kick.
    pub kicks: usize,
}

impl IntegrandSeries {
    /// `|I(horizon)|`.
    pub fn final_magnitude(&self) -> f64 {
        self.partial_integral.last().map_or(0.0, |z| z.norm())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Builds the series for one train on the grid `dt`, reporting every
/// `record_stride`-th step.
pub fn washout_diagnostic(
    sys: &SystemParams<f64>,
    train: &ShotTrain<f64>,
    dt: f64,
    horizon: f64,
    record_stride: usize,
) -> Result<IntegrandSeries, AnalysisError> {
    let steps = StepConfig::new(dt, horizon).with_stride(record_stride);
    let n_steps = steps.validate(sys)?;
    let ou = OuPath::zeros(OuParams {
        gamma: sys.gamma,
        dt,
        n_steps,
        max_gamma_dt: f64::INFINITY,
    });
    let st = propagate_trajectory(sys, train, &ou, dt)?;

    // integrands at grid point k: left limit, and right limit after any kick
    let f_left = |k: usize| -st.q[k] * unit_phase(st.phase[k] / 2.0) * st.a_rot[k];
    let n_left = |k: usize| unit_phase(-st.phase[k]);
    let jump = |k: usize| st.kick_phase_at(k);

    let n_rec = n_steps / record_stride + 1;
    let mut out = IntegrandSeries {
        times: Vec::with_capacity(n_rec),
        n: Vec::with_capacity(n_rec),
        h: Vec::with_capacity(n_rec),
        partial_integral: Vec::with_capacity(n_rec),
        running_mean_n: Vec::with_capacity(n_rec),
        kicks: st.schedule.entries.len(),
    };
    let zero = Complex64::new(0.0, 0.0);
    let mut integral = zero;
    let mut n_integral = zero;
    for k in 0..=n_steps {
        if k > 0 {
            let x = jump(k - 1);
            let f_right = f_left(k - 1) * unit_phase(1.5 * x);
            let n_right = n_left(k - 1) * unit_phase(-x);
            integral += (f_right + f_left(k)) * (dt / 2.0);
            n_integral += (n_right + n_left(k)) * (dt / 2.0);
        }
        if k % record_stride == 0 {
            let t = dt * k as f64;
            out.times.push(t);
            out.n.push(n_left(k));
            out.h.push(-st.q[k] * st.a(k));
            out.partial_integral.push(integral);
            out.running_mean_n.push(if k == 0 { zero } else { n_integral / t });
        }
    }
    Ok(out)
}
