//! Scalar abstraction for the deterministic dynamics.
//!
//! The Riccati integrator, the state propagator and the fidelity quadrature
//! are written once against [`Real`] and instantiated for `f32` and `f64`.
//! Ensemble reductions always accumulate in `f64`.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type usable by the dynamics: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal or sample.
    fn lit(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        f64::from(self)
    }
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

/// `e^{i phase}`.
#[inline]
pub fn unit_phase<T: Real>(phase: T) -> Complex<T> {
    let (s, c) = phase.sin_cos();
    Complex::new(c, s)
}

/// Wraps an accumulated phase into `[0, 4π)` so long kick sums keep
/// precision. The period is `4π` rather than `2π` so half-angles
/// `e^{±iΦ/2}` stay well defined.
#[inline]
pub fn wrap_phase<T: Real>(phase: T) -> T {
    let period = T::TAU() + T::TAU();
    let r = phase % period;
    if r < T::zero() {
        r + period
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_phase_has_unit_modulus() {
        for k in 0..100 {
            let z = unit_phase(0.37_f64 * k as f64);
            assert!((z.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn wrap_phase_range() {
        let four_pi = 2.0 * std::f64::consts::TAU;
        assert_eq!(wrap_phase(7.0_f64), 7.0);
        assert!((wrap_phase(13.0_f64) - (13.0 - four_pi)).abs() < 1e-15);
        let w = wrap_phase(-0.5_f64);
        assert!(w > 0.0 && w < four_pi);
        // half-angle rotations agree before and after wrapping
        let raw = 123.456_f64;
        let a = unit_phase(raw / 2.0);
        let b = unit_phase(wrap_phase(raw) / 2.0);
        assert!((a - b).norm() < 1e-12);
        assert_eq!(wrap_phase(0.0_f32), 0.0);
    }
}
