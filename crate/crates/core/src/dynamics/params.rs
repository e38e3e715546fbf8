use serde::{Deserialize, Serialize};

use super::{require, DynamicsError};
use crate::scalar::Real;

/// Level spacing `ω`, coupling `g`, environment memory rate `γ` and the
/// characteristic time `T` that sets the units of `W` and the probe times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams<T> {
    pub omega: T,
    pub g: T,
    pub gamma: T,
    pub period: T,
}

impl<T: Real> SystemParams<T> {
    pub fn new(omega: T, g: T, gamma: T, period: T) -> Result<Self, DynamicsError> {
        let p = Self { omega, g, gamma, period };
        p.validate()?;
        Ok(p)
    }

    /// `ω = 1`, `ωT = 5`, `g = 0.4ω`, `γ = 0.2`.
    pub fn reference() -> Self {
        Self {
            omega: T::one(),
            g: T::lit(0.4),
            gamma: T::lit(0.2),
            period: T::lit(5.0),
        }
    }

    pub fn with_gamma(self, gamma: T) -> Self {
        Self { gamma, ..self }
    }

    pub fn with_g(self, g: T) -> Self {
        Self { g, ..self }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let f = |x: T| x.to_f64_lossy();
        require("omega", f(self.omega), self.omega > T::zero(), "must be positive")?;
        require("g", f(self.g), self.g >= T::zero(), "must be non-negative")?;
        require("gamma", f(self.gamma), self.gamma > T::zero(), "must be positive")?;
        require("T", f(self.period), self.period > T::zero(), "must be positive")
    }

    /// Largest admissible integration step, `min(0.01/ω, 0.1/γ)`.
    pub fn max_dt(&self) -> T {
        (T::lit(0.01) / self.omega).min(T::lit(0.1) / self.gamma)
    }
}
