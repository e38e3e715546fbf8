use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::QTrajectory;
use crate::provenance::Provenance;
use crate::scalar::Real;

/// How the survival amplitude is obtained from `Q`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityConvention {
    /// `F(t) = exp(-∫₀ᵗ Re Q ds)`.
    #[default]
    QExponent,
    /// `F(t) = exp(-g ∫₀ᵗ Re Q ds)`, i.e. `|⟨1|ψ_t⟩|` from the state equation.
    Amplitude,
}

impl FidelityConvention {
    pub fn exponent_scale(self, g: f64) -> f64 {
        match self {
            Self::QExponent => 1.0,
            Self::Amplitude => g,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::QExponent => "q-exponent",
            Self::Amplitude => "amplitude",
        }
    }
}

impl fmt::Display for FidelityConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FidelityConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "q-exponent" => Ok(Self::QExponent),
            "amplitude" => Ok(Self::Amplitude),
            other => Err(format!("unknown fidelity convention `{other}` (expected q-exponent or amplitude)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve<T> {
    pub times: Vec<T>,
    pub values: Vec<T>,
    /// Monte Carlo standard error, present for averaged curves.
    pub stderr: Option<Vec<T>>,
    pub provenance: Provenance,
}

impl<T: Real> FidelityCurve<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at the recorded time closest to `t`.
    pub fn at(&self, t: T) -> T {
        self.values[self.index_of(t)]
    }

    pub fn stderr_at(&self, t: T) -> T {
        self.stderr.as_ref().map_or(T::zero(), |s| s[self.index_of(t)])
    }

    pub fn index_of(&self, t: T) -> usize {
        let mut best = 0;
        for (k, &tk) in self.times.iter().enumerate() {
            if (tk - t).abs() < (self.times[best] - t).abs() {
                best = k;
            }
        }
        best
    }
}

/// `F(t) = exp(-∫₀ᵗ Re Q ds)` on the trajectory's recorded grid.
pub fn fidelity_from_q<T: Real>(q: &QTrajectory<T>) -> FidelityCurve<T> {
    fidelity_with_convention(q, FidelityConvention::QExponent, T::one())
}

/// Fidelity under either convention; `g` is only used by
/// [`FidelityConvention::Amplitude`].
pub fn fidelity_with_convention<T: Real>(q: &QTrajectory<T>, convention: FidelityConvention, g: T) -> FidelityCurve<T> {
    let scale = match convention {
        FidelityConvention::QExponent => T::one(),
        FidelityConvention::Amplitude => g,
    };
    let values = q
        .exponent
        .iter()
        .enumerate()
        .map(|(k, &s)| if k == 0 { T::one() } else { (-(scale * s)).exp() })
        .collect();
    FidelityCurve {
        times: q.times(),
        values,
        stderr: None,
        provenance: Provenance::new()
            .with("convention", convention.as_str())
            .with("dt", q.dt.to_f64_lossy())
            .with("max_snap_error", q.max_snap_error.to_f64_lossy()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_q, SystemParams};
    use crate::noise::ShotTrain;
    use num_complex::Complex64;

    #[test]
    fn zero_q_gives_unit_fidelity() {
        let q = QTrajectory::from_samples(0.1, vec![Complex64::new(0.0, 0.0); 50]);
        let f = fidelity_from_q(&q);
        assert!(f.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn constant_real_part_gives_exponential() {
        let r = 0.3;
        let q = QTrajectory::from_samples(0.01, vec![Complex64::new(r, 0.7); 1001]);
        let f = fidelity_from_q(&q);
        for (t, v) in f.times.iter().zip(&f.values) {
            assert!((v - (-r * t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn free_dynamics_decays() {
        let sys = SystemParams::<f64>::reference();
        let horizon = 100.0 * sys.period;
        let q = integrate_q(&sys, &ShotTrain::empty(horizon), 0.001, horizon).unwrap();
        let f = fidelity_from_q(&q);
        assert_eq!(f.values[0], 1.0);
        assert!(f.values.iter().all(|&v| v > 0.0 && v <= 1.0 + 1e-12));
        // well below one long before 100T
        assert!(f.at(20.0 * sys.period) < 0.6);
        assert!(f.at(horizon) < f.at(50.0 * sys.period));
        // monotone once the initial oscillation of Re Q has died out
        let start = f.index_of(10.0 * sys.period);
        assert!(f.values[start..].windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn convention_parsing() {
        assert_eq!("amplitude".parse::<FidelityConvention>(), Ok(FidelityConvention::Amplitude));
        assert_eq!("q-exponent".parse::<FidelityConvention>(), Ok(FidelityConvention::QExponent));
        assert!("other".parse::<FidelityConvention>().is_err());
    }
}
