//! Stochastic-trajectory simulation of a dissipative two-level system whose
//! decay is suppressed by a biased Poissonian white shot-noise control field.
//!
//! * [`noise`]: shot-noise trains and complex Ornstein-Uhlenbeck paths.
//! * [`dynamics`]: the impulsive Riccati equation for `Q(t)`, fidelities,
//!   linear stochastic Schrödinger trajectories and ensemble density matrices.
//! * [`analysis`]: fidelity comparisons, `(J, W)` sweeps, memory-rate scans
//!   and the phase-washout diagnostic.
//! * [`io`]: configuration grammar, CSV/JSON output and the `washout` binary's
//!   run logic.
//!
//! All times are in units of `1/ω` (`ω = 1`). The dynamics primitives are
//! generic over [`Real`]; the aliases below fix the scalar type.

pub mod analysis;
pub mod dynamics;
pub mod io;
pub mod noise;
pub mod provenance;
pub mod rng;
pub mod scalar;
pub mod stats;

pub use num_complex::{Complex32, Complex64};
pub use rng::RngStream;
pub use scalar::Real;

pub type SystemParams64 = dynamics::SystemParams<f64>;
pub type SystemParams32 = dynamics::SystemParams<f32>;
pub type ShotTrain64 = noise::ShotTrain<f64>;
pub type ShotTrain32 = noise::ShotTrain<f32>;
pub type OuPath64 = noise::OuPath<f64>;
pub type OuPath32 = noise::OuPath<f32>;
pub type QTrajectory64 = dynamics::QTrajectory<f64>;
pub type QTrajectory32 = dynamics::QTrajectory<f32>;
pub type StateTrajectory64 = dynamics::StateTrajectory<f64>;
pub type StateTrajectory32 = dynamics::StateTrajectory<f32>;
pub type FidelityCurve64 = dynamics::FidelityCurve<f64>;
pub type FidelityCurve32 = dynamics::FidelityCurve<f32>;

/// Version string embedded in every provenance header.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
