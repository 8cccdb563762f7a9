//! Simulation of a gain-loss coupled-cavity optomechanical system.
//!
//! The pipeline runs from the self-consistent mean field ([`steady`]) through
//! linear stability ([`stability`]) and mean-field dynamics ([`dynamics`]) to
//! the steady-state Gaussian covariance ([`covariance`]) and the logarithmic
//! negativity of every mode pair ([`entanglement`]). [`sweep`] maps the whole
//! chain over parameter grids.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common `f64` instantiation.

pub mod covariance;
pub mod dynamics;
pub mod eigen;
pub mod entanglement;
pub mod error;
pub mod grid;
pub mod model;
pub mod roots;
pub mod scalar;
pub mod stability;
pub mod steady;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SystemParams = model::SystemParams<f64>;
pub type ValidatedParams = model::ValidatedParams<f64>;
pub type SteadyStateBranch = steady::SteadyStateBranch<f64>;
pub type JacobianM = stability::JacobianM<f64>;
pub type StabilityVerdict = stability::StabilityVerdict<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;
pub type DriftA = covariance::DriftA<f64>;
pub type DiffusionD = covariance::DiffusionD<f64>;
pub type CovarianceMatrix = covariance::CovarianceMatrix<f64>;
pub type NegativityResult = entanglement::NegativityResult<f64>;
pub type SweepRecord = sweep::SweepRecord;
