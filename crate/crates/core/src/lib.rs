//! Non-Gaussianity of nonlinear optomechanical dynamics.
//!
//! Two engines compute the relative-entropy non-Gaussianity `delta(tau)` of an
//! initially Gaussian light-matter state: a closed-form pipeline
//! (coefficients, moments, covariance matrix, symplectic spectrum) and a
//! truncated Fock-space simulator that also handles Lindblad damping.
//!
//! The analytic modules are generic over the scalar type; the aliases below
//! fix it to `f64`.

pub mod analytic;
pub mod cli;
pub mod compensated;
pub mod covariance;
pub mod entropy_measure;
pub mod error;
pub mod fock_sim;
pub mod lie_coefficients;
pub mod quadrature;
pub mod real;

pub use error::{Error, Result};
pub use real::Real;

pub type Coefficients = lie_coefficients::EvolutionCoefficients<f64>;
pub type Profile = lie_coefficients::CouplingProfile<f64>;
pub type Initial = covariance::InitialState<f64>;
pub type MomentSet = covariance::Moments<f64>;
pub type Covariance = covariance::CovarianceMatrix<f64>;
pub type Pair = entropy_measure::SymplecticPair<f64>;
pub type Delta = entropy_measure::DeltaResult<f64>;
pub type Point = analytic::AnalyticPoint<f64>;
