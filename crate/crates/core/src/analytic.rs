//! Closed-form engine: coefficients, moments, covariance and delta for one time point.

use crate::covariance::{covariance_from_moments, moments, CovarianceMatrix, InitialState, Moments};
use crate::entropy_measure::{araki_lieb_witness, delta, DeltaResult};
use crate::error::Result;
use crate::lie_coefficients::{coeffs_for, CouplingProfile, EvolutionCoefficients};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPoint<T> {
    pub coeffs: EvolutionCoefficients<T>,
    pub moments: Moments<T>,
    pub sigma: CovarianceMatrix<T>,
    pub delta: DeltaResult<T>,
    pub witness: T,
}

pub fn evaluate_coeffs<T: Real>(coeffs: EvolutionCoefficients<T>, initial: &InitialState<T>) -> Result<AnalyticPoint<T>> {
    let moments = moments(&coeffs, initial)?;
    let sigma = covariance_from_moments(&moments)?;
    let delta = delta(&sigma, initial)?;
    let witness = araki_lieb_witness(&sigma, initial)?;
    Ok(AnalyticPoint { coeffs, moments, sigma, delta, witness })
}

pub fn evaluate<T: Real>(profile: &CouplingProfile<T>, initial: &InitialState<T>, tau: T) -> Result<AnalyticPoint<T>> {
    evaluate_coeffs(coeffs_for(profile, tau)?, initial)
}
