use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{FockState, Representation};
use super::EIGENVALUE_FLOOR;
use crate::covariance::{covariance_from_moments, Moments};
use crate::entropy_measure::{delta_with_entropy, DeltaResult};
use crate::error::Result;

/// `Tr(rho O)` for an operator mapping each basis state `|n, k>` to `c |n', k'>` (or zero).
fn expect<F>(state: &FockState, op: F) -> Complex64
where
    F: Fn(usize, usize) -> Option<(usize, usize, f64)>,
{
    let t = state.trunc;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..t.n_photon() {
        for k in 0..t.n_phonon() {
            let Some((n2, k2, c)) = op(n, k) else { continue };
            if n2 >= t.n_photon() || k2 >= t.n_phonon() {
                continue;
            }
            let (i, j) = (t.index(n, k), t.index(n2, k2));
            let rho_ij = match &state.repr {
                Representation::Pure(psi) => psi[i] * psi[j].conj(),
                Representation::Density(rho) => rho[(i, j)],
            };
            acc += rho_ij * c;
        }
    }
    acc
}

fn sqrt_prod(a: usize, b: usize) -> f64 {
    ((a * b) as f64).sqrt()
}

/// The eight first and second moments by direct expectation on the truncated space.
pub fn moments_numeric(state: &FockState) -> Moments<f64> {
    Moments {
        a1: expect(state, |n, k| (n >= 1).then(|| (n - 1, k, (n as f64).sqrt()))),
        b1: expect(state, |n, k| (k >= 1).then(|| (n, k - 1, (k as f64).sqrt()))),
        a2: expect(state, |n, k| (n >= 2).then(|| (n - 2, k, sqrt_prod(n, n - 1)))),
        b2: expect(state, |n, k| (k >= 2).then(|| (n, k - 2, sqrt_prod(k, k - 1)))),
        na: expect(state, |n, k| Some((n, k, n as f64))),
        nb: expect(state, |n, k| Some((n, k, k as f64))),
        ab: expect(state, |n, k| (n >= 1 && k >= 1).then(|| (n - 1, k - 1, sqrt_prod(n, k)))),
        ab_dag: expect(state, |n, k| (n >= 1).then(|| (n - 1, k + 1, sqrt_prod(n, k + 1)))),
    }
}

fn entropy_of(m: DMatrix<Complex64>) -> f64 {
    m.symmetric_eigenvalues()
        .iter()
        .filter(|&&l| l > EIGENVALUE_FLOOR)
        .map(|&l| -l * l.ln())
        .sum()
}

/// `-Tr(rho ln rho)`; zero for pure vectors.
pub fn von_neumann_entropy(state: &FockState) -> f64 {
    match &state.repr {
        Representation::Pure(_) => 0.0,
        Representation::Density(rho) => entropy_of(rho.clone()),
    }
}

/// Entropies of the optical and mechanical reduced states.
pub fn reduced_entropies(state: &FockState) -> (f64, f64) {
    let t = state.trunc;
    let (np, nb) = (t.n_photon(), t.n_phonon());
    let z = Complex64::new(0.0, 0.0);
    let mut rho_a = DMatrix::from_element(np, np, z);
    let mut rho_b = DMatrix::from_element(nb, nb, z);
    match &state.repr {
        Representation::Pure(psi) => {
            for n in 0..np {
                for m in 0..np {
                    rho_a[(n, m)] = (0..nb).map(|k| psi[t.index(n, k)] * psi[t.index(m, k)].conj()).sum();
                }
            }
            for k in 0..nb {
                for l in 0..nb {
                    rho_b[(k, l)] = (0..np).map(|n| psi[t.index(n, k)] * psi[t.index(n, l)].conj()).sum();
                }
            }
        }
        Representation::Density(rho) => {
            for n in 0..np {
                for m in 0..np {
                    rho_a[(n, m)] = (0..nb).map(|k| rho[(t.index(n, k), t.index(m, k))]).sum();
                }
            }
            for k in 0..nb {
                for l in 0..nb {
                    rho_b[(k, l)] = (0..np).map(|n| rho[(t.index(n, k), t.index(n, l))]).sum();
                }
            }
        }
    }
    (entropy_of(rho_a), entropy_of(rho_b))
}

/// `S(rho_G) - S(rho)` with the Gaussian reference built from the numeric moments.
pub fn delta_numeric(state: &FockState) -> Result<DeltaResult<f64>> {
    let sigma = covariance_from_moments(&moments_numeric(state))?;
    delta_with_entropy(&sigma, von_neumann_entropy(state))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    /// Population with photon number in the top two levels.
    pub photon_top: f64,
    /// Population with phonon number in the top two levels.
    pub phonon_top: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn truncation_check(state: &FockState, tol: f64) -> TruncationReport {
    let t = state.trunc;
    let (np, nb) = (t.n_photon(), t.n_phonon());
    let pop = state.populations();
    let mut photon_top = 0.0;
    let mut phonon_top = 0.0;
    for n in 0..np {
        for k in 0..nb {
            let p = pop[t.index(n, k)];
            if n + 2 >= np {
                photon_top += p;
            }
            if k + 2 >= nb {
                phonon_top += p;
            }
        }
    }
    TruncationReport { photon_top, phonon_top, tol, pass: photon_top < tol && phonon_top < tol }
}
