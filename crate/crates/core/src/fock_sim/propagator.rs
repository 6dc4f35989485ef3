use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::state::{FockState, Representation};
use super::Truncation;
use crate::error::{Error, Result};

/// Exact evolution for constant coupling.
///
/// `H` commutes with the photon number, and each block
/// `H_n = N_b - g0 n (b + b^dag)` is a real symmetric tridiagonal matrix that is
/// diagonalised once.
#[derive(Debug, Clone)]
pub struct ConstantPropagator {
    trunc: Truncation,
    blocks: Vec<(DVector<f64>, DMatrix<f64>)>,
}

impl ConstantPropagator {
    pub fn new(g0: f64, trunc: Truncation) -> Result<Self> {
        if !g0.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling must be finite, got {g0}")));
        }
        let nb = trunc.n_phonon();
        let blocks = (0..trunc.n_photon())
            .map(|n| {
                let gn = g0 * n as f64;
                let h = DMatrix::from_fn(nb, nb, |i, j| {
                    if i == j {
                        i as f64
                    } else if i + 1 == j {
                        -gn * (j as f64).sqrt()
                    } else if j + 1 == i {
                        -gn * (i as f64).sqrt()
                    } else {
                        0.0
                    }
                });
                let e = SymmetricEigen::new(h);
                (e.eigenvalues, e.eigenvectors)
            })
            .collect();
        Ok(Self { trunc, blocks })
    }

    /// Unitary for elapsed time `tau`, block diagonal in photon number.
    pub fn unitary(&self, tau: f64) -> DMatrix<Complex64> {
        let nb = self.trunc.n_phonon();
        let d = self.trunc.dim();
        let mut u = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for (n, (vals, vecs)) in self.blocks.iter().enumerate() {
            let phases: Vec<Complex64> = vals.iter().map(|l| Complex64::from_polar(1.0, -l * tau)).collect();
            for i in 0..nb {
                for j in 0..nb {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (q, ph) in phases.iter().enumerate() {
                        acc += ph * (vecs[(i, q)] * vecs[(j, q)]);
                    }
                    u[(n * nb + i, n * nb + j)] = acc;
                }
            }
        }
        u
    }

    /// Evolves `state` forward by `tau`.
    pub fn apply(&self, state: &FockState, tau: f64) -> Result<FockState> {
        if state.trunc != self.trunc {
            return Err(Error::InvalidParameter("propagator built for a different truncation".into()));
        }
        let nb = self.trunc.n_phonon();
        let repr = match &state.repr {
            Representation::Pure(psi) => {
                let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
                for (n, (vals, vecs)) in self.blocks.iter().enumerate() {
                    let block = &psi[n * nb..(n + 1) * nb];
                    for (q, l) in vals.iter().enumerate() {
                        let proj: Complex64 = (0..nb).map(|k| block[k] * vecs[(k, q)]).sum();
                        let c = proj * Complex64::from_polar(1.0, -l * tau);
                        for k in 0..nb {
                            out[n * nb + k] += c * vecs[(k, q)];
                        }
                    }
                }
                Representation::Pure(out)
            }
            Representation::Density(rho) => {
                let u = self.unitary(tau);
                Representation::Density(&u * rho * u.adjoint())
            }
        };
        Ok(FockState { repr, trunc: self.trunc, time: state.time + tau })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::InitialState;
    use crate::fock_sim::{make_initial, moments_numeric};

    #[test]
    fn zero_coupling_is_a_phonon_phase() {
        let t = Truncation::new(9, 12).unwrap();
        let p = ConstantPropagator::new(0.0, t).unwrap();
        let s = make_initial(&InitialState::coherent(Complex64::new(0.5, 0.0), Complex64::new(0.7, 0.0)), t).unwrap();
        let tau = 0.9;
        let e = p.apply(&s, tau).unwrap();
        let b = moments_numeric(&e).b1;
        let want = moments_numeric(&s).b1 * Complex64::from_polar(1.0, -tau);
        assert!((b - want).norm() < 1e-14);
    }

    #[test]
    fn unitary_is_unitary_and_matches_vector_action() {
        let t = Truncation::new(8, 12).unwrap();
        let p = ConstantPropagator::new(0.6, t).unwrap();
        let u = p.unitary(2.2);
        let err = (&u * u.adjoint() - DMatrix::identity(t.dim(), t.dim())).iter().fold(0.0_f64, |m, x| m.max(x.norm()));
        assert!(err < 1e-13);
        let s = make_initial(&InitialState::coherent(Complex64::new(0.3, 0.1), Complex64::new(0.0, 0.0)), t).unwrap();
        let a = p.apply(&s, 2.2).unwrap().to_density_matrix();
        let b = p.apply(&s.clone().into_density(), 2.2).unwrap().to_density_matrix();
        assert!((a - b).iter().fold(0.0_f64, |m, x| m.max(x.norm())) < 1e-13);
    }
}
