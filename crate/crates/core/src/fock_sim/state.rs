use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Truncation, LEAK_TOL};
use crate::covariance::{InitialState, Mechanics};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Pure(Vec<Complex64>),
    Density(DMatrix<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub(super) repr: Representation,
    pub(super) trunc: Truncation,
    pub(super) time: f64,
}

impl FockState {
    pub fn pure(trunc: Truncation, time: f64, psi: Vec<Complex64>) -> Result<Self> {
        if psi.len() != trunc.dim() {
            return Err(Error::InvalidParameter(format!("state length {} != dimension {}", psi.len(), trunc.dim())));
        }
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvariantViolation(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { repr: Representation::Pure(psi), trunc, time })
    }

    pub fn density(trunc: Truncation, time: f64, rho: DMatrix<Complex64>) -> Result<Self> {
        let d = trunc.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::InvalidParameter(format!("density matrix shape {:?} != {d}", rho.shape())));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(Error::InvariantViolation(format!("trace {tr} differs from 1")));
        }
        let herm = (&rho - rho.adjoint()).iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        if herm > 1e-10 {
            return Err(Error::InvariantViolation(format!("density matrix not Hermitian ({herm:e})")));
        }
        Ok(Self { repr: Representation::Density(rho), trunc, time })
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Representation::Pure(_))
    }

    pub fn to_density_matrix(&self) -> DMatrix<Complex64> {
        match &self.repr {
            Representation::Density(rho) => rho.clone(),
            Representation::Pure(psi) => {
                let d = psi.len();
                DMatrix::from_fn(d, d, |r, c| psi[r] * psi[c].conj())
            }
        }
    }

    pub fn into_density(self) -> Self {
        let rho = self.to_density_matrix();
        Self { repr: Representation::Density(rho), ..self }
    }

    /// Probability of each basis state.
    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            Representation::Pure(psi) => psi.iter().map(|c| c.norm_sqr()).collect(),
            Representation::Density(rho) => (0..rho.nrows()).map(|i| rho[(i, i)].re).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.populations().iter().sum()
    }
}

/// `<psi|rho|psi>` with `psi` pure; `|<psi|phi>|^2` when both are pure.
pub fn fidelity_with_pure(psi: &FockState, other: &FockState) -> Result<f64> {
    let Representation::Pure(v) = &psi.repr else {
        return Err(Error::InvalidParameter("first argument must be a pure state".into()));
    };
    if psi.trunc != other.trunc {
        return Err(Error::InvalidParameter("states live in different truncations".into()));
    }
    match &other.repr {
        Representation::Pure(w) => {
            let ov: Complex64 = v.iter().zip(w).map(|(a, b)| a.conj() * b).sum();
            Ok(ov.norm_sqr())
        }
        Representation::Density(rho) => {
            let d = v.len();
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..d {
                let col = rho.column(c);
                let inner: Complex64 = (0..d).map(|r| v[r].conj() * col[r]).sum();
                acc += inner * v[c];
            }
            Ok(acc.re)
        }
    }
}

/// Truncated coherent amplitudes and the discarded probability.
fn coherent_amplitudes(mu: Complex64, levels: usize) -> (Vec<Complex64>, f64) {
    let mut amp = Vec::with_capacity(levels);
    let mut c = Complex64::new((-0.5 * mu.norm_sqr()).exp(), 0.0);
    amp.push(c);
    for n in 1..levels {
        c = c * mu / (n as f64).sqrt();
        amp.push(c);
    }
    let kept: f64 = amp.iter().map(|a| a.norm_sqr()).sum();
    let leaked = (1.0 - kept).max(0.0);
    let scale = 1.0 / kept.sqrt();
    (amp.into_iter().map(|a| a * scale).collect(), leaked)
}

/// Geometric occupation `nbar^n / (1 + nbar)^(n+1)`, renormalised, with the discarded tail.
fn thermal_populations(nbar: f64, levels: usize) -> (Vec<f64>, f64) {
    let ratio = nbar / (1.0 + nbar);
    let mut p = Vec::with_capacity(levels);
    let mut w = 1.0 / (1.0 + nbar);
    for _ in 0..levels {
        p.push(w);
        w *= ratio;
    }
    let leaked = ratio.powi(levels as i32);
    let kept: f64 = p.iter().sum();
    (p.into_iter().map(|x| x / kept).collect(), leaked)
}

/// Coherent optics with coherent mechanics (pure) or thermal mechanics (mixed).
pub fn make_initial(initial: &InitialState<f64>, trunc: Truncation) -> Result<FockState> {
    let (photons, leak_c) = coherent_amplitudes(initial.mu_c, trunc.n_photon());
    if leak_c > LEAK_TOL {
        return Err(Error::TruncationTooSmall {
            leaked: leak_c,
            detail: format!("photon cutoff {} for |mu_c| = {}", trunc.n_photon(), initial.mu_c.norm()),
        });
    }
    match initial.mechanics {
        Mechanics::Coherent { mu_m } => {
            let (phonons, leak_m) = coherent_amplitudes(mu_m, trunc.n_phonon());
            if leak_m > LEAK_TOL {
                return Err(Error::TruncationTooSmall {
                    leaked: leak_m,
                    detail: format!("phonon cutoff {} for |mu_m| = {}", trunc.n_phonon(), mu_m.norm()),
                });
            }
            let mut psi = vec![Complex64::new(0.0, 0.0); trunc.dim()];
            for (n, a) in photons.iter().enumerate() {
                for (k, b) in phonons.iter().enumerate() {
                    psi[trunc.index(n, k)] = a * b;
                }
            }
            Ok(FockState { repr: Representation::Pure(psi), trunc, time: 0.0 })
        }
        Mechanics::Thermal { nbar } => {
            if !(nbar >= 0.0) {
                return Err(Error::InvalidParameter(format!("nbar must be >= 0, got {nbar}")));
            }
            let (p, leak_m) = thermal_populations(nbar, trunc.n_phonon());
            if leak_m > LEAK_TOL {
                return Err(Error::TruncationTooSmall {
                    leaked: leak_m,
                    detail: format!("phonon cutoff {} for nbar = {nbar}", trunc.n_phonon()),
                });
            }
            let d = trunc.dim();
            let nb = trunc.n_phonon();
            let rho = DMatrix::from_fn(d, d, |r, c| {
                let (k, l) = (r % nb, c % nb);
                if k != l {
                    return Complex64::new(0.0, 0.0);
                }
                photons[r / nb] * photons[c / nb].conj() * p[k]
            });
            Ok(FockState { repr: Representation::Density(rho), trunc, time: 0.0 })
        }
    }
}
