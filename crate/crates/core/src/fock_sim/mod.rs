//! Truncated Fock-space engine for the two-mode system.
//!
//! Basis states `|n, k>` (photons, phonons) are stored at index
//! `n * n_phonon + k`. Evolution is in the frame rotating with the optical
//! frequency, so the Hamiltonian is `N_b - g(tau) N_a (b + b^dag)` and the
//! results compare directly with the closed-form engine.

mod dynamics;
mod observables;
mod propagator;
mod state;

pub use dynamics::{evolve_closed, evolve_lindblad, Trajectory, TrajectoryDiagnostics};
pub use observables::{
    delta_numeric, moments_numeric, reduced_entropies, truncation_check, von_neumann_entropy, TruncationReport,
};
pub use propagator::ConstantPropagator;
pub use state::{fidelity_with_pure, make_initial, FockState, Representation};

use crate::error::{Error, Result};

/// Largest Hilbert-space dimension handled with dense matrices.
pub const DIMENSION_BUDGET: usize = 4096;
/// Population allowed outside the truncated space when building initial states.
pub const LEAK_TOL: f64 = 1e-8;
/// Population allowed in the top two levels of either mode during damped evolution.
pub const TOP_POPULATION_TOL: f64 = 1e-6;
/// Eigenvalues below this are dropped from entropy sums.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    n_photon: usize,
    n_phonon: usize,
}

impl Truncation {
    pub fn new(n_photon: usize, n_phonon: usize) -> Result<Self> {
        if n_photon < 2 || n_phonon < 2 {
            return Err(Error::InvalidParameter(format!(
                "truncation needs at least two levels per mode, got ({n_photon}, {n_phonon})"
            )));
        }
        let dim = n_photon * n_phonon;
        if dim > DIMENSION_BUDGET {
            return Err(Error::DimensionBudget { dim, budget: DIMENSION_BUDGET });
        }
        Ok(Self { n_photon, n_phonon })
    }

    /// Levels suggested for the given amplitudes and largest displacement `|F|`.
    ///
    /// Photons: `|mu_c|^2 + 6|mu_c| + 10`. Phonons: the mean phonon number of the
    /// most displaced block, `(|mu_m| + |F| (n_photon - 1))^2`, capped by the budget.
    pub fn heuristic(mu_c: f64, mu_m: f64, f_max: f64) -> Result<Self> {
        let n_photon = (mu_c * mu_c + 6.0 * mu_c + 10.0).ceil() as usize;
        let cap = (DIMENSION_BUDGET / n_photon.max(1)).max(2);
        let shift = mu_m + f_max * (n_photon as f64 - 1.0);
        let wanted = (shift * shift).ceil().max(2.0);
        let n_phonon = if wanted >= cap as f64 { cap } else { wanted as usize };
        Self::new(n_photon, n_phonon)
    }

    pub fn n_photon(&self) -> usize {
        self.n_photon
    }

    pub fn n_phonon(&self) -> usize {
        self.n_phonon
    }

    pub fn dim(&self) -> usize {
        self.n_photon * self.n_phonon
    }

    pub fn index(&self, n: usize, k: usize) -> usize {
        n * self.n_phonon + k
    }
}

/// Dimensionless decay rates (in units of the mechanical frequency).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseConfig {
    pub kappa_c: f64,
    pub kappa_m: f64,
}

impl NoiseConfig {
    pub fn new(kappa_c: f64, kappa_m: f64) -> Result<Self> {
        for (name, v) in [("kappa_c", kappa_c), ("kappa_m", kappa_m)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { kappa_c, kappa_m })
    }

    pub fn is_closed(&self) -> bool {
        self.kappa_c == 0.0 && self.kappa_m == 0.0
    }
}

/// Fixed-step RK4 settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    /// Upper bound on the step for pure state vectors.
    pub max_dt_pure: f64,
    /// Upper bound on the step for density matrices.
    pub max_dt_density: f64,
    /// The step also stays below `stability / spectral bound of the generator`.
    pub stability: f64,
    /// Re-run with half the step and compare reported observables.
    pub halving_check: bool,
    pub halving_tol: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self { max_dt_pure: 1e-3, max_dt_density: 2.5e-3, stability: 2.5, halving_check: false, halving_tol: 1e-6 }
    }
}

impl StepperConfig {
    /// Same bound for both representations.
    pub fn with_max_dt(self, dt: f64) -> Self {
        Self { max_dt_pure: dt, max_dt_density: dt, ..self }
    }

    pub fn with_halving_check(self) -> Self {
        Self { halving_check: true, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.max_dt_pure > 0.0) || !(self.max_dt_density > 0.0) || !(self.stability > 0.0) || !(self.halving_tol > 0.0) {
            return Err(Error::InvalidParameter("stepper settings must be positive".into()));
        }
        Ok(())
    }
}
