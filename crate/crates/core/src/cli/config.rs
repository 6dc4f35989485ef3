use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::covariance::InitialState;
use crate::fock_sim::{NoiseConfig, StepperConfig, Truncation};
use crate::lie_coefficients::{CouplingProfile, Tabulated};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Analytic,
    Fock,
    Both,
}

impl Engine {
    pub fn uses_analytic(self) -> bool {
        matches!(self, Engine::Analytic | Engine::Both)
    }

    pub fn uses_fock(self) -> bool {
        matches!(self, Engine::Fock | Engine::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Constant,
    Modulated,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MechanicsKind {
    Coherent,
    Thermal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A scalar that may instead list several values to sweep over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    One(f64),
    Many(Vec<f64>),
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::One(x) => vec![*x],
            Axis::Many(v) => v.clone(),
        }
    }

    fn zero() -> Self {
        Axis::One(0.0)
    }
}

impl From<f64> for Axis {
    fn from(x: f64) -> Self {
        Axis::One(x)
    }
}

impl From<Vec<f64>> for Axis {
    fn from(v: Vec<f64>) -> Self {
        Axis::Many(v)
    }
}

fn default_engine() -> Engine {
    Engine::Analytic
}
fn default_profile() -> ProfileKind {
    ProfileKind::Constant
}
fn default_mechanics() -> MechanicsKind {
    MechanicsKind::Coherent
}
fn default_format() -> Format {
    Format::Csv
}
fn default_workers() -> usize {
    1
}
fn default_one() -> Axis {
    Axis::One(1.0)
}
fn default_tolerance() -> f64 {
    1e-3
}

/// Flat run description; every physical scalar may be a list, and the run
/// covers the Cartesian product of all lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_engine")]
    pub engine: Engine,
    #[serde(default = "default_profile")]
    pub profile: ProfileKind,
    #[serde(default = "default_one")]
    pub g0: Axis,
    #[serde(default = "Axis::zero")]
    pub epsilon: Axis,
    #[serde(default = "Axis::zero")]
    pub omega0: Axis,
    /// `(tau, g)` pairs for the tabulated profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<(f64, f64)>>,
    #[serde(default = "default_mechanics")]
    pub mechanics: MechanicsKind,
    #[serde(default = "default_one")]
    pub mu_c: Axis,
    #[serde(default = "Axis::zero")]
    pub mu_m: Axis,
    #[serde(default = "Axis::zero")]
    pub nbar: Axis,
    #[serde(default = "Axis::zero")]
    pub kappa_c: Axis,
    #[serde(default = "Axis::zero")]
    pub kappa_m: Axis,
    pub tau_max: f64,
    pub tau_steps: usize,
    #[serde(default)]
    pub small_mu: bool,
    #[serde(default)]
    pub large_mu: bool,
    #[serde(default)]
    pub leading_log: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Fock truncation; chosen per point from the amplitudes when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_photon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_phonon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dt: Option<f64>,
    #[serde(default)]
    pub halving_check: bool,
    /// Cross-engine tolerance on delta for `compare`.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

/// One point of the parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    pub g0: f64,
    pub epsilon: f64,
    pub omega0: f64,
    pub mu_c: f64,
    pub mu_m: f64,
    pub nbar: f64,
    pub kappa_c: f64,
    pub kappa_m: f64,
}

impl Params {
    pub const NAMES: [&'static str; 8] = ["g0", "epsilon", "omega0", "mu_c", "mu_m", "nbar", "kappa_c", "kappa_m"];

    pub fn values(&self) -> [f64; 8] {
        [self.g0, self.epsilon, self.omega0, self.mu_c, self.mu_m, self.nbar, self.kappa_c, self.kappa_m]
    }

    pub fn describe(&self) -> String {
        Self::NAMES.iter().zip(self.values()).map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(", ")
    }

    pub fn noise(&self) -> NoiseConfig {
        NoiseConfig { kappa_c: self.kappa_c, kappa_m: self.kappa_m }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| bad(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Minimal config for one engine and amplitude, other fields at their defaults.
    pub fn new(engine: Engine, tau_max: f64, tau_steps: usize) -> Self {
        Self {
            engine,
            profile: ProfileKind::Constant,
            g0: default_one(),
            epsilon: Axis::zero(),
            omega0: Axis::zero(),
            samples: None,
            mechanics: MechanicsKind::Coherent,
            mu_c: default_one(),
            mu_m: Axis::zero(),
            nbar: Axis::zero(),
            kappa_c: Axis::zero(),
            kappa_m: Axis::zero(),
            tau_max,
            tau_steps,
            small_mu: false,
            large_mu: false,
            leading_log: false,
            output: None,
            format: Format::Csv,
            workers: 1,
            n_photon: None,
            n_phonon: None,
            max_dt: None,
            halving_check: false,
            tolerance: default_tolerance(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.tau_steps < 2 {
            return Err(bad(format!("tau_steps must be at least 2, got {}", self.tau_steps)));
        }
        if !(self.tau_max > 0.0) || !self.tau_max.is_finite() {
            return Err(bad(format!("tau_max must be positive, got {}", self.tau_max)));
        }
        if self.workers < 1 {
            return Err(bad("workers must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(bad("tolerance must be positive"));
        }
        if let Some(dt) = self.max_dt {
            if !(dt > 0.0) {
                return Err(bad("max_dt must be positive"));
            }
        }
        let axes = [
            ("g0", &self.g0),
            ("epsilon", &self.epsilon),
            ("omega0", &self.omega0),
            ("mu_c", &self.mu_c),
            ("mu_m", &self.mu_m),
            ("nbar", &self.nbar),
            ("kappa_c", &self.kappa_c),
            ("kappa_m", &self.kappa_m),
        ];
        for (name, axis) in axes {
            let v = axis.values();
            if v.is_empty() {
                return Err(bad(format!("{name} lists no values")));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(bad(format!("{name} must be finite")));
            }
        }
        for (name, axis) in [("g0", &self.g0), ("omega0", &self.omega0), ("nbar", &self.nbar), ("kappa_c", &self.kappa_c), ("kappa_m", &self.kappa_m)] {
            if axis.values().iter().any(|x| *x < 0.0) {
                return Err(bad(format!("{name} must be non-negative")));
            }
        }
        let noisy = self.kappa_c.values().iter().chain(self.kappa_m.values().iter()).any(|k| *k > 0.0);
        if noisy && !self.engine.uses_fock() {
            return Err(bad("damping rates need the fock engine"));
        }
        if self.mechanics == MechanicsKind::Coherent && self.nbar.values().iter().any(|n| *n != 0.0) {
            return Err(bad("nbar is only meaningful with thermal mechanics"));
        }
        if self.mechanics == MechanicsKind::Thermal && self.mu_m.values().iter().any(|m| *m != 0.0) {
            return Err(bad("thermal mechanics has no displacement mu_m"));
        }
        match self.profile {
            ProfileKind::Constant => {
                if self.epsilon.values().iter().any(|e| *e != 0.0) {
                    return Err(bad("epsilon needs the modulated profile"));
                }
            }
            ProfileKind::Modulated => {}
            ProfileKind::Tabulated => {
                let Some(samples) = &self.samples else {
                    return Err(bad("tabulated profile needs samples"));
                };
                let tab = Tabulated::new(samples).map_err(|e| bad(e.to_string()))?;
                if tab.start() > 0.0 || tab.end() < self.tau_max {
                    return Err(bad(format!("samples cover [{}, {}] but the run needs [0, {}]", tab.start(), tab.end(), self.tau_max)));
                }
            }
        }
        if self.profile != ProfileKind::Tabulated && self.samples.is_some() {
            return Err(bad("samples given for a non-tabulated profile"));
        }
        if let (Some(np), Some(nb)) = (self.n_photon, self.n_phonon) {
            Truncation::new(np, nb).map_err(|e| bad(e.to_string()))?;
        } else if self.n_photon.is_some() != self.n_phonon.is_some() {
            return Err(bad("give both n_photon and n_phonon or neither"));
        }
        Ok(())
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        let n = self.tau_steps - 1;
        (0..=n).map(|i| if i == n { self.tau_max } else { self.tau_max * i as f64 / n as f64 }).collect()
    }

    /// All sweep points, last axis varying fastest.
    pub fn points(&self) -> Vec<Params> {
        let mut out = vec![];
        for g0 in self.g0.values() {
            for epsilon in self.epsilon.values() {
                for omega0 in self.omega0.values() {
                    for mu_c in self.mu_c.values() {
                        for mu_m in self.mu_m.values() {
                            for nbar in self.nbar.values() {
                                for kappa_c in self.kappa_c.values() {
                                    for kappa_m in self.kappa_m.values() {
                                        out.push(Params { g0, epsilon, omega0, mu_c, mu_m, nbar, kappa_c, kappa_m });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn coupling(&self, p: &Params) -> Result<CouplingProfile<f64>, CliError> {
        Ok(match self.profile {
            ProfileKind::Constant => CouplingProfile::constant(p.g0),
            ProfileKind::Modulated => CouplingProfile::modulated(p.g0, p.epsilon, p.omega0),
            ProfileKind::Tabulated => {
                let samples = self.samples.as_ref().ok_or_else(|| bad("tabulated profile needs samples"))?;
                CouplingProfile::Tabulated(Tabulated::new(samples).map_err(|e| bad(e.to_string()))?)
            }
        })
    }

    pub fn initial(&self, p: &Params) -> Result<InitialState<f64>, CliError> {
        let mu_c = Complex64::new(p.mu_c, 0.0);
        match self.mechanics {
            MechanicsKind::Coherent => Ok(InitialState::coherent(mu_c, Complex64::new(p.mu_m, 0.0))),
            MechanicsKind::Thermal => InitialState::thermal(mu_c, p.nbar).map_err(|e| bad(e.to_string())),
        }
    }

    pub fn stepper(&self) -> StepperConfig {
        let base = StepperConfig::default();
        let base = match self.max_dt {
            Some(dt) => base.with_max_dt(dt),
            None => base,
        };
        if self.halving_check {
            base.with_halving_check()
        } else {
            base
        }
    }
}
