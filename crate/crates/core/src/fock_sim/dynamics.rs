use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::observables::{delta_numeric, moments_numeric, truncation_check};
use super::state::{FockState, Representation};
use super::{NoiseConfig, StepperConfig, Truncation, TOP_POPULATION_TOL};
use crate::error::{Error, Result};
use crate::lie_coefficients::CouplingProfile;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDiagnostics {
    /// RK4 steps taken over the whole grid.
    pub steps: usize,
    /// Largest step used.
    pub dt: f64,
    /// `max |Tr rho - 1|` over the grid.
    pub max_trace_drift: f64,
    /// Largest population found in the top two levels of either mode.
    pub max_top_population: f64,
    /// Largest change of delta or any moment under step halving, when checked.
    pub halving_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// One state per grid point, the first being the input.
    pub states: Vec<FockState>,
    pub diagnostics: TrajectoryDiagnostics,
}

struct Generator {
    np: usize,
    nb: usize,
    sq: Vec<f64>,
    noise: NoiseConfig,
}

impl Generator {
    fn new(trunc: Truncation, noise: NoiseConfig) -> Self {
        let nb = trunc.n_phonon();
        let np = trunc.n_photon();
        let sq = (0..=nb.max(np)).map(|k| (k as f64).sqrt()).collect();
        Self { np, nb, sq, noise }
    }

    /// Bound on the spectral radius of `H` for coupling bounded by `g_max`.
    fn hamiltonian_bound(&self, g_max: f64) -> f64 {
        (self.nb - 1) as f64 + 2.0 * g_max * (self.np - 1) as f64 * self.sq[self.nb - 1]
    }

    fn pure_rhs(&self, g: f64, x: &[Complex64], out: &mut [Complex64]) {
        let nb = self.nb;
        let minus_i = Complex64::new(0.0, -1.0);
        for (n, (xb, ob)) in x.chunks(nb).zip(out.chunks_mut(nb)).enumerate() {
            let gn = g * n as f64;
            for k in 0..nb {
                let mut hx = xb[k] * k as f64;
                if k > 0 {
                    hx -= xb[k - 1] * (gn * self.sq[k]);
                }
                if k + 1 < nb {
                    hx -= xb[k + 1] * (gn * self.sq[k + 1]);
                }
                ob[k] = minus_i * hx;
            }
        }
    }

    /// Column-major density matrix of dimension `np * nb`.
    fn density_rhs(&self, g: f64, x: &[Complex64], out: &mut [Complex64]) {
        let (np, nb) = (self.np, self.nb);
        let d = np * nb;
        let sq = &self.sq;
        let kc = self.noise.kappa_c;
        let km = self.noise.kappa_m;
        let minus_i = Complex64::new(0.0, -1.0);
        out.par_chunks_mut(d).enumerate().for_each(|(c, oc)| {
            let (m, l) = (c / nb, c % nb);
            let col = &x[c * d..(c + 1) * d];
            let left = (l > 0).then(|| &x[(c - 1) * d..c * d]);
            let right = (l + 1 < nb).then(|| &x[(c + 1) * d..(c + 2) * d]);
            let photon_jump = (m + 1 < np).then(|| &x[(c + nb) * d..(c + nb + 1) * d]);
            let gm = g * m as f64;
            let lf = l as f64;
            for n in 0..np {
                let gn = g * n as f64;
                let base = n * nb;
                for k in 0..nb {
                    let r = base + k;
                    let v = col[r];
                    let mut comm = v * (k as f64 - lf);
                    if k > 0 {
                        comm -= col[r - 1] * (gn * sq[k]);
                    }
                    if k + 1 < nb {
                        comm -= col[r + 1] * (gn * sq[k + 1]);
                    }
                    if let Some(left) = left {
                        comm += left[r] * (gm * sq[l]);
                    }
                    if let Some(right) = right {
                        comm += right[r] * (gm * sq[l + 1]);
                    }
                    let mut dv = minus_i * comm;
                    if kc > 0.0 {
                        if let Some(jump) = photon_jump {
                            if n + 1 < np {
                                dv += jump[r + nb] * (kc * sq[n + 1] * sq[m + 1]);
                            }
                        }
                        dv -= v * (0.5 * kc * (n + m) as f64);
                    }
                    if km > 0.0 {
                        if let Some(right) = right {
                            if k + 1 < nb {
                                dv += right[r + 1] * (km * sq[k + 1] * sq[l + 1]);
                            }
                        }
                        dv -= v * (0.5 * km * (k + l) as f64);
                    }
                    oc[r] = dv;
                }
            }
        });
    }
}

struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4 {
    fn new(len: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); len];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    fn step<F: Fn(f64, &[Complex64], &mut [Complex64])>(&mut self, f: &F, g_at: &dyn Fn(f64) -> f64, t: f64, h: f64, x: &mut [Complex64]) {
        let half = 0.5 * h;
        f(g_at(t), x, &mut self.k1);
        axpy_into(&mut self.tmp, x, half, &self.k1);
        f(g_at(t + half), &self.tmp, &mut self.k2);
        axpy_into(&mut self.tmp, x, half, &self.k2);
        f(g_at(t + half), &self.tmp, &mut self.k3);
        axpy_into(&mut self.tmp, x, h, &self.k3);
        f(g_at(t + h), &self.tmp, &mut self.k4);
        let w = h / 6.0;
        x.par_iter_mut()
            .zip(self.k1.par_iter())
            .zip(self.k2.par_iter())
            .zip(self.k3.par_iter())
            .zip(self.k4.par_iter())
            .for_each(|((((xi, a), b), c), d)| *xi += (a + (b + c) * 2.0 + d) * w);
    }
}

fn axpy_into(out: &mut [Complex64], x: &[Complex64], a: f64, y: &[Complex64]) {
    out.par_iter_mut().zip(x.par_iter()).zip(y.par_iter()).for_each(|((o, xi), yi)| *o = xi + yi * a);
}

fn check_grid(state: &FockState, grid: &[f64], profile: &CouplingProfile<f64>) -> Result<()> {
    let Some(&first) = grid.first() else {
        return Err(Error::InvalidParameter("time grid is empty".into()));
    };
    if (first - state.time).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("time grid starts at {first}, state is at {}", state.time)));
    }
    if grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter("time grid must be non-decreasing".into()));
    }
    profile.check_domain(*grid.last().unwrap_or(&first))
}

/// Steps for one grid interval: equal substeps no longer than `dt`.
fn substeps(interval: f64, dt: f64) -> usize {
    if interval <= 0.0 {
        0
    } else {
        (interval / dt).ceil().max(1.0) as usize
    }
}

fn run(
    state: &FockState,
    profile: &CouplingProfile<f64>,
    noise: NoiseConfig,
    grid: &[f64],
    stepper: &StepperConfig,
    refine: usize,
    check_top: bool,
) -> Result<Trajectory> {
    let trunc = state.trunc;
    let gen = Generator::new(trunc, noise);
    let g_max = profile.bound();
    let g_at = |t: f64| profile.value(t);
    let mut states = Vec::with_capacity(grid.len());
    let mut steps = 0usize;
    let mut dt_used: f64 = 0.0;
    let mut max_drift: f64 = 0.0;
    let mut max_top: f64 = 0.0;

    let density = !state.is_pure() || !noise.is_closed();
    let spectral = if density {
        2.0 * gen.hamiltonian_bound(g_max)
            + noise.kappa_c * (gen.np - 1) as f64
            + noise.kappa_m * (gen.nb - 1) as f64
    } else {
        gen.hamiltonian_bound(g_max)
    };
    let max_dt = if density { stepper.max_dt_density } else { stepper.max_dt_pure };
    let dt = max_dt.min(stepper.stability / spectral.max(1e-300)) / refine as f64;

    let mut x: Vec<Complex64> = if density {
        state.to_density_matrix().as_slice().to_vec()
    } else {
        match &state.repr {
            Representation::Pure(psi) => psi.clone(),
            Representation::Density(_) => unreachable!(),
        }
    };
    let mut rk = Rk4::new(x.len());
    let d = trunc.dim();
    let wrap = |x: &[Complex64], t: f64| -> FockState {
        let repr = if density {
            Representation::Density(DMatrix::from_column_slice(d, d, x))
        } else {
            Representation::Pure(x.to_vec())
        };
        FockState { repr, trunc, time: t }
    };

    let mut t = grid[0];
    for (i, &target) in grid.iter().enumerate() {
        if i > 0 {
            let n = substeps(target - t, dt);
            let h = if n > 0 { (target - t) / n as f64 } else { 0.0 };
            for s in 0..n {
                let ts = t + h * s as f64;
                if density {
                    rk.step(&|g, a: &[Complex64], b: &mut [Complex64]| gen.density_rhs(g, a, b), &g_at, ts, h, &mut x);
                } else {
                    rk.step(&|g, a: &[Complex64], b: &mut [Complex64]| gen.pure_rhs(g, a, b), &g_at, ts, h, &mut x);
                }
            }
            steps += n;
            dt_used = dt_used.max(h);
            t = target;
        }
        let st = wrap(&x, target);
        max_drift = max_drift.max((st.trace() - 1.0).abs());
        let report = truncation_check(&st, TOP_POPULATION_TOL);
        max_top = max_top.max(report.photon_top.max(report.phonon_top));
        if check_top && !report.pass {
            return Err(Error::TruncationTooSmall {
                leaked: report.photon_top.max(report.phonon_top),
                detail: format!(
                    "top-level population at tau = {target}: photons {:e}, phonons {:e} (truncation {}x{})",
                    report.photon_top,
                    report.phonon_top,
                    trunc.n_photon(),
                    trunc.n_phonon()
                ),
            });
        }
        states.push(st);
    }

    Ok(Trajectory {
        states,
        diagnostics: TrajectoryDiagnostics {
            steps,
            dt: dt_used,
            max_trace_drift: max_drift,
            max_top_population: max_top,
            halving_change: None,
        },
    })
}

/// Largest change in delta or in any moment between two trajectories on the same grid.
fn observable_change(a: &[FockState], b: &[FockState]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        worst = worst.max(moments_numeric(x).max_abs_diff(&moments_numeric(y)));
        worst = worst.max((delta_numeric(x)?.delta - delta_numeric(y)?.delta).abs());
    }
    Ok(worst)
}

fn with_halving(
    state: &FockState,
    profile: &CouplingProfile<f64>,
    noise: NoiseConfig,
    grid: &[f64],
    stepper: &StepperConfig,
    check_top: bool,
) -> Result<Trajectory> {
    stepper.validate()?;
    check_grid(state, grid, profile)?;
    let mut traj = run(state, profile, noise, grid, stepper, 1, check_top)?;
    if stepper.halving_check {
        let fine = run(state, profile, noise, grid, stepper, 2, check_top)?;
        let change = observable_change(&traj.states, &fine.states)?;
        traj.diagnostics.halving_change = Some(change);
        if change > stepper.halving_tol {
            return Err(Error::StepSizeTooLarge { change, tol: stepper.halving_tol });
        }
    }
    Ok(traj)
}

/// Unitary evolution; pure inputs stay pure vectors, mixed inputs are propagated as density matrices.
pub fn evolve_closed(
    state: &FockState,
    profile: &CouplingProfile<f64>,
    tau_grid: &[f64],
    stepper: &StepperConfig,
) -> Result<Trajectory> {
    with_halving(state, profile, NoiseConfig::default(), tau_grid, stepper, false)
}

/// Master-equation evolution with photon loss `sqrt(kappa_c) a` and phonon loss `sqrt(kappa_m) b`.
pub fn evolve_lindblad(
    state: &FockState,
    profile: &CouplingProfile<f64>,
    noise: &NoiseConfig,
    tau_grid: &[f64],
    stepper: &StepperConfig,
) -> Result<Trajectory> {
    let rho = state.clone().into_density();
    with_halving(&rho, profile, *noise, tau_grid, stepper, true)
}
