use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{Engine, Format, MechanicsKind, Params, RunConfig};
use super::CliError;
use crate::analytic::evaluate_coeffs;
use crate::covariance::covariance_from_moments;
use crate::entropy_measure::{araki_lieb_bound, delta_large_mu, delta_small_mu, delta_with_entropy};
use crate::error::Error;
use crate::fock_sim::{
    evolve_closed, evolve_lindblad, make_initial, moments_numeric, von_neumann_entropy, Truncation, DIMENSION_BUDGET,
    LEAK_TOL, TOP_POPULATION_TOL,
};
use crate::lie_coefficients::{coeffs_for, EvolutionCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowEngine {
    Analytic,
    Fock,
}

impl RowEngine {
    fn name(self) -> &'static str {
        match self {
            RowEngine::Analytic => "analytic",
            RowEngine::Fock => "fock",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Row {
    pub tau: f64,
    pub delta: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_small_mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_large_mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_leading: Option<f64>,
    pub witness: f64,
    pub engine: RowEngine,
    #[serde(flatten)]
    pub params: Params,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FockDiagnostics {
    pub n_photon: usize,
    pub n_phonon: usize,
    pub steps: usize,
    pub dt: f64,
    pub max_trace_drift: f64,
    pub max_top_population: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halving_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointOutcome {
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<FockDiagnostics>,
    /// `max |delta_analytic - delta_fock|` over the grid when both engines ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<Row>,
    pub points: Vec<PointOutcome>,
    pub max_discrepancy: Option<f64>,
}

/// Files written by [`run_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub data: PathBuf,
    pub sidecar: PathBuf,
    pub rows: usize,
    pub max_discrepancy: Option<f64>,
}

fn engine_err(p: &Params, source: Error) -> CliError {
    CliError::Engine { point: p.describe(), source }
}

struct Asymptotics {
    small: Option<f64>,
    large: Option<f64>,
    leading: Option<f64>,
}

fn asymptotics(cfg: &RunConfig, c: &EvolutionCoefficients<f64>, mu_c: Complex64) -> Asymptotics {
    let large = (cfg.large_mu || cfg.leading_log).then(|| delta_large_mu(c.theta_a(), c.f_complex(), mu_c));
    Asymptotics {
        small: cfg.small_mu.then(|| delta_small_mu(c.f_complex(), mu_c)),
        large: if cfg.large_mu { large.map(|l| l.full) } else { None },
        leading: if cfg.leading_log { large.map(|l| l.leading) } else { None },
    }
}

fn coefficient_grid(cfg: &RunConfig, p: &Params, grid: &[f64]) -> Result<Vec<EvolutionCoefficients<f64>>, CliError> {
    let profile = cfg.coupling(p)?;
    grid.iter().map(|&t| coeffs_for(&profile, t).map_err(|e| engine_err(p, e))).collect()
}

fn analytic_rows(cfg: &RunConfig, p: &Params, coeffs: &[EvolutionCoefficients<f64>]) -> Result<Vec<Row>, CliError> {
    let initial = cfg.initial(p)?;
    coeffs
        .iter()
        .map(|c| {
            let pt = evaluate_coeffs(*c, &initial).map_err(|e| engine_err(p, e))?;
            let a = asymptotics(cfg, c, initial.mu_c);
            Ok(Row {
                tau: c.tau(),
                delta: pt.delta.delta,
                nu_plus: pt.delta.pair.nu_plus,
                nu_minus: pt.delta.pair.nu_minus,
                delta_small_mu: a.small,
                delta_large_mu: a.large,
                delta_leading: a.leading,
                witness: pt.witness,
                engine: RowEngine::Analytic,
                params: *p,
            })
        })
        .collect()
}

/// Explicit truncation from the config, otherwise the amplitude heuristic
/// widened so a thermal phonon tail fits as well.
fn truncation_for(cfg: &RunConfig, p: &Params, f_max: f64) -> Result<Truncation, CliError> {
    if let (Some(np), Some(nb)) = (cfg.n_photon, cfg.n_phonon) {
        return Truncation::new(np, nb).map_err(|e| engine_err(p, e));
    }
    let h = Truncation::heuristic(p.mu_c.abs(), p.mu_m.abs(), f_max).map_err(|e| engine_err(p, e))?;
    if cfg.mechanics == MechanicsKind::Thermal && p.nbar > 0.0 {
        let ratio = p.nbar / (1.0 + p.nbar);
        let tail = (LEAK_TOL.ln() / ratio.ln()).ceil() as usize + 1;
        let cap = DIMENSION_BUDGET / h.n_photon();
        return Truncation::new(h.n_photon(), h.n_phonon().max(tail).min(cap)).map_err(|e| engine_err(p, e));
    }
    Ok(h)
}

fn fock_rows(
    cfg: &RunConfig,
    p: &Params,
    grid: &[f64],
    coeffs: &[EvolutionCoefficients<f64>],
) -> Result<(Vec<Row>, FockDiagnostics), CliError> {
    let err = |e| engine_err(p, e);
    let initial = cfg.initial(p)?;
    let profile = cfg.coupling(p)?;
    let f_max = coeffs.iter().map(|c| c.f_complex().norm()).fold(0.0, f64::max);
    let trunc = truncation_for(cfg, p, f_max)?;
    let start = make_initial(&initial, trunc).map_err(err)?;
    let noise = p.noise();
    let traj = if noise.is_closed() {
        evolve_closed(&start, &profile, grid, &cfg.stepper()).map_err(err)?
    } else {
        evolve_lindblad(&start, &profile, &noise, grid, &cfg.stepper()).map_err(err)?
    };
    let d = traj.diagnostics;
    if d.max_top_population > TOP_POPULATION_TOL {
        return Err(err(Error::TruncationTooSmall {
            leaked: d.max_top_population,
            detail: format!("top two levels of ({}, {}) populated during evolution", trunc.n_photon(), trunc.n_phonon()),
        }));
    }
    let rows = traj
        .states
        .iter()
        .zip(coeffs)
        .map(|(s, c)| {
            let sigma = covariance_from_moments(&moments_numeric(s)).map_err(err)?;
            let entropy = von_neumann_entropy(s);
            let dr = delta_with_entropy(&sigma, entropy).map_err(err)?;
            let witness = araki_lieb_bound(&sigma, entropy).map_err(err)?;
            let a = asymptotics(cfg, c, initial.mu_c);
            Ok(Row {
                tau: s.time(),
                delta: dr.delta,
                nu_plus: dr.pair.nu_plus,
                nu_minus: dr.pair.nu_minus,
                delta_small_mu: a.small,
                delta_large_mu: a.large,
                delta_leading: a.leading,
                witness,
                engine: RowEngine::Fock,
                params: *p,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let diag = FockDiagnostics {
        n_photon: trunc.n_photon(),
        n_phonon: trunc.n_phonon(),
        steps: d.steps,
        dt: d.dt,
        max_trace_drift: d.max_trace_drift,
        max_top_population: d.max_top_population,
        halving_change: d.halving_change,
    };
    Ok((rows, diag))
}

fn run_point(cfg: &RunConfig, p: &Params, grid: &[f64]) -> Result<(Vec<Row>, PointOutcome), CliError> {
    let coeffs = coefficient_grid(cfg, p, grid)?;
    let analytic = if cfg.engine.uses_analytic() { Some(analytic_rows(cfg, p, &coeffs)?) } else { None };
    let fock = if cfg.engine.uses_fock() { Some(fock_rows(cfg, p, grid, &coeffs)?) } else { None };
    let outcome = |truncation, discrepancy| PointOutcome { params: *p, truncation, discrepancy };
    Ok(match (analytic, fock) {
        (Some(a), None) => (a, outcome(None, None)),
        (None, Some((f, diag))) => (f, outcome(Some(diag), None)),
        (Some(a), Some((f, diag))) => {
            let disc = a.iter().zip(&f).map(|(x, y)| (x.delta - y.delta).abs()).fold(0.0, f64::max);
            let rows = a.into_iter().zip(f).flat_map(|(x, y)| [x, y]).collect();
            (rows, outcome(Some(diag), Some(disc)))
        }
        (None, None) => unreachable!("every engine choice runs at least one engine"),
    })
}

/// Evaluates every sweep point; rows come out in point order, then tau order
/// (analytic before fock at each tau), whatever the worker count.
pub fn compute(cfg: &RunConfig) -> Result<SweepResult, CliError> {
    cfg.validate()?;
    let grid = cfg.tau_grid();
    let points = cfg.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", cfg.workers)))?;
    let results: Vec<_> = pool.install(|| points.par_iter().map(|p| run_point(cfg, p, &grid)).collect());
    let mut rows = vec![];
    let mut outcomes = vec![];
    for r in results {
        let (rs, o) = r?;
        rows.extend(rs);
        outcomes.push(o);
    }
    let max_discrepancy = (cfg.engine == Engine::Both)
        .then(|| outcomes.iter().filter_map(|o| o.discrepancy).fold(0.0, f64::max));
    Ok(SweepResult { rows, points: outcomes, max_discrepancy })
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(cfg: &RunConfig, rows: &[Row], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["tau", "delta", "nu_plus", "nu_minus"];
    if cfg.small_mu {
        header.push("delta_small_mu");
    }
    if cfg.large_mu {
        header.push("delta_large_mu");
    }
    if cfg.leading_log {
        header.push("delta_leading");
    }
    header.extend(["witness", "engine"]);
    header.extend(Params::NAMES);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(&header).map_err(io)?;
    for r in rows {
        let mut rec = vec![fmt(r.tau), fmt(r.delta), fmt(r.nu_plus), fmt(r.nu_minus)];
        rec.extend([r.delta_small_mu, r.delta_large_mu, r.delta_leading].into_iter().flatten().map(fmt));
        rec.push(fmt(r.witness));
        rec.push(r.engine.name().to_string());
        rec.extend(r.params.values().into_iter().map(fmt));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn sidecar_path(data: &Path) -> PathBuf {
    data.with_extension("meta.json")
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    rows: usize,
    points: &'a [PointOutcome],
    #[serde(skip_serializing_if = "Option::is_none")]
    max_discrepancy: Option<f64>,
    wall_time_s: f64,
}

/// Runs the sweep and writes the data file plus a `.meta.json` sidecar next to it.
pub fn run_sweep(cfg: &RunConfig, out: &Path) -> Result<SweepOutput, CliError> {
    let clock = Instant::now();
    let result = compute(cfg)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    match cfg.format {
        Format::Csv => {
            let file = std::fs::File::create(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
            write_csv(cfg, &result.rows, std::io::BufWriter::new(file))?;
        }
        Format::Json => write_json(out, &result.rows)?,
    }
    let sidecar = sidecar_path(out);
    write_json(
        &sidecar,
        &Sidecar {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config: cfg,
            rows: result.rows.len(),
            points: &result.points,
            max_discrepancy: result.max_discrepancy,
            wall_time_s: clock.elapsed().as_secs_f64(),
        },
    )?;
    Ok(SweepOutput { data: out.to_path_buf(), sidecar, rows: result.rows.len(), max_discrepancy: result.max_discrepancy })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauDiscrepancy {
    pub tau: f64,
    pub analytic: f64,
    pub fock: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointComparison {
    pub params: Params,
    pub truncation: Option<FockDiagnostics>,
    pub per_tau: Vec<TauDiscrepancy>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub tolerance: f64,
    pub max: f64,
    pub mean: f64,
    pub pass: bool,
    pub points: Vec<PointComparison>,
}

/// Runs both engines over the config's sweep and tabulates `|delta_analytic - delta_fock|`.
pub fn compare_engines(cfg: &RunConfig) -> Result<CompareReport, CliError> {
    let both = RunConfig { engine: Engine::Both, ..cfg.clone() };
    let result = compute(&both)?;
    let per_point = 2 * both.tau_steps;
    let mut points = vec![];
    let mut diffs = vec![];
    for (chunk, outcome) in result.rows.chunks(per_point).zip(&result.points) {
        let per_tau: Vec<_> = chunk
            .chunks(2)
            .map(|pair| TauDiscrepancy {
                tau: pair[0].tau,
                analytic: pair[0].delta,
                fock: pair[1].delta,
                abs_diff: (pair[0].delta - pair[1].delta).abs(),
            })
            .collect();
        diffs.extend(per_tau.iter().map(|d| d.abs_diff));
        points.push(PointComparison { params: outcome.params, truncation: outcome.truncation, per_tau });
    }
    let max = diffs.iter().copied().fold(0.0, f64::max);
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    Ok(CompareReport { tolerance: cfg.tolerance, max, mean, pass: max <= cfg.tolerance, points })
}

impl CompareReport {
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_json(path, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn analytic_sweep_recurs_at_two_pi() {
        let mut cfg = RunConfig::new(Engine::Analytic, 2.0 * PI, 201);
        cfg.mu_c = 1.0.into();
        let res = compute(&cfg).unwrap();
        assert_eq!(res.rows.len(), 201);
        assert!(res.rows.iter().all(|r| r.delta >= 0.0 && r.nu_minus >= 1.0 && r.witness <= r.delta));
        assert!(res.rows[0].delta <= 1e-9 && res.rows[200].delta <= 1e-9);
        assert!(res.max_discrepancy.is_none());
    }

    #[test]
    fn csv_is_independent_of_worker_count() {
        let mut cfg = RunConfig::new(Engine::Analytic, 3.0, 7);
        cfg.mu_c = vec![0.5, 1.0, 2.0, 5.0].into();
        cfg.g0 = vec![0.5, 1.0].into();
        cfg.small_mu = true;
        cfg.large_mu = true;
        let csv_with = |workers| {
            let mut buf = vec![];
            let c = RunConfig { workers, ..cfg.clone() };
            write_csv(&c, &compute(&c).unwrap().rows, &mut buf).unwrap();
            buf
        };
        let one = csv_with(1);
        assert_eq!(one, csv_with(4));
        let text = String::from_utf8(one).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "tau,delta,nu_plus,nu_minus,delta_small_mu,delta_large_mu,witness,engine,g0,epsilon,omega0,mu_c,mu_m,nbar,kappa_c,kappa_m"
        );
        assert_eq!(text.lines().count(), 1 + 8 * 7);
        assert!(lines.next().unwrap().starts_with("0.0000000000000000e0,"));
    }

    #[test]
    fn zero_coupling_engines_agree_exactly() {
        let mut cfg = RunConfig::new(Engine::Both, 2.0, 5);
        cfg.g0 = 0.0.into();
        cfg.mu_c = 0.4.into();
        cfg.n_photon = Some(10);
        cfg.n_phonon = Some(6);
        let report = compare_engines(&cfg).unwrap();
        assert!(report.max <= 1e-9, "{}", report.max);
        assert!(report.pass);
        assert_eq!(report.points[0].per_tau.len(), 5);
    }

    #[test]
    fn both_engines_interleave_rows() {
        let mut cfg = RunConfig::new(Engine::Both, 1.0, 3);
        cfg.mu_c = 0.3.into();
        cfg.g0 = 0.5.into();
        cfg.n_photon = Some(9);
        cfg.n_phonon = Some(30);
        let res = compute(&cfg).unwrap();
        let engines: Vec<_> = res.rows.iter().map(|r| r.engine).collect();
        assert_eq!(engines, [RowEngine::Analytic, RowEngine::Fock].repeat(3));
        assert!(res.max_discrepancy.unwrap() < 1e-3);
        assert_eq!(res.points[0].truncation.unwrap().n_phonon, 30);
    }

    #[test]
    fn overfull_truncation_names_the_point() {
        let mut cfg = RunConfig::new(Engine::Fock, PI, 3);
        cfg.mu_c = 5.0.into();
        cfg.n_photon = Some(30);
        cfg.n_phonon = Some(40);
        match compute(&cfg) {
            Err(e @ CliError::Engine { source: Error::TruncationTooSmall { .. }, .. }) => {
                assert!(e.to_string().contains("mu_c=5"));
                assert_eq!(e.exit_code(), 3);
            }
            other => panic!("{other:?}"),
        }
    }
}
