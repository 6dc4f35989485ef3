//! Figure presets.
//!
//! Curve sets not fixed by the figure descriptions are representative
//! defaults: `mu_c` in {1, 2, 5, 10}, damping rates in {0, 0.1, 0.2, 0.3}, and
//! coupling or amplitude ladders chosen to span the plotted regimes. Each
//! preset is one panel and writes one file.

use std::f64::consts::PI;
use std::path::Path;

use super::config::{Axis, Engine, ProfileKind, RunConfig};
use super::sweep::{run_sweep, SweepOutput};
use super::CliError;

pub const PRESET_IDS: [&str; 16] = [
    "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b", "fig6c", "fig7a",
    "fig7b", "fig8a", "fig8b",
];

const MU_SET: [f64; 4] = [1.0, 2.0, 5.0, 10.0];

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub id: &'static str,
    pub description: &'static str,
    pub config: RunConfig,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
}

fn analytic(tau_max: f64, tau_steps: usize) -> RunConfig {
    RunConfig::new(Engine::Analytic, tau_max, tau_steps)
}

fn modulated(g0: impl Into<Axis>, epsilon: impl Into<Axis>, omega0: impl Into<Axis>, tau_max: f64) -> RunConfig {
    let mut c = analytic(tau_max, 601);
    c.profile = ProfileKind::Modulated;
    c.g0 = g0.into();
    c.epsilon = epsilon.into();
    c.omega0 = omega0.into();
    c
}

/// Damped runs at `mu_c = 0.1`, with an explicit truncation sized for the
/// largest displacement reached on the grid.
fn open(profile: ProfileKind, n_photon: usize, n_phonon: usize) -> RunConfig {
    let mut c = RunConfig::new(Engine::Fock, 6.0 * PI, 121);
    c.profile = profile;
    c.mu_c = 0.1.into();
    c.n_photon = Some(n_photon);
    c.n_phonon = Some(n_phonon);
    c.workers = 4;
    if profile == ProfileKind::Modulated {
        c.epsilon = 0.5.into();
        c.omega0 = 1.0.into();
    }
    c
}

/// Expands a preset id into its run description.
pub fn figure_preset(id: &str) -> Result<FigurePreset, CliError> {
    let mus = || Axis::Many(MU_SET.to_vec());
    let (id, description, config) = match id {
        "fig2a" => {
            let mut c = analytic(2.0 * PI, 401);
            c.mu_c = mus();
            ("fig2a", "delta over one period, constant coupling g0 = 1", c)
        }
        "fig2b" => {
            let mut c = analytic(2.0 * PI, 4001);
            c.mu_c = mus();
            ("fig2b", "dense grid over one period to resolve the dip at tau = pi", c)
        }
        "fig2c" => {
            let mut c = analytic(0.1, 201);
            c.mu_c = mus();
            ("fig2c", "early-time growth of delta", c)
        }
        "fig3a" => {
            let mut c = analytic(PI, 2);
            c.g0 = Axis::Many(log_grid(1e-2, 1e2, 41));
            c.mu_c = mus();
            ("fig3a", "delta at tau = pi against g0 (rows at tau = pi)", c)
        }
        "fig3b" => {
            let mut c = analytic(PI, 2);
            c.g0 = Axis::Many(vec![0.1, 0.5, 1.0, 2.0]);
            c.mu_c = Axis::Many(log_grid(1e-2, 1e2, 41));
            ("fig3b", "delta at tau = pi against mu_c (rows at tau = pi)", c)
        }
        "fig4a" => {
            let mut c = analytic(2.0 * PI, 401);
            c.mu_c = mus();
            c.large_mu = true;
            c.leading_log = true;
            ("fig4a", "exact delta beside the large-amplitude form, several mu_c", c)
        }
        "fig4b" => {
            let mut c = analytic(2.0 * PI, 2001);
            c.mu_c = 10.0.into();
            c.g0 = Axis::Many(vec![1.0, 10.0, 100.0]);
            c.large_mu = true;
            c.leading_log = true;
            ("fig4b", "exact delta beside the large-amplitude form, several g0 at mu_c = 10", c)
        }
        "fig5a" => {
            let mut c = open(ProfileKind::Constant, 8, 40);
            c.kappa_c = Axis::Many(vec![0.0, 0.1, 0.2, 0.3]);
            ("fig5a", "photon loss, constant coupling", c)
        }
        "fig5b" => {
            let mut c = open(ProfileKind::Constant, 8, 40);
            c.kappa_m = Axis::Many(vec![0.0, 0.1, 0.2, 0.3]);
            ("fig5b", "phonon loss, constant coupling", c)
        }
        "fig6a" => (
            "fig6a",
            "modulated coupling for several modulation frequencies",
            modulated(1.0, 1.0, vec![0.0, 0.5, 1.0, 2.0], 6.0 * PI),
        ),
        "fig6b" => {
            let mut c = modulated(1.0, 1.0, 1.0, 6.0 * PI);
            c.mu_c = mus();
            ("fig6b", "resonant modulation, several mu_c", c)
        }
        "fig6c" => (
            "fig6c",
            "resonant modulation, several amplitudes epsilon",
            modulated(1.0, vec![0.1, 0.5, 1.0, 2.0], 1.0, 6.0 * PI),
        ),
        "fig7a" => {
            let mut c = modulated(1.0, 1.0, 0.5, 6.0 * PI);
            c.mu_c = mus();
            c.large_mu = true;
            c.leading_log = true;
            ("fig7a", "large-amplitude form under modulation at omega0 = 0.5, several mu_c", c)
        }
        "fig7b" => {
            let mut c = modulated(1.0, vec![0.25, 0.5, 1.0, 2.0], 0.5, 6.0 * PI);
            c.mu_c = 10.0.into();
            c.large_mu = true;
            c.leading_log = true;
            ("fig7b", "large-amplitude form under modulation at mu_c = 10, several epsilon", c)
        }
        "fig8a" => {
            let mut c = open(ProfileKind::Modulated, 5, 140);
            c.kappa_c = Axis::Many(vec![0.0, 0.1, 0.3]);
            ("fig8a", "photon loss at mechanical resonance", c)
        }
        "fig8b" => {
            let mut c = open(ProfileKind::Modulated, 5, 140);
            c.kappa_m = Axis::Many(vec![0.0, 0.1, 0.3]);
            ("fig8b", "phonon loss at mechanical resonance", c)
        }
        other => return Err(CliError::UnknownPreset(other.to_string())),
    };
    config.validate()?;
    Ok(FigurePreset { id, description, config })
}

/// Runs a preset and writes `<out_dir>/<id>.csv` with its sidecar.
pub fn reproduce_figure(id: &str, out_dir: &Path) -> Result<SweepOutput, CliError> {
    let preset = figure_preset(id)?;
    run_sweep(&preset.config, &out_dir.join(format!("{}.csv", preset.id)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::sweep::compute;

    #[test]
    fn every_preset_expands_and_validates() {
        for id in PRESET_IDS {
            let a = figure_preset(id).unwrap();
            assert_eq!(a, figure_preset(id).unwrap());
            assert_eq!(a.id, id);
        }
        assert!(matches!(figure_preset("fig9"), Err(CliError::UnknownPreset(_))));
    }

    #[test]
    fn fig2a_curves_recur() {
        let p = figure_preset("fig2a").unwrap();
        let rows = compute(&p.config).unwrap().rows;
        for curve in rows.chunks(p.config.tau_steps) {
            assert!(curve[0].delta <= 1e-9 && curve.last().unwrap().delta <= 1e-9);
        }
    }

    #[test]
    fn fig6b_envelope_grows() {
        let mut p = figure_preset("fig6b").unwrap().config;
        p.tau_steps = 7;
        for curve in compute(&p).unwrap().rows.chunks(7) {
            assert!(curve[6].delta > curve[2].delta, "{} vs {}", curve[6].delta, curve[2].delta);
        }
    }

    #[test]
    fn fig4a_asymptote_tracks_exact_at_large_amplitude() {
        let p = figure_preset("fig4a").unwrap().config;
        let rows = compute(&p).unwrap().rows;
        let curve = &rows[3 * p.tau_steps..];
        assert_eq!(curve[0].params.mu_c, 10.0);
        let mut worst: f64 = 0.0;
        for r in curve.iter().filter(|r| r.tau > 1.0 && r.tau < 2.0 * PI - 1.0) {
            worst = worst.max((r.delta_large_mu.unwrap() - r.delta).abs() / r.delta);
        }
        assert!(worst < 0.05, "{worst}");
    }
}
