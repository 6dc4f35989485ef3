use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nongauss::cli::{compare_engines, figure_preset, reproduce_figure, run_sweep, CliError, RunConfig, PRESET_IDS};
use nongauss::lie_coefficients::{coeffs_for, CouplingProfile};

#[derive(Parser)]
#[command(name = "nongauss", version, about = "Non-Gaussianity of nonlinear optomechanical dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the parameter sweep described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Data file; overrides `output` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a figure preset into a directory.
    Figure {
        /// Preset id, or `list` to print the available ids.
        id: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compare the closed-form and Fock engines over a config's sweep.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Report file; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print evolution coefficients as JSON.
    Coeffs {
        #[arg(long, value_enum, default_value = "constant")]
        profile: ProfileArg,
        #[arg(long, default_value_t = 1.0)]
        g0: f64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        omega0: f64,
        /// One or more times, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        tau: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Constant,
    Modulated,
}

#[derive(Serialize)]
struct CoeffRow {
    tau: f64,
    f_na2: f64,
    f_b_plus: f64,
    f_b_minus: f64,
    theta_a: f64,
    f_re: f64,
    f_im: f64,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep { config, out } => {
            let cfg = RunConfig::from_file(&config)?;
            let path = out
                .or_else(|| cfg.output.clone())
                .ok_or_else(|| CliError::Config("no output path: set `output` or pass --out".into()))?;
            let done = run_sweep(&cfg, &path)?;
            eprintln!("wrote {} rows to {}", done.rows, done.data.display());
            if let Some(d) = done.max_discrepancy {
                eprintln!("max |delta_analytic - delta_fock| = {d:e}");
            }
        }
        Command::Figure { id, out } => {
            if id == "list" {
                for id in PRESET_IDS {
                    println!("{id}\t{}", figure_preset(id)?.description);
                }
                return Ok(());
            }
            let done = reproduce_figure(&id, &out)?;
            eprintln!("wrote {} rows to {}", done.rows, done.data.display());
        }
        Command::Compare { config, out } => {
            let cfg = RunConfig::from_file(&config)?;
            let report = compare_engines(&cfg)?;
            match out {
                Some(path) => report.write(&path)?,
                None => println!("{}", to_json(&report)?),
            }
            eprintln!("max {:e}, mean {:e}, tolerance {:e}", report.max, report.mean, report.tolerance);
            if !report.pass {
                return Err(CliError::Mismatch { max: report.max, tol: report.tolerance });
            }
        }
        Command::Coeffs { profile, g0, epsilon, omega0, tau } => {
            let profile = match profile {
                ProfileArg::Constant => CouplingProfile::constant(g0),
                ProfileArg::Modulated => CouplingProfile::modulated(g0, epsilon, omega0),
            };
            let rows = tau
                .iter()
                .map(|&t| {
                    let c = coeffs_for(&profile, t).map_err(|e| CliError::Engine { point: format!("tau={t}"), source: e })?;
                    let f = c.f_complex();
                    Ok(CoeffRow {
                        tau: t,
                        f_na2: c.f_na2(),
                        f_b_plus: c.f_b_plus(),
                        f_b_minus: c.f_b_minus(),
                        theta_a: c.theta_a(),
                        f_re: f.re,
                        f_im: f.im,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            println!("{}", to_json(&rows)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
