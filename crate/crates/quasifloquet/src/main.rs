use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use quasifloquet::runner::{self, ExperimentConfig, MethodChoice};
use quasifloquet::Error;

/// Experiment runner for almost-periodically driven quantum systems.
///
/// Reads a TOML experiment description (built-in default: the kicked
/// two-level spin on the K = 2 standard map) and writes CSV artifacts.
#[derive(Parser)]
#[command(name = "quasifloquet", version)]
struct Cli {
    /// Experiment configuration file; omit for the built-in default.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides the configured one.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Almost-period, mean diameter and Lyapunov exponent per seed.
    OrbitReport,
    /// Flow iterates of every seed (phase-portrait data).
    PhasePortrait,
    /// Quasienergies and states of one effective Hamiltonian.
    Effham {
        #[arg(long, value_name = "NAME")]
        seed: Option<String>,
        #[arg(long, value_name = "R")]
        ratio: Option<f64>,
        #[arg(long, value_name = "E")]
        epsilon: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<MethodChoice>,
    },
    /// Average stroboscopic fidelity grid (seeds × ratios × horizons).
    FidelityTable {
        #[arg(long, value_enum)]
        method: Option<MethodChoice>,
    },
    /// Average survival probability grid for quasienergy states.
    SurvivalTable {
        #[arg(long, value_enum)]
        method: Option<MethodChoice>,
    },
    /// Exact-vs-effective survival overlay for one seed.
    Overlay {
        #[arg(long, value_name = "NAME")]
        seed: Option<String>,
        #[arg(long, value_name = "R")]
        ratio: Option<f64>,
        /// Length of the series in almost-periods.
        #[arg(long, value_name = "N", default_value_t = 12)]
        periods: usize,
        #[arg(long, value_enum)]
        method: Option<MethodChoice>,
    },
    /// Steady-vs-oscillating ensemble evolution.
    Ensemble {
        #[arg(long, value_name = "R")]
        ratio: Option<f64>,
        /// Length of the evolution in almost-periods.
        #[arg(long, value_name = "N")]
        periods: Option<usize>,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("{failures} cell(s) failed; diagnostics are in the CSV note column");
            ExitCode::from(3)
        }
        Err(Error::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(Error::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<usize, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::paper_default(),
    };
    if let Some(dir) = cli.out {
        cfg.output.directory = dir;
    }
    let out = cfg.output.directory.clone();

    let mut failures = 0usize;
    match cli.command {
        Command::OrbitReport => {
            let report = runner::orbit_report(&cfg, true);
            failures = report.failures;
            announce(runner::write_csv(&out, "orbit_report.csv", &report.csv)?);
        }
        Command::PhasePortrait => {
            let csv = runner::phase_portrait(&cfg)?;
            announce(runner::write_csv(&out, "phase_portrait.csv", &csv)?);
        }
        Command::Effham {
            seed,
            ratio,
            epsilon,
            method,
        } => {
            let seed = seed.unwrap_or_else(|| cfg.seeds[0].name.clone());
            let ratio = ratio.unwrap_or(cfg.run.ratios[0]);
            let method = method.unwrap_or(cfg.run.method);
            let csv = runner::effham_export(&cfg, &seed, ratio, epsilon, method)?;
            announce(runner::write_csv(&out, "effham.csv", &csv)?);
        }
        Command::FidelityTable { method } => {
            let report = runner::fidelity_table(&cfg, method.unwrap_or(cfg.run.method), true);
            failures = report.failures;
            announce(runner::write_csv(&out, "fidelity_table.csv", &report.csv)?);
        }
        Command::SurvivalTable { method } => {
            let report = runner::survival_table(&cfg, method.unwrap_or(cfg.run.method), true);
            failures = report.failures;
            announce(runner::write_csv(&out, "survival_table.csv", &report.csv)?);
        }
        Command::Overlay {
            seed,
            ratio,
            periods,
            method,
        } => {
            let seed = seed.unwrap_or_else(|| cfg.seeds[0].name.clone());
            let ratio = ratio.unwrap_or(cfg.run.ratios[0]);
            let method = method.unwrap_or(cfg.run.method);
            let csv = runner::overlay_run(&cfg, &seed, ratio, periods, method)?;
            announce(runner::write_csv(&out, "overlay.csv", &csv)?);
        }
        Command::Ensemble { ratio, periods } => {
            if let Some(n) = periods {
                cfg.ensemble.periods = n;
            }
            let (quasi, zero) = runner::ensemble_run(&cfg, ratio)?;
            announce(runner::write_csv(&out, "ensemble_quasienergy.csv", &quasi)?);
            announce(runner::write_csv(&out, "ensemble_zero.csv", &zero)?);
        }
    }
    Ok(failures)
}

fn announce(path: PathBuf) {
    println!("wrote {}", path.display());
}
