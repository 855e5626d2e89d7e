//! `expburgers`: simulations, exact coefficients and extrapolation from the
//! command line.

mod commands;
mod config;
mod error;
mod input;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{DecayOptions, Figure};
use crate::config::{ConfigError, RunConfig};
use crate::error::CliError;
use crate::output::Outputs;

#[derive(Parser)]
#[command(name = "expburgers", version, about = "Burgers equation under exponential dissipation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory receiving the data files.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,
    /// Working precision of the exact engine, overriding the config.
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the spectral solver and write the spectrum at t_end.
    Simulate { config: Option<PathBuf> },
    /// Exact half-space coefficients v_hat(k, t_end).
    Exact { config: Option<PathBuf> },
    /// Apply a transform stack to a spectrum written by `simulate` or `exact`.
    Extrapolate {
        input: PathBuf,
        #[arg(long, default_value = "Log,D,D,I,D")]
        stack: String,
        /// First wavenumber used.
        #[arg(long)]
        k_min: Option<i64>,
        /// Entries beyond this wavenumber are treated as noise.
        #[arg(long)]
        k_max: Option<i64>,
    },
    /// Dominant-balance prediction of the decay exponent on k = 2^n.
    Predict {
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        n_max: u32,
        /// F(1).
        #[arg(long, default_value_t = 0.0)]
        f1: f64,
    },
    /// Naive discrepancy and decay-bound check of a solver spectrum.
    Discrepancy {
        config: Option<PathBuf>,
        /// Use an existing `simulate` spectrum instead of running the solver.
        #[arg(long)]
        spectrum: Option<PathBuf>,
        #[arg(long, default_value_t = 0.70)]
        decay_c: f64,
        #[arg(long, default_value_t = 10)]
        decay_k_min: i64,
    },
    /// Rerun one of the published experiments and compare with its headline number.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
        /// Last wavenumber treated as noise-free; defaults to the detected onset.
        #[arg(long)]
        report_k_max: Option<i64>,
    },
}

fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
    Ok(match path {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    })
}

fn check_bits(bits: Option<u32>) -> Result<Option<u32>, CliError> {
    match bits {
        Some(b) if !(16..=1 << 20).contains(&b) => {
            Err(ConfigError::key("precision-bits", format!("must be 16..=1048576, got {b}")).into())
        }
        _ => Ok(bits),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let out = Outputs::new(&cli.output_dir, cli.force);
    let bits = check_bits(cli.precision_bits)?;
    match cli.command {
        Command::Simulate { config } => commands::simulate(&load(config.as_deref())?, &out),
        Command::Exact { config } => commands::exact(&load(config.as_deref())?, bits, &out),
        Command::Extrapolate {
            input,
            stack,
            k_min,
            k_max,
        } => {
            let stack = commands::parse_stack(&stack)?;
            commands::extrapolate(&input, &stack, bits, k_min, k_max, &out)
        }
        Command::Predict { config, n_max, f1 } => {
            commands::predict(&load(config.as_deref())?, n_max, f1, &out)
        }
        Command::Discrepancy {
            config,
            spectrum,
            decay_c,
            decay_k_min,
        } => commands::discrepancy(
            &load(config.as_deref())?,
            spectrum.as_deref(),
            DecayOptions {
                c: decay_c,
                k_min: decay_k_min,
            },
            &out,
        ),
        Command::Reproduce {
            figure,
            report_k_max,
        } => commands::reproduce(figure, bits, report_k_max, &out),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
