//! Command-line front end. Exit status: 0 success, 2 invalid input,
//! 3 numerical or I/O failure, 4 a comparison exceeded its tolerance.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use commands::{cmd_compare, cmd_convergence, cmd_solve, cmd_tables, cmd_wavefunction, tolerance, CaseSet, Report};
pub use config::{build_potential, parse_levels, ConfigArgs, PotentialForm, RunConfig, DEFAULT_LEVEL};

use crate::cache::store;
use crate::error::Error;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_TOLERANCE: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "ipsf",
    version,
    about = "Interpolating-scaling-function eigensolver for polynomial potentials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenvalues of one potential
    Solve {
        #[command(flatten)]
        config: ConfigArgs,
        /// Print the structured summary instead of the table
        #[arg(long)]
        machine: bool,
        /// Also write psi_<n>.csv for every state (needs --output)
        #[arg(long)]
        wavefunctions: bool,
    },
    /// Ground-state energy across a range of levels and successive differences
    Convergence {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Print the mask, connection and moment tables and cache them
    Tables {
        #[command(flatten)]
        config: ConfigArgs,
        /// Also write the table bundle to this file
        #[arg(long, value_name = "FILE")]
        write: Option<PathBuf>,
    },
    /// Run the reference cases and check them against their tolerances
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum, default_value = "all")]
        set: CaseSet,
    },
    /// Write sampled eigenfunctions, optionally with oracle deviations
    Wavefunction {
        #[command(flatten)]
        config: ConfigArgs,
    },
}

pub fn execute(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Solve {
            config,
            machine,
            wavefunctions,
        } => cmd_solve(&RunConfig::resolve(config)?, *machine, *wavefunctions),
        Command::Convergence { config } => cmd_convergence(&RunConfig::resolve(config)?),
        Command::Tables { config, write } => {
            let cfg = RunConfig::resolve(config)?;
            let report = cmd_tables(&cfg)?;
            if let Some(path) = write {
                let bundle = commands::tables_for(&cfg, cfg.order, cfg.m_max)?;
                store(&bundle, path)?;
            }
            Ok(report)
        }
        Command::Compare { config, set } => cmd_compare(&RunConfig::resolve(config)?, *set),
        Command::Wavefunction { config } => cmd_wavefunction(&RunConfig::resolve(config)?),
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            print!("{}", report.text);
            if report.breach {
                eprintln!("error: one or more cases exceeded their tolerance");
                ExitCode::from(EXIT_TOLERANCE)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_NUMERICAL
            })
        }
    }
}
