//! `relbo`: oracle verification, landscape sweeps and regularizer reports.
//!
//! Exit codes: 0 when every contract holds, 1 when a numerical contract
//! fails, 2 on bad input or configuration. Thread count follows
//! `RAYON_NUM_THREADS`; outputs do not depend on it.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "relbo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON document with grid, model and tolerance overrides.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Comma-separated Rényi orders replacing the command's default list.
    #[arg(long, global = true, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,

    /// Tolerance applied to every contract check of the command.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cross-check every closed form against its oracle.
    Verify,
    /// Sweep the Gaussian-model landscape over (α, ρ², variance ratio, mean gap).
    SweepGm,
    /// The dichotomic counterexample: F_α along s(0) and the prior search.
    Dichotomic {
        /// Also write `dichotomic.csv`.
        #[arg(long)]
        csv: bool,
    },
    /// Fit or load a P-PCA model and tabulate the regularizer against the dense oracle.
    Ppca,
    /// Bound terms across orders, β and encoder perturbations.
    Relbo,
    /// Printed log-det closed form against the corrected form and the dense oracle.
    Discrepancy,
}

/// Whether the command's numerical contracts held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::load(
        cli.config.as_deref(),
        cli.seed,
        cli.out,
        cli.alpha,
        cli.tolerance,
    )
    .and_then(|cfg| {
        cfg.check_tolerance_keys(&commands::known_checks())?;
        match cli.command {
            Command::Verify => commands::verify::run(&cfg),
            Command::SweepGm => commands::sweep_gm::run(&cfg),
            Command::Dichotomic { csv } => commands::dichotomic::run(&cfg, csv),
            Command::Ppca => commands::ppca::run(&cfg),
            Command::Relbo => commands::relbo::run(&cfg),
            Command::Discrepancy => commands::discrepancy::run(&cfg),
        }
    });
    match result {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
