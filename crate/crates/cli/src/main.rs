use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hetcov_cli::run::{load_config, run, workers_from_env, CliError, RunRequest};
use hetcov_cli::sweep::Mode;

/// Coverage, association and rate sweeps of Sub-6GHz/mmWave networks.
///
/// The worker-thread count is read from HETCOV_WORKERS; output does not
/// depend on it.
#[derive(Parser)]
#[command(name = "hetcov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a sweep and write one CSV per metric plus manifest.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
        /// Overrides simulation.seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides simulation.trials.
        #[arg(long)]
        trials: Option<usize>,
        /// Exit with status 3 when any cell carries a warning.
        #[arg(long)]
        strict: bool,
    },
    /// Check a configuration and print it fully resolved.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            for w in &cfg.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", cfg.values.to_text());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config, mode, out, seed, trials, strict } => {
            let req = RunRequest { config, mode, out, seed, trials, workers: workers_from_env()? };
            let s = run(&req)?;
            for w in &s.config_warnings {
                eprintln!("warning: {w}");
            }
            for (metric, k, w) in &s.cell_warnings {
                eprintln!("warning: {metric} point {k}: {w}");
            }
            eprintln!("wrote {} files to {}", s.files.len() + 1, req.out.display());
            if strict && !s.cell_warnings.is_empty() {
                eprintln!("error: {} flagged cells under --strict", s.cell_warnings.len());
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
