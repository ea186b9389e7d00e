//! The `run` and `validate` commands.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Config, ConfigErrors, ConfigValues};
use crate::output::{write_curve, write_trials};
use crate::sweep::{evaluate_point, Mode, PointResult};

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "HETCOV_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:\n{source}")]
    Config { path: PathBuf, source: ConfigErrors },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl CliError {
    /// Process exit status: 2 for unusable input, 1 for I/O failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Csv { .. } => 1,
        }
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Parses and validates a configuration file.
pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    let wrap = |source| CliError::Config { path: path.to_path_buf(), source };
    let cfg = Config::parse(&text).map_err(wrap)?;
    cfg.validate().map_err(wrap)?;
    Ok(cfg)
}

/// Worker count from `HETCOV_WORKERS`; `None` lets rayon decide.
pub fn workers_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got '{s}'"))),
        },
    }
}

#[derive(Debug, Clone)]
pub struct RunRequest {
    pub config: PathBuf,
    pub mode: Mode,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    /// Config-level notes, e.g. defaulted biases.
    pub config_warnings: Vec<String>,
    /// `metric`, grid index and message of every flagged cell.
    pub cell_warnings: Vec<(String, usize, String)>,
    pub files: Vec<String>,
}

#[derive(Serialize)]
struct Versions {
    hetcov: &'static str,
    hetcov_cli: &'static str,
}

/// Everything needed to reproduce a run. Contains no timestamps or host
/// details so identical inputs give an identical manifest.
#[derive(Serialize)]
struct Manifest<'a> {
    versions: Versions,
    mode: Mode,
    seed: u64,
    trials: usize,
    config: &'a ConfigValues,
    params: hetcov::SystemParams,
    analytic_options: hetcov::analytic::AnalyticOptions,
    files: &'a [String],
    warnings: &'a [String],
}

/// Evaluates the sweep and writes the curve files, optional trial tables
/// and `manifest.json` into `out`.
pub fn run(req: &RunRequest) -> Result<RunSummary, CliError> {
    let cfg = load_config(&req.config)?;
    let mut values = cfg.values.clone();
    if let Some(s) = req.seed {
        values.seed = s;
    }
    if let Some(n) = req.trials {
        if n == 0 {
            return Err(CliError::Usage("--trials must be > 0".into()));
        }
        values.trials = n;
    }
    fs::create_dir_all(&req.out).map_err(io(&req.out))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(req.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", req.workers.unwrap_or(0))))?;
    let points = values.sweep.points();
    let results: Vec<PointResult> = pool.install(|| points.par_iter().map(|x| evaluate_point(&values, *x, req.mode)).collect());

    let mut summary = RunSummary { config_warnings: cfg.warnings.clone(), ..RunSummary::default() };
    for (mi, metric) in values.sweep.metrics.iter().enumerate() {
        let name = format!("{}.csv", metric.label());
        let path = req.out.join(&name);
        let rows: Vec<_> = results.iter().map(|p| &p.rows[mi]).collect();
        for (k, r) in rows.iter().enumerate() {
            for w in &r.warnings {
                summary.cell_warnings.push((metric.label().to_string(), k, w.clone()));
            }
        }
        let f = fs::File::create(&path).map_err(io(&path))?;
        write_curve(BufWriter::new(f), values.sweep.variable, req.mode, &rows).map_err(|source| CliError::Csv { path, source })?;
        summary.files.push(name);
    }
    if values.raw_trials {
        for (k, p) in results.iter().enumerate() {
            let Some(trials) = &p.trials else { continue };
            let name = format!("trials_{k:03}.csv");
            let path = req.out.join(&name);
            let f = fs::File::create(&path).map_err(io(&path))?;
            write_trials(BufWriter::new(f), trials).map_err(|source| CliError::Csv { path, source })?;
            summary.files.push(name);
        }
    }

    let manifest = Manifest {
        versions: Versions { hetcov: hetcov::VERSION, hetcov_cli: env!("CARGO_PKG_VERSION") },
        mode: req.mode,
        seed: values.seed,
        trials: values.trials,
        config: &values,
        params: values.to_params(),
        analytic_options: values.analytic_options(),
        files: &summary.files,
        warnings: &summary.config_warnings,
    };
    let path = req.out.join("manifest.json");
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    fs::write(&path, json).map_err(io(&path))?;
    Ok(summary)
}
