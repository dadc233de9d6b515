//! Experiment runner: configuration, seeded parallel replicas, reports and
//! file output.

pub mod config;
pub mod emit;
pub mod experiments;
pub mod replicate;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use thiserror::Error;

pub use config::{ExperimentConfig, Format, ParamValue, Threads};
pub use emit::{emit, read_csv, to_csv, to_svg};
pub use experiments::{find, registry, Experiment, Params};
pub use replicate::{replicate, ReplicaOutcome};
pub use report::{aggregate_records, Aggregate, Report, SCHEMA_VERSION};

use experiments::FinishCtx;
use report::{Accounting, ConfigEcho, ReplicaRecord, Timing};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("unknown experiment '{name}'; registered: {known}")]
    UnknownExperiment { name: String, known: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("run failed: {0}")]
    Runtime(#[from] crate::Error),
    #[error("cannot write {}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

impl HarnessError {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            HarnessError::UnknownExperiment { .. } => "unknown-experiment",
            HarnessError::InvalidParameter(_) => "invalid-parameter",
            HarnessError::Config(_) => "config",
            HarnessError::Runtime(_) => "runtime",
            HarnessError::Io { .. } => "io",
        }
    }

    /// Process exit status: 2 for configuration problems, 3 for failed
    /// runs, 4 for output errors.
    pub fn exit_status(&self) -> i32 {
        match self {
            HarnessError::UnknownExperiment { .. } | HarnessError::InvalidParameter(_) | HarnessError::Config(_) => 2,
            HarnessError::Runtime(_) => 3,
            HarnessError::Io { .. } => 4,
        }
    }
}

fn lookup(name: &str) -> Result<&'static Experiment, HarnessError> {
    find(name).ok_or_else(|| HarnessError::UnknownExperiment {
        name: name.to_string(),
        known: registry().iter().map(|e| e.name).collect::<Vec<_>>().join(", "),
    })
}

/// Runs the configured experiment and returns its report. Nothing is
/// written to disk.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let exp = lookup(&cfg.experiment)?;
    let params = Params::resolve(exp, &cfg.params).map_err(HarnessError::InvalidParameter)?;
    let job = exp.build(&params).map_err(HarnessError::InvalidParameter)?;
    if cfg.replicas == 0 {
        return Err(HarnessError::Config("replicas must be at least 1".into()));
    }
    let threads = cfg.threads.resolve();
    let start = Instant::now();
    let outcomes = replicate(|i, s| job.replica(i, s), cfg.replicas, cfg.master_seed, threads)?;
    let records: Vec<ReplicaRecord> = outcomes
        .into_iter()
        .map(|o| match o.result {
            Ok(d) => ReplicaRecord { index: o.index, seed: o.seed, error: None, steps: d.steps, metrics: d.metrics },
            Err(e) => ReplicaRecord { index: o.index, seed: o.seed, error: Some(e.to_string()), steps: 0, metrics: vec![] },
        })
        .collect();
    let accounting = Accounting {
        total_steps: records.iter().map(|r| r.steps).sum(),
        failed_replicas: records.iter().filter(|r| r.error.is_some()).count() as u64,
    };
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        config: ConfigEcho {
            experiment: exp.name.to_string(),
            master_seed: cfg.master_seed,
            replicas: cfg.replicas,
            params: params.values().clone(),
            formats: cfg.formats.clone(),
        },
        sweep: job.sweep(),
        aggregates: aggregate_records(&records),
        records,
        theory: Vec::new(),
        curves: Vec::new(),
        notes: Vec::new(),
        accounting,
        timing: Timing { wall_seconds: 0.0, threads },
    };
    job.finish(&FinishCtx { master_seed: cfg.master_seed, replicas: cfg.replicas }, &mut report)?;
    report.timing.wall_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Validates, runs, and writes every requested format to the output
/// directory (default `.`). The directory is created before the run so an
/// unwritable location fails fast.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<(Report, Vec<PathBuf>), HarnessError> {
    let exp = lookup(&cfg.experiment)?;
    let params = Params::resolve(exp, &cfg.params).map_err(HarnessError::InvalidParameter)?;
    exp.build(&params).map_err(HarnessError::InvalidParameter)?;
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| HarnessError::Io { path: dir.clone(), message: e.to_string() })?;
    let report = run_experiment(cfg)?;
    let mut written = Vec::new();
    for &f in &cfg.formats {
        written.push(emit(&report, f, &dir)?);
    }
    Ok((report, written))
}
