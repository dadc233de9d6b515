use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use thickpoints_core::harness::{
    config::parse_formats, registry, run_and_write, ExperimentConfig, HarnessError, Report, Threads,
};

/// Run a thick-point experiment and write its report.
#[derive(Debug, Parser)]
#[command(name = "thickpoints", version, about)]
struct Cli {
    /// Registered experiment name (see --list).
    #[arg(required_unless_present = "list")]
    experiment: Option<String>,

    /// Flat `key = value` config file; flags given here override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Master seed; replica i uses a seed derived from it and i.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,

    /// Independent replicas (default 1).
    #[arg(long, value_name = "N")]
    replicas: Option<u64>,

    /// Worker threads, or `auto`. Defaults to THICKPOINTS_THREADS.
    #[arg(long, value_name = "N|auto")]
    threads: Option<String>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Comma-separated subset of csv,json,svg.
    #[arg(long, value_name = "LIST")]
    format: Option<String>,

    /// Experiment parameter; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,

    /// List registered experiments and their parameters.
    #[arg(long)]
    list: bool,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = ExperimentConfig::new("");
    cfg.threads = Threads::from_env()?;
    cfg.output = Some(PathBuf::from("out"));
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read config {}: {e}", path.display())))?;
        cfg.apply_file_text(&text)?;
    }
    if let Some(name) = &cli.experiment {
        cfg.experiment = name.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(n) = cli.replicas {
        cfg.set("run.replicas", &n.to_string())?;
    }
    if let Some(t) = &cli.threads {
        cfg.threads = t.parse().map_err(HarnessError::Config)?;
    }
    if let Some(dir) = &cli.out {
        cfg.output = Some(dir.clone());
    }
    if let Some(f) = &cli.format {
        cfg.formats = parse_formats(f)?;
    }
    for kv in &cli.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("--param expects key=value, got '{kv}'")))?;
        cfg.set(&format!("param.{}", k.trim()), v)?;
    }
    Ok(cfg)
}

fn print_list() {
    for e in registry() {
        println!("{:<24} {}", e.name, e.summary);
        for p in e.params {
            println!("    {:<12} default {:<22} {}", p.name, p.default, p.help);
        }
    }
}

fn fmt_point(report: &Report, point: &[Option<f64>]) -> String {
    let parts: Vec<String> = report
        .sweep
        .iter()
        .zip(point)
        .filter_map(|(name, v)| v.map(|x| format!("{name}={x}")))
        .collect();
    parts.join(" ")
}

fn print_summary(report: &Report) {
    println!("{} (seed {}, {} replicas)", report.config.experiment, report.config.master_seed, report.config.replicas);
    for a in &report.aggregates {
        let se = a.stderr.map(|s| format!(" ± {s:.4e}")).unwrap_or_default();
        println!("  {:<16} {:<24} {:.6}{se}  (n = {})", a.metric, fmt_point(report, &a.point), a.value, a.n_replicas);
    }
    for t in &report.theory {
        println!("  theory {:<9} {:<24} {:.6}  [{}]", t.metric, fmt_point(report, &t.point), t.value, t.law);
    }
    for n in &report.notes {
        println!("  note: {n}");
    }
    if report.accounting.failed_replicas > 0 {
        println!("  {} replicas failed", report.accounting.failed_replicas);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        print_list();
        return ExitCode::SUCCESS;
    }
    let result = build_config(&cli).and_then(|cfg| run_and_write(&cfg));
    match result {
        Ok((report, files)) => {
            print_summary(&report);
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_status() as u8)
        }
    }
}
