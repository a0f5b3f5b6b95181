//! Experiment orchestration behind the `chaoslab` binary.
//!
//! A run reads an [`ExperimentConfig`], computes replicas in batches on a
//! worker pool and writes to the output directory:
//!
//! * `samples_*.csv`: raw per-replica values, flushed per batch;
//! * `report.json`: checks with targets, tolerances and pass flags;
//! * `manifest.json`: config hash, version, wall time and file list.
//!
//! Rerunning with the same config in the same directory resumes from the
//! last complete replica.

mod config;
mod output;
mod runners;

pub use config::{ExperimentConfig, Kind};
pub use output::{fmt_f64, read_manifest, run_table, write_table, Basis, Check, Comparison, Manifest, Report, TableSpec};

use crate::{Error, Result};
use clap::Parser;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Exit status when every check passed.
pub const EXIT_PASSED: i32 = 0;
/// Exit status for configuration or numerical errors.
pub const EXIT_ERROR: i32 = 1;
/// Exit status when the run completed but a check failed.
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "chaoslab", version, about = "Gaussian multiplicative chaos experiments")]
pub struct Args {
    /// Experiment kind (sample, moments, tail, gumbel, sh-ratio, factor2,
    /// extremes, brw, spine, kahane, star-eq).
    pub kind: String,
    /// Config file, `key = value` lines or JSON.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    pub manifest: Manifest,
}

fn version() -> String {
    option_env!("CHAOSLAB_DESCRIBE").map_or_else(|| format!("v{}", env!("CARGO_PKG_VERSION")), str::to_string)
}

/// Runs one validated experiment, writing all outputs under `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    if let Err(errs) = cfg.validate() {
        return Err(errs.into_iter().next().expect("at least one error"));
    }
    let kind = cfg.kind()?;
    let dir = Path::new(&cfg.out);
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let hash = cfg.hash();
    let resume = read_manifest(dir).is_some_and(|m| m.config_hash == hash);
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let mut manifest = Manifest {
        tool: "chaoslab".into(),
        version: version(),
        kind: kind.to_string(),
        config_hash: hash.clone(),
        config: cfg.to_text(),
        status: "running".into(),
        started_unix: started,
        wall_time_seconds: 0.0,
        outputs: Vec::new(),
    };
    output::write_json(&dir.join("manifest.json"), &manifest)?;
    let clock = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().map_err(|e| Error::param("workers", e.to_string()))?;
    let outcome = pool.install(|| runners::run_kind(cfg, dir, resume))?;
    let report = Report::new(kind.as_str(), &hash, outcome.checks, outcome.warnings, outcome.summary);
    output::write_json(&dir.join("report.json"), &report)?;
    manifest.status = if report.passed { "passed" } else { "failed" }.into();
    manifest.wall_time_seconds = clock.elapsed().as_secs_f64();
    manifest.outputs = outcome.outputs;
    manifest.outputs.extend(["report.json".to_string(), "manifest.json".to_string()]);
    output::write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(RunOutcome { report, manifest })
}

/// Loads the config named by `args` and applies the command-line overrides.
pub fn load_config(args: &Args) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| Error::io(format!("reading {}", args.config.display()), e))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    let kind: Kind = args.kind.parse()?;
    match cfg.kind {
        Some(k) if k != kind => {
            return Err(Error::Config { field: "kind".into(), reason: format!("config says `{k}` but the command line says `{kind}`") });
        }
        _ => cfg.kind = Some(kind),
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(o) = &args.out {
        cfg.out = o.to_string_lossy().into_owned();
    }
    Ok(cfg)
}

/// Full command-line entry: returns the process exit status.
pub fn main_with(args: Args) -> i32 {
    let cfg = match load_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    if let Err(errs) = cfg.validate() {
        for e in errs {
            eprintln!("error: {e}");
        }
        return EXIT_ERROR;
    }
    match run_experiment(&cfg) {
        Ok(out) => {
            for c in &out.report.checks {
                println!("{} {} observed={} target={}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.observed, c.target);
            }
            for w in &out.report.warnings {
                eprintln!("warning: {w}");
            }
            if out.report.passed {
                EXIT_PASSED
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
