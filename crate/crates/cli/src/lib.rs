//! Experiment runner: reads a TOML config, sweeps the grid on a rayon pool and
//! writes one CSV plus a JSON manifest per run.
//!
//! Data files are byte-identical across reruns with the same config and seed,
//! whatever the thread count. The manifest additionally records wall time and
//! therefore differs between runs.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};

pub use config::{Experiment, ExperimentConfig};
pub use experiments::Outcome;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub data_path: PathBuf,
    pub manifest_path: PathBuf,
    pub outcome: Outcome,
    pub manifest: Value,
}

impl RunSummary {
    pub fn failures(&self) -> usize {
        self.outcome.failures()
    }
}

/// Loads `config_path`, applies overrides and runs the experiment.
pub fn run_file(experiment: Experiment, config_path: &Path, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let config = ExperimentConfig::load(config_path)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    run_config(experiment, config, base, opts)
}

/// `base` resolves relative paths inside the config (custom growth files).
pub fn run_config(
    experiment: Experiment,
    mut config: ExperimentConfig,
    base: &Path,
    opts: &RunOptions,
) -> Result<RunSummary, CliError> {
    if let Some(s) = opts.seed {
        config.seed = s;
    }
    if let Some(o) = &opts.out {
        config.output_dir = o.clone();
    }
    config.experiment = Some(experiment);
    config.validate(experiment)?;
    let setup = experiments::Setup::new(&config, base)?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = opts.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build()?;
    let threads = pool.current_num_threads();

    let start = Instant::now();
    let outcome = pool.install(|| experiments::run(experiment, &config, &setup));
    let wall = start.elapsed().as_secs_f64();

    std::fs::create_dir_all(&config.output_dir)?;
    let data_name = format!("{}.csv", experiment.name());
    let data_path = config.output_dir.join(&data_name);
    let csv = outcome.table.to_csv()?;
    output::write_atomic(&data_path, &csv)?;

    let cells: Vec<Value> = outcome
        .cells
        .iter()
        .map(|c| {
            let mut m = serde_json::Map::new();
            for (k, v) in &c.coords {
                m.insert((*k).into(), json!(output::format_float(*v)));
            }
            m.insert("status".into(), json!(if c.error.is_some() { "failed" } else { "ok" }));
            if let Some(e) = &c.error {
                m.insert("error".into(), json!(e));
            }
            Value::Object(m)
        })
        .collect();
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": experiment.name(),
        "config": serde_json::to_value(&config).expect("config serializes"),
        "config_digest": config.digest(),
        "status": if outcome.failures() == 0 { "complete" } else { "partial" },
        "files": [{
            "name": data_name,
            "sha256": output::sha256_hex(&csv),
            "bytes": csv.len(),
            "rows": outcome.table.rows.len(),
        }],
        "data": outcome.table.to_json(),
        "cells": cells,
        "threads": threads,
        "wall_time_seconds": wall,
    });
    let manifest_path = config.output_dir.join(MANIFEST_NAME);
    let mut text = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    text.push(b'\n');
    output::write_atomic(&manifest_path, &text)?;

    Ok(RunSummary { data_path, manifest_path, outcome, manifest })
}
