//! End-to-end commands over a [`RunConfig`], each writing its artifacts to
//! the configured output directory.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::diagnostics::{run_self_checks, CheckOutcome};
use crate::error::{PinnError, Result};
use crate::eval::{absolute_error_grid, comparison_table, timing_benchmark, ComparisonTable, MetricsReport, TimingRecord};
use crate::nn::{load_checkpoint, save_checkpoint, Network};
use crate::sampling::{make_grid, sample_uniform};
use crate::training::{train, write_history_csv, TrainOutcome};

/// Output file names inside the run directory.
pub struct Artifacts {
    pub dir: PathBuf,
}

impl Artifacts {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Artifacts { dir: dir.into() }
    }

    pub fn manifest(&self) -> PathBuf {
        self.dir.join("manifest.json")
    }
    pub fn checkpoint(&self) -> PathBuf {
        self.dir.join("model.ckpt")
    }
    pub fn history(&self) -> PathBuf {
        self.dir.join("history.csv")
    }
    pub fn errors(&self) -> PathBuf {
        self.dir.join("errors.csv")
    }
    pub fn norms(&self) -> PathBuf {
        self.dir.join("norms.csv")
    }
    pub fn timing(&self) -> PathBuf {
        self.dir.join("timing.csv")
    }
    pub fn tables(&self) -> PathBuf {
        self.dir.join("tables.txt")
    }

    fn create(&self) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| PinnError::io(&self.dir, e))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: &'static str,
    pub problem: String,
    pub seed: u64,
    pub param_count: usize,
    pub iterations: u64,
    pub initial_loss: f64,
    pub final_loss: f64,
    /// Iteration whose parameters were saved, and its loss.
    pub saved_iteration: u64,
    pub saved_loss: f64,
    pub wall_seconds: f64,
    /// Effective configuration in the config file format.
    pub config: String,
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub network: Network,
    pub outcome: TrainOutcome,
    pub manifest: Manifest,
}

/// Samples, initializes and trains per `cfg` without touching the filesystem.
pub fn train_from_config(cfg: &RunConfig) -> Result<(Network, TrainOutcome)> {
    cfg.validate()?;
    let pde = cfg.pde()?;
    let s = &cfg.sampling;
    let samples = sample_uniform(&pde, s.n0, s.nb, s.nc, s.seed)?;
    let mut net = Network::init_glorot(&cfg.network.sizes(), cfg.network.activation, s.seed)?;
    let outcome = train(&mut net, &pde, &samples, &cfg.train_config())?;
    Ok((net, outcome))
}

/// Trains and writes the checkpoint, loss history and manifest.
pub fn cmd_train(cfg: &RunConfig) -> Result<TrainResult> {
    let art = Artifacts::new(&cfg.output.dir);
    art.create()?;
    let (network, outcome) = train_from_config(cfg)?;
    save_checkpoint(&network, art.checkpoint())?;
    write_history_csv(&outcome.history, art.history())?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        problem: cfg.problem.name.to_string(),
        seed: cfg.sampling.seed,
        param_count: network.param_count(),
        iterations: cfg.training.iterations,
        initial_loss: outcome.initial().total,
        final_loss: outcome.last().total,
        saved_iteration: outcome.best_iteration,
        saved_loss: outcome.returned().total,
        wall_seconds: outcome.wall_seconds,
        config: cfg.to_toml_string()?,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| PinnError::Format {
        path: art.manifest(),
        message: e.to_string(),
    })?;
    std::fs::write(art.manifest(), json).map_err(|e| PinnError::io(art.manifest(), e))?;
    Ok(TrainResult {
        network,
        outcome,
        manifest,
    })
}

/// Loads a checkpoint and checks it against the configured architecture.
pub fn load_network(cfg: &RunConfig, path: impl AsRef<Path>) -> Result<Network> {
    let net = load_checkpoint(path.as_ref())?;
    let expected = cfg.network.sizes();
    if net.sizes() != expected.as_slice() || net.activation() != cfg.network.activation {
        return Err(PinnError::Usage(format!(
            "checkpoint {} does not match the `{}` configuration: expected layer sizes {:?} with {}, found {:?} with {}",
            path.as_ref().display(),
            cfg.problem.name,
            expected,
            cfg.network.activation,
            net.sizes(),
            net.activation()
        )));
    }
    Ok(net)
}

fn checkpoint_path(cfg: &RunConfig, checkpoint: Option<&Path>) -> PathBuf {
    checkpoint
        .map(Path::to_path_buf)
        .unwrap_or_else(|| Artifacts::new(&cfg.output.dir).checkpoint())
}

/// Error grid and per-time norms; writes `errors.csv` and `norms.csv`.
pub fn cmd_evaluate(cfg: &RunConfig, checkpoint: Option<&Path>) -> Result<MetricsReport> {
    let net = load_network(cfg, checkpoint_path(cfg, checkpoint))?;
    let pde = cfg.pde()?;
    let grid = make_grid(cfg.evaluation.h, cfg.evaluation.dt, &pde)?;
    let report = absolute_error_grid(&net, &pde, &grid)?;
    let art = Artifacts::new(&cfg.output.dir);
    art.create()?;
    report.write_csv(art.errors())?;
    report.write_norms_csv(art.norms())?;
    Ok(report)
}

/// Published comparison table; writes `tables.txt`.
pub fn cmd_tables(cfg: &RunConfig, checkpoint: Option<&Path>) -> Result<ComparisonTable> {
    let net = load_network(cfg, checkpoint_path(cfg, checkpoint))?;
    let table = comparison_table(&net, &cfg.pde()?)?;
    let art = Artifacts::new(&cfg.output.dir);
    art.create()?;
    std::fs::write(art.tables(), table.render()).map_err(|e| PinnError::io(art.tables(), e))?;
    Ok(table)
}

/// Inference timing; writes `timing.csv`.
pub fn cmd_benchmark(cfg: &RunConfig, checkpoint: Option<&Path>) -> Result<TimingRecord> {
    let net = load_network(cfg, checkpoint_path(cfg, checkpoint))?;
    let e = &cfg.evaluation;
    let record = timing_benchmark(&net, &cfg.pde()?, &e.timing_counts, cfg.sampling.seed, e.timing_repeats)?;
    let art = Artifacts::new(&cfg.output.dir);
    art.create()?;
    record.write_csv(art.timing())?;
    Ok(record)
}

pub fn cmd_check(seed: u64) -> Result<Vec<CheckOutcome>> {
    run_self_checks(seed)
}
