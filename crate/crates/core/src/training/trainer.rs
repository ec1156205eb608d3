use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::adam::{adam_step, sgd_step, AdamParams, AdamState};
use super::loss::{LossBreakdown, LossWeights, Objective};
use super::schedule::Schedule;
use crate::error::{PinnError, Result};
use crate::nn::Network;
use crate::pde::ParabolicPde;
use crate::sampling::SampleSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    #[default]
    Adam,
    Sgd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub iterations: u64,
    pub schedule: Schedule,
    pub weights: LossWeights,
    pub optimizer: Optimizer,
    pub adam: AdamParams,
    /// Print progress to stderr every this many iterations; 0 is silent.
    pub log_every: u64,
    /// Evaluate loss batches on the rayon pool.
    pub parallel: bool,
    /// Return the iterate with the lowest total loss instead of the last one.
    pub keep_best: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 20_000,
            schedule: Schedule::paper(),
            weights: LossWeights::default(),
            optimizer: Optimizer::Adam,
            adam: AdamParams::default(),
            log_every: 0,
            parallel: false,
            keep_best: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        Schedule::new(self.schedule.segments().to_vec())?;
        let hp = &self.adam;
        if !(0.0..1.0).contains(&hp.beta1) || !(0.0..1.0).contains(&hp.beta2) {
            return Err(PinnError::config("training.beta1", "Adam betas must lie in [0, 1)"));
        }
        if !(hp.epsilon > 0.0) {
            return Err(PinnError::config("training.epsilon", "must be positive"));
        }
        Ok(())
    }
}

/// One row of the loss history. `breakdown` is the loss before the update
/// made at `iteration`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub iteration: u64,
    pub lr: f64,
    pub breakdown: LossBreakdown,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// `iterations + 1` rows; the last holds the loss of the trained network.
    pub history: Vec<TrainRecord>,
    /// Row of `history` whose parameters were returned.
    pub best_iteration: u64,
    pub wall_seconds: f64,
}

impl TrainOutcome {
    pub fn initial(&self) -> &LossBreakdown {
        &self.history[0].breakdown
    }

    pub fn last(&self) -> &LossBreakdown {
        &self.history[self.history.len() - 1].breakdown
    }

    /// Loss of the returned network.
    pub fn returned(&self) -> &LossBreakdown {
        &self.history[self.best_iteration as usize].breakdown
    }

    /// Total-loss history, for reproducibility comparisons.
    pub fn totals(&self) -> Vec<f64> {
        self.history.iter().map(|r| r.breakdown.total).collect()
    }
}

/// Full-batch training of `net` in place.
pub fn train(
    net: &mut Network,
    pde: &ParabolicPde,
    samples: &SampleSet,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    let objective = Objective::new(pde, samples, config.weights)?.with_parallel(config.parallel);
    let mut params = net.flat_params();
    let mut state = AdamState::new(params.len());
    let mut history = Vec::with_capacity(config.iterations as usize + 1);
    let start = Instant::now();
    let mut last_good: Option<LossBreakdown> = None;
    let mut best: Option<(u64, f64, Vec<f64>)> = None;

    let fail = |iteration: u64, last: Option<LossBreakdown>, e: PinnError| match e {
        PinnError::Numerical(msg) => PinnError::Numerical(format!(
            "{msg} at iteration {iteration}; last finite loss {}",
            last.map(|b| format!("{b:?}")).unwrap_or_else(|| "none".into())
        )),
        other => other,
    };

    for iteration in 0..config.iterations {
        let lr = config.schedule.lr_at(iteration);
        let (breakdown, grads) = objective
            .loss_and_grad(net)
            .map_err(|e| fail(iteration, last_good, e))?;
        history.push(TrainRecord {
            iteration,
            lr,
            breakdown,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        });
        last_good = Some(breakdown);
        if config.keep_best && best.as_ref().is_none_or(|b| breakdown.total < b.1) {
            best = Some((iteration, breakdown.total, params.clone()));
        }
        if config.log_every > 0 && iteration % config.log_every == 0 {
            eprintln!(
                "iter {iteration:>6}  lr {lr:.1e}  loss {:.6e}  (init {:.3e}, bound {:.3e}, res {:.3e})",
                breakdown.total, breakdown.init_loss, breakdown.bound_loss, breakdown.res_loss
            );
        }
        match config.optimizer {
            Optimizer::Adam => adam_step(&mut params, &grads, &mut state, lr, &config.adam),
            Optimizer::Sgd => sgd_step(&mut params, &grads, lr),
        }
        .map_err(|e| fail(iteration, last_good, e))?;
        net.set_flat_params(&params)?;
    }

    let breakdown = objective
        .loss(net)
        .map_err(|e| fail(config.iterations, last_good, e))?;
    history.push(TrainRecord {
        iteration: config.iterations,
        lr: config.schedule.lr_at(config.iterations),
        breakdown,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    });
    let mut best_iteration = config.iterations;
    if let Some((iteration, total, p)) = best {
        if total < breakdown.total {
            net.set_flat_params(&p)?;
            best_iteration = iteration;
        }
    }
    if config.log_every > 0 {
        eprintln!("final loss {:.6e}", breakdown.total);
        if best_iteration != config.iterations {
            eprintln!("returning iteration {best_iteration} with loss {:.6e}", history[best_iteration as usize].breakdown.total);
        }
    }
    Ok(TrainOutcome {
        history,
        best_iteration,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

pub const HISTORY_HEADER: &str = "iteration,lr,init_loss,bound_loss,res_loss,total,elapsed_seconds";

/// Writes the history as CSV with full-precision floats.
pub fn write_history_csv(history: &[TrainRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |e| PinnError::io(path, e);
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(out, "{HISTORY_HEADER}").map_err(io)?;
    for r in history {
        let b = &r.breakdown;
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.6}",
            r.iteration, r.lr, b.init_loss, b.bound_loss, b.res_loss, b.total, r.elapsed_seconds
        )
        .map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Reads a history written by [`write_history_csv`].
pub fn read_history_csv(path: impl AsRef<Path>) -> Result<Vec<TrainRecord>> {
    let path = path.as_ref();
    let format = |message: String| PinnError::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| format(e.to_string()))?;
    let header = reader.headers().map_err(|e| format(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>().join(",") != HISTORY_HEADER {
        return Err(format(format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|e| format(format!("row {}: column {i}: {e}", line + 2)))
        };
        let iteration = record[0]
            .parse::<u64>()
            .map_err(|e| format(format!("row {}: iteration: {e}", line + 2)))?;
        rows.push(TrainRecord {
            iteration,
            lr: num(1)?,
            breakdown: LossBreakdown {
                init_loss: num(2)?,
                bound_loss: num(3)?,
                res_loss: num(4)?,
                total: num(5)?,
            },
            elapsed_seconds: num(6)?,
        });
    }
    Ok(rows)
}
