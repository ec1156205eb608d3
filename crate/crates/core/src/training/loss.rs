//! The three PINN loss terms and their weighted sum.
//!
//! Each term is available twice: generically over any [`JetModel`] (plain
//! evaluation or a taped network for reference gradients), and through
//! [`Objective`], which evaluates the full-batch loss and its parameter
//! gradient with batched jets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Jet4, Scalar, Var};
use crate::error::{PinnError, Result};
use crate::nn::{BatchForward, JetOrder, LayerParams, Network, OutputAdjoints, TapedNetwork};
use crate::pde::{residual, ParabolicPde};
use crate::sampling::{LabeledPoint, SampleSet};

/// Weights `α`, `β`, `γ` of the initial, boundary and residual terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        for (key, w) in [
            ("training.alpha", self.alpha),
            ("training.beta", self.beta),
            ("training.gamma", self.gamma),
        ] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(PinnError::config(key, format!("must be finite and >= 0, got {w}")));
            }
        }
        if self.alpha == 0.0 && self.beta == 0.0 && self.gamma == 0.0 {
            return Err(PinnError::config("training.alpha", "loss weights cannot all be zero"));
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> Self {
        LossWeights {
            alpha: self.alpha * k,
            beta: self.beta * k,
            gamma: self.gamma * k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub init_loss: f64,
    pub bound_loss: f64,
    pub res_loss: f64,
    pub total: f64,
}

impl LossBreakdown {
    pub fn new(init_loss: f64, bound_loss: f64, res_loss: f64, weights: &LossWeights) -> Self {
        LossBreakdown {
            init_loss,
            bound_loss,
            res_loss,
            total: total_loss(init_loss, bound_loss, res_loss, weights),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.init_loss.is_finite()
            && self.bound_loss.is_finite()
            && self.res_loss.is_finite()
            && self.total.is_finite()
    }
}

/// `α·init + β·bound + γ·res`.
pub fn total_loss<S: Scalar>(init: S, bound: S, res: S, w: &LossWeights) -> S {
    init * w.alpha + bound * w.beta + res * w.gamma
}

/// Something that maps `(t, x)` to a solution jet.
pub trait JetModel<S> {
    fn value(&self, t: f64, x: f64) -> Result<S>;
    fn jet(&self, t: f64, x: f64) -> Result<Jet4<S>>;
}

impl JetModel<f64> for Network {
    fn value(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.forward(&[t, x])?[0])
    }

    fn jet(&self, t: f64, x: f64) -> Result<Jet4> {
        self.forward_jet(t, x)
    }
}

impl<'t> JetModel<Var<'t>> for TapedNetwork<'t> {
    fn value(&self, t: f64, x: f64) -> Result<Var<'t>> {
        self.forward(t, x)
    }

    fn jet(&self, t: f64, x: f64) -> Result<Jet4<Var<'t>>> {
        self.forward_jet(t, x)
    }
}

fn mean<S: Scalar>(terms: impl Iterator<Item = Result<S>>, n: usize) -> Result<S> {
    let mut acc: Option<S> = None;
    for term in terms {
        let term = term?;
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    let sum = acc.ok_or_else(|| PinnError::Usage("loss over an empty point set".into()))?;
    Ok(sum * (1.0 / n as f64))
}

fn data_loss<S: Scalar, M: JetModel<S>>(net: &M, points: &[LabeledPoint]) -> Result<S> {
    mean(
        points.iter().map(|p| {
            let d = net.value(p.t, p.x)? - p.target;
            Ok(d * d)
        }),
        points.len(),
    )
}

/// Mean squared misfit on the initial points.
pub fn loss_init<S: Scalar, M: JetModel<S>>(net: &M, samples: &SampleSet) -> Result<S> {
    data_loss(net, &samples.initial)
}

/// Mean squared misfit on the boundary points.
pub fn loss_bound<S: Scalar, M: JetModel<S>>(net: &M, samples: &SampleSet) -> Result<S> {
    data_loss(net, &samples.boundary)
}

/// Mean squared PDE residual on the collocation points.
pub fn loss_res<S: Scalar, M: JetModel<S>>(
    net: &M,
    pde: &ParabolicPde,
    samples: &SampleSet,
) -> Result<S> {
    mean(
        samples.collocation.iter().map(|&(t, x)| {
            let r = residual(pde, &net.jet(t, x)?, x, t)?;
            Ok(r * r)
        }),
        samples.collocation.len(),
    )
}

/// Points per batch in [`Objective`]. Fixed so that partial sums, and hence
/// results, do not depend on how many threads run the batches.
pub const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Init,
    Bound,
    Res,
}

struct Task {
    part: Part,
    start: usize,
    end: usize,
}

struct TaskResult {
    part: Part,
    sum_sq: f64,
    grads: Option<Vec<LayerParams>>,
}

/// Full-batch PINN objective with batched gradient evaluation.
pub struct Objective<'a> {
    pde: &'a ParabolicPde,
    samples: &'a SampleSet,
    weights: LossWeights,
    parallel: bool,
    tasks: Vec<Task>,
}

impl<'a> Objective<'a> {
    pub fn new(pde: &'a ParabolicPde, samples: &'a SampleSet, weights: LossWeights) -> Result<Self> {
        weights.validate()?;
        if samples.initial.is_empty() || samples.boundary.is_empty() || samples.collocation.is_empty()
        {
            return Err(PinnError::Usage(
                "initial, boundary and collocation sets must all be nonempty".into(),
            ));
        }
        let mut tasks = Vec::new();
        for (part, len) in [
            (Part::Init, samples.initial.len()),
            (Part::Bound, samples.boundary.len()),
            (Part::Res, samples.collocation.len()),
        ] {
            for start in (0..len).step_by(CHUNK) {
                tasks.push(Task {
                    part,
                    start,
                    end: (start + CHUNK).min(len),
                });
            }
        }
        Ok(Objective {
            pde,
            samples,
            weights,
            parallel: false,
            tasks,
        })
    }

    /// Runs batches on the rayon pool. Results are bitwise identical to the
    /// sequential mode because batches are reduced in a fixed order.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn weights(&self) -> &LossWeights {
        &self.weights
    }

    fn run_task(&self, net: &Network, task: &Task, with_grad: bool) -> TaskResult {
        let s = self.samples;
        let range = task.start..task.end;
        let (sum_sq, fwd, seed) = match task.part {
            Part::Init | Part::Bound => {
                let (points, weight, n) = if task.part == Part::Init {
                    (&s.initial[range], self.weights.alpha, s.initial.len())
                } else {
                    (&s.boundary[range], self.weights.beta, s.boundary.len())
                };
                let ts: Vec<f64> = points.iter().map(|p| p.t).collect();
                let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
                let fwd = BatchForward::run(net, &ts, &xs, JetOrder::Value);
                let scale = 2.0 * weight / n as f64;
                let mut seed = OutputAdjoints::zeros(points.len(), JetOrder::Value);
                let mut sum_sq = 0.0;
                for (j, (p, &u)) in points.iter().zip(fwd.values()).enumerate() {
                    let d = u - p.target;
                    sum_sq += d * d;
                    seed.val[j] = scale * d;
                }
                (sum_sq, fwd, seed)
            }
            Part::Res => {
                let points = &s.collocation[range];
                let ts: Vec<f64> = points.iter().map(|p| p.0).collect();
                let xs: Vec<f64> = points.iter().map(|p| p.1).collect();
                let fwd = BatchForward::run(net, &ts, &xs, JetOrder::Full);
                let scale = 2.0 * self.weights.gamma / s.collocation.len() as f64;
                let pde = self.pde;
                let mut seed = OutputAdjoints::zeros(points.len(), JetOrder::Full);
                let mut sum_sq = 0.0;
                let (uts, uxs, uxxs) = fwd.tangents();
                for j in 0..points.len() {
                    let (u, ut, ux, uxx) = (fwd.values()[j], uts[j], uxs[j], uxxs[j]);
                    // u^(p-1) and u^p by repeated multiplication
                    let mut pow_lower = 1.0;
                    for _ in 1..pde.p {
                        pow_lower *= u;
                    }
                    let pow = pow_lower * u;
                    let eta = pde.source().eval(xs[j], ts[j], u, ux);
                    let r = ut - pde.m * uxx - pde.n * u - pde.o * pow - eta.value;
                    sum_sq += r * r;
                    let rbar = scale * r;
                    seed.val[j] = rbar * (-pde.n - pde.o * pde.p as f64 * pow_lower - eta.d_u);
                    seed.dt[j] = rbar;
                    seed.dx[j] = -rbar * eta.d_ux;
                    seed.dxx[j] = -pde.m * rbar;
                }
                (sum_sq, fwd, seed)
            }
        };
        let grads = with_grad.then(|| {
            let mut g = net.zeros_like();
            fwd.backward(net, &seed, &mut g);
            g
        });
        TaskResult {
            part: task.part,
            sum_sq,
            grads,
        }
    }

    fn run(&self, net: &Network, with_grad: bool) -> Result<(LossBreakdown, Option<Vec<LayerParams>>)> {
        let results: Vec<TaskResult> = if self.parallel {
            self.tasks
                .par_iter()
                .map(|t| self.run_task(net, t, with_grad))
                .collect()
        } else {
            self.tasks
                .iter()
                .map(|t| self.run_task(net, t, with_grad))
                .collect()
        };
        let mut sums = [0.0f64; 3];
        let mut total_grad: Option<Vec<LayerParams>> = None;
        for r in results {
            let slot = match r.part {
                Part::Init => 0,
                Part::Bound => 1,
                Part::Res => 2,
            };
            sums[slot] += r.sum_sq;
            if let Some(g) = r.grads {
                match total_grad.as_mut() {
                    None => total_grad = Some(g),
                    Some(acc) => {
                        for (a, b) in acc.iter_mut().zip(&g) {
                            a.weights += &b.weights;
                            a.biases += &b.biases;
                        }
                    }
                }
            }
        }
        let s = self.samples;
        let breakdown = LossBreakdown::new(
            sums[0] / s.initial.len() as f64,
            sums[1] / s.boundary.len() as f64,
            sums[2] / s.collocation.len() as f64,
            &self.weights,
        );
        if !breakdown.is_finite() {
            return Err(PinnError::Numerical(format!("non-finite loss {breakdown:?}")));
        }
        Ok((breakdown, total_grad))
    }

    pub fn loss(&self, net: &Network) -> Result<LossBreakdown> {
        Ok(self.run(net, false)?.0)
    }

    /// Loss and its gradient, flattened in [`Network::flat_params`] order.
    pub fn loss_and_grad(&self, net: &Network) -> Result<(LossBreakdown, Vec<f64>)> {
        let (breakdown, grads) = self.run(net, true)?;
        let grads = grads.expect("gradient requested");
        Ok((breakdown, crate::nn::network::flatten(&grads)))
    }
}
