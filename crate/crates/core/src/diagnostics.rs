//! Self-checks: exact-solution residuals and finite-difference validation of
//! network derivatives and loss gradients.

use std::time::Instant;

use serde::Serialize;

use crate::autodiff::relative_gap;
use crate::error::Result;
use crate::nn::{layer_sizes, Activation, Network};
use crate::pde::{allen_cahn_problem, exact_residual_probe, nws_problem, probe_points, NwsParams};
use crate::sampling::sample_uniform;
use crate::training::{LossWeights, Objective};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub seconds: f64,
}

impl CheckOutcome {
    fn new(name: &'static str, value: f64, threshold: f64, start: Instant) -> Self {
        CheckOutcome {
            name,
            value,
            threshold,
            passed: value <= threshold,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<28} {:.3e} <= {:.1e}  ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold,
            self.seconds
        )
    }
}

pub const NWS_RESIDUAL_TOL: f64 = 1e-10;
pub const ALLEN_CAHN_RESIDUAL_TOL: f64 = 5e-5;
pub const FIRST_ORDER_TOL: f64 = 1e-5;
pub const SECOND_ORDER_TOL: f64 = 1e-3;

/// Largest `|residual|` of the NWS closed form at `n` seeded points.
pub fn nws_residual_check(n: usize, seed: u64) -> Result<CheckOutcome> {
    let start = Instant::now();
    let pde = nws_problem(NwsParams::default())?;
    let worst = exact_residual_probe(&pde, &probe_points(&pde, n, seed))?;
    Ok(CheckOutcome::new("nws_exact_residual", worst, NWS_RESIDUAL_TOL, start))
}

/// Largest `|residual|` of the Allen-Cahn closed form at `n` seeded points.
pub fn allen_cahn_residual_check(n: usize, seed: u64) -> Result<CheckOutcome> {
    let start = Instant::now();
    let pde = allen_cahn_problem();
    let worst = exact_residual_probe(&pde, &probe_points(&pde, n, seed))?;
    Ok(CheckOutcome::new("allen_cahn_exact_residual", worst, ALLEN_CAHN_RESIDUAL_TOL, start))
}

/// Worst relative gaps over a batch of random networks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NetworkCheckReport {
    /// `u_t`, `u_x` against central differences of the network output.
    pub first_order: f64,
    /// `u_xx` against second central differences.
    pub second_order: f64,
    /// Total-loss parameter gradient against central differences of the loss.
    pub loss_gradient: f64,
}

fn random_network(k: u64, seed: u64) -> Result<Network> {
    let activation = [Activation::Gelu, Activation::Tanh, Activation::Sigmoid][k as usize % 3];
    let hidden = 1 + (k as usize % 3);
    let width = 3 + (k as usize % 4);
    Network::init_glorot(&layer_sizes(hidden, width), activation, seed.wrapping_add(k))
}

/// Finite-difference validation on `count` small random networks.
pub fn network_derivative_check(count: usize, seed: u64) -> Result<NetworkCheckReport> {
    let mut report = NetworkCheckReport::default();
    let nws = nws_problem(NwsParams::default())?;
    let ac = allen_cahn_problem();
    for k in 0..count as u64 {
        let mut net = random_network(k, seed)?;
        let pde = if k % 2 == 0 { &nws } else { &ac };
        let samples = sample_uniform(pde, 4, 4, 8, seed.wrapping_add(k))?;

        let h1 = 1e-5;
        let h2 = 1e-4;
        for &(t, x) in samples.collocation.iter().take(4) {
            let jet = net.forward_jet(t, x)?;
            let u = |t: f64, x: f64| net.predict(t, x);
            let fd_t = (u(t + h1, x) - u(t - h1, x)) / (2.0 * h1);
            let fd_x = (u(t, x + h1) - u(t, x - h1)) / (2.0 * h1);
            let fd_xx = (u(t, x + h2) - 2.0 * u(t, x) + u(t, x - h2)) / (h2 * h2);
            report.first_order = report
                .first_order
                .max(relative_gap(jet.dt, fd_t))
                .max(relative_gap(jet.dx, fd_x));
            report.second_order = report.second_order.max(relative_gap(jet.dxx, fd_xx));
        }

        let objective = Objective::new(pde, &samples, LossWeights::default())?;
        let (_, grad) = objective.loss_and_grad(&net)?;
        let params = net.flat_params();
        let hp = 1e-6;
        for (i, &g) in grad.iter().enumerate() {
            let mut p = params.clone();
            p[i] = params[i] + hp;
            net.set_flat_params(&p)?;
            let up = objective.loss(&net)?.total;
            p[i] = params[i] - hp;
            net.set_flat_params(&p)?;
            let down = objective.loss(&net)?.total;
            report.loss_gradient = report.loss_gradient.max(relative_gap(g, (up - down) / (2.0 * hp)));
        }
        net.set_flat_params(&params)?;
    }
    Ok(report)
}

/// Every self-check, in a fixed order.
pub fn run_self_checks(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = vec![nws_residual_check(1000, seed)?, allen_cahn_residual_check(1000, seed)?];
    let start = Instant::now();
    let r = network_derivative_check(10, seed)?;
    out.push(CheckOutcome::new("network_first_order", r.first_order, FIRST_ORDER_TOL, start));
    out.push(CheckOutcome::new("network_second_order", r.second_order, SECOND_ORDER_TOL, start));
    out.push(CheckOutcome::new("loss_parameter_gradient", r.loss_gradient, FIRST_ORDER_TOL, start));
    Ok(out)
}
