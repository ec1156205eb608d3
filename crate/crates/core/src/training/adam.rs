use serde::{Deserialize, Serialize};

use crate::error::{PinnError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
            step: 0,
        }
    }
}

fn check_inputs(params: &[f64], grads: &[f64], lr: f64) -> Result<()> {
    if params.len() != grads.len() {
        return Err(PinnError::Usage(format!(
            "{} parameters but {} gradient entries",
            params.len(),
            grads.len()
        )));
    }
    if !(lr > 0.0) {
        return Err(PinnError::Usage(format!("learning rate must be positive, got {lr}")));
    }
    if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
        return Err(PinnError::Numerical(format!(
            "non-finite gradient entry {} at parameter {i}",
            grads[i]
        )));
    }
    Ok(())
}

/// One bias-corrected Adam update.
pub fn adam_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut AdamState,
    lr: f64,
    hp: &AdamParams,
) -> Result<()> {
    check_inputs(params, grads, lr)?;
    if state.m.len() != params.len() || state.v.len() != params.len() {
        return Err(PinnError::Usage("optimizer state does not match parameters".into()));
    }
    state.step += 1;
    let step = state.step as i32;
    let c1 = 1.0 - hp.beta1.powi(step);
    let c2 = 1.0 - hp.beta2.powi(step);
    for (((p, &g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut())
        .zip(state.v.iter_mut())
    {
        *m = hp.beta1 * *m + (1.0 - hp.beta1) * g;
        *v = hp.beta2 * *v + (1.0 - hp.beta2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= lr * m_hat / (v_hat.sqrt() + hp.epsilon);
    }
    Ok(())
}

/// Plain gradient descent, `θ ← θ − lr·g`.
pub fn sgd_step(params: &mut [f64], grads: &[f64], lr: f64) -> Result<()> {
    check_inputs(params, grads, lr)?;
    for (p, &g) in params.iter_mut().zip(grads) {
        *p -= lr * g;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_lr() {
        let mut p = vec![0.0];
        let mut s = AdamState::new(1);
        adam_step(&mut p, &[0.5], &mut s, 0.01, &AdamParams::default()).unwrap();
        // m̂ = 0.5, v̂ = 0.25: Δ = -0.01 · 0.5 / (0.5 + 1e-8)
        assert!((p[0] + 0.01).abs() < 1e-9);
        assert_eq!(s.step, 1);
    }

    #[test]
    fn zero_gradient_keeps_parameters() {
        let hp = AdamParams::default();
        let mut p = vec![0.3, -1.2];
        let mut s = AdamState::new(2);
        adam_step(&mut p, &[0.0, 0.0], &mut s, 0.01, &hp).unwrap();
        assert_eq!(p, vec![0.3, -1.2]);
        assert_eq!(s.m, vec![0.0, 0.0]);
    }

    #[test]
    fn moments_decay_without_gradient() {
        let mut p = vec![0.0];
        let mut s = AdamState::new(1);
        s.m = vec![0.2];
        s.v = vec![0.5];
        adam_step(&mut p, &[0.0], &mut s, 0.01, &AdamParams::default()).unwrap();
        assert!((s.m[0] - 0.18).abs() < 1e-15);
        assert!((s.v[0] - 0.4995).abs() < 1e-15);
    }

    #[test]
    fn opposite_gradients_move_symmetrically() {
        let mut p = vec![1.0, 1.0];
        let mut s = AdamState::new(2);
        let hp = AdamParams::default();
        for _ in 0..5 {
            adam_step(&mut p, &[0.3, -0.3], &mut s, 0.01, &hp).unwrap();
        }
        assert_eq!(p[0] - 1.0, -(p[1] - 1.0));
    }

    #[test]
    fn bad_inputs() {
        let mut s = AdamState::new(1);
        let hp = AdamParams::default();
        assert!(matches!(
            adam_step(&mut [0.0], &[f64::NAN], &mut s, 0.01, &hp),
            Err(PinnError::Numerical(_))
        ));
        assert!(adam_step(&mut [0.0], &[0.1, 0.2], &mut s, 0.01, &hp).is_err());
        assert!(adam_step(&mut [0.0], &[0.1], &mut s, 0.0, &hp).is_err());
    }
}
