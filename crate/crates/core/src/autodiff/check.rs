//! Finite-difference validation of jet tangents and tape gradients.

use super::jet::Jet4;
use super::scalar::Scalar;
use super::tape::Tape;
use crate::error::{PinnError, Result};

/// Smallest denominator used by [`relative_gap`]; below it the gap is absolute.
pub const RELATIVE_FLOOR: f64 = 1e-3;

/// `|a - b| / max(|a|, |b|, RELATIVE_FLOOR)`.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(RELATIVE_FLOOR);
    (a - b).abs() / scale
}

/// A function of several variables written once over jets, so it can be run
/// on plain floats for tangents and on a tape for gradients.
pub trait JetFunction {
    fn eval<S: Scalar>(&self, inputs: &[Jet4<S>]) -> Jet4<S>;
}

/// Worst relative discrepancies found by [`derivative_check`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DerivativeReport {
    /// `dt` and `dx` tangents against central first differences.
    pub first_order: f64,
    /// `dxx` tangents against second central differences.
    pub second_order: f64,
    /// Tape adjoints of the value against central first differences.
    pub gradient: f64,
    /// Tape adjoints of a first tangent against differences of that tangent.
    pub tangent_gradient: f64,
}

impl DerivativeReport {
    pub fn worst_first_order(&self) -> f64 {
        self.first_order
            .max(self.gradient)
            .max(self.tangent_gradient)
    }

    pub fn worst(&self) -> f64 {
        self.worst_first_order().max(self.second_order)
    }
}

fn eval_value<F: JetFunction>(f: &F, point: &[f64]) -> f64 {
    let inputs: Vec<Jet4> = point.iter().map(|&p| Jet4::constant(p)).collect();
    f.eval(&inputs).val
}

/// Jet of `f` with input `axis` seeded in both the `t` and `x` directions.
fn eval_along<F: JetFunction>(f: &F, point: &[f64], axis: usize) -> Jet4 {
    let inputs: Vec<Jet4> = point
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if i == axis {
                Jet4::new(p, 1.0, 1.0, 0.0)
            } else {
                Jet4::constant(p)
            }
        })
        .collect();
    f.eval(&inputs)
}

fn shifted(point: &[f64], axis: usize, by: f64) -> Vec<f64> {
    let mut p = point.to_vec();
    p[axis] += by;
    p
}

/// Compares every derivative the engine produces for `f` at `point` with
/// central finite differences of step `step`.
pub fn derivative_check<F: JetFunction>(
    f: &F,
    point: &[f64],
    step: f64,
) -> Result<DerivativeReport> {
    if !(step > 0.0) {
        return Err(PinnError::Usage(format!("step must be positive, got {step}")));
    }
    if point.is_empty() {
        return Err(PinnError::Usage("derivative check needs at least one input".into()));
    }
    let mut report = DerivativeReport::default();
    let centre = eval_value(f, point);

    let tape = Tape::new();
    let params: Vec<_> = point.iter().map(|&p| tape.param(p)).collect();
    let inputs: Vec<Jet4<_>> = params.iter().map(|&v| Jet4::constant(v)).collect();
    let grad = tape.grad(f.eval(&inputs).val)?.params();

    for axis in 0..point.len() {
        let plus = eval_value(f, &shifted(point, axis, step));
        let minus = eval_value(f, &shifted(point, axis, -step));
        let fd1 = (plus - minus) / (2.0 * step);
        let fd2 = (plus - 2.0 * centre + minus) / (step * step);
        let jet = eval_along(f, point, axis);
        report.first_order = report
            .first_order
            .max(relative_gap(jet.dt, fd1))
            .max(relative_gap(jet.dx, fd1));
        report.second_order = report.second_order.max(relative_gap(jet.dxx, fd2));
        report.gradient = report.gradient.max(relative_gap(grad[axis], fd1));

        // Reverse sweep through the tangent: d(df/dp_axis)/dp_j.
        let tape = Tape::new();
        let params: Vec<_> = point.iter().map(|&p| tape.param(p)).collect();
        let inputs: Vec<Jet4<_>> = params
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let one = v.constant(if i == axis { 1.0 } else { 0.0 });
                Jet4::new(v, one, one, v.constant(0.0))
            })
            .collect();
        let mixed = tape.grad(f.eval(&inputs).dx)?.params();
        for (j, &m) in mixed.iter().enumerate() {
            let up = eval_along(f, &shifted(point, j, step), axis).dx;
            let down = eval_along(f, &shifted(point, j, -step), axis).dx;
            let fd = (up - down) / (2.0 * step);
            report.tangent_gradient = report.tangent_gradient.max(relative_gap(m, fd));
        }
    }
    let all_finite = [
        report.first_order,
        report.second_order,
        report.gradient,
        report.tangent_gradient,
    ]
    .iter()
    .all(|v| v.is_finite());
    if !all_finite {
        return Err(PinnError::Numerical(format!(
            "derivative check produced non-finite discrepancy at {point:?}"
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Exp;
    impl JetFunction for Exp {
        fn eval<S: Scalar>(&self, v: &[Jet4<S>]) -> Jet4<S> {
            v[0].exp()
        }
    }

    struct Cube;
    impl JetFunction for Cube {
        fn eval<S: Scalar>(&self, v: &[Jet4<S>]) -> Jet4<S> {
            v[0].powi(3)
        }
    }

    struct Flat;
    impl JetFunction for Flat {
        fn eval<S: Scalar>(&self, v: &[Jet4<S>]) -> Jet4<S> {
            v[0].constant_like(4.2)
        }
    }

    struct Mixed;
    impl JetFunction for Mixed {
        fn eval<S: Scalar>(&self, v: &[Jet4<S>]) -> Jet4<S> {
            let q = (v[0] * v[1]).tanh() + v[2].erf() * v[0];
            let d = (v[1] * v[1] + 1.5).recip().unwrap();
            q * d + v[2].sigmoid().powi(2) - v[0].gelu()
        }
    }

    #[test]
    fn exp_matches_differences() {
        let r = derivative_check(&Exp, &[0.7], 1e-4).unwrap();
        assert!(r.worst_first_order() <= 1e-6, "{r:?}");
        assert!(r.second_order <= 1e-5, "{r:?}");
    }

    #[test]
    fn cube_second_derivative() {
        let r = derivative_check(&Cube, &[2.0], 1e-4).unwrap();
        // analytic second derivative is 12
        let j = eval_along(&Cube, &[2.0], 0);
        assert_eq!(j.dxx, 12.0);
        assert!(r.second_order <= 1e-5, "{r:?}");
    }

    #[test]
    fn constant_has_zero_discrepancy() {
        let r = derivative_check(&Flat, &[0.3], 1e-4).unwrap();
        assert_eq!(r.worst(), 0.0);
    }

    #[test]
    fn composite_expression() {
        let r = derivative_check(&Mixed, &[0.4, -0.8, 0.25], 1e-4).unwrap();
        assert!(r.worst_first_order() <= 1e-5, "{r:?}");
        assert!(r.second_order <= 1e-3, "{r:?}");
    }

    #[test]
    fn rejects_bad_step() {
        assert!(derivative_check(&Exp, &[0.0], 0.0).is_err());
        assert!(derivative_check(&Exp, &[0.0], f64::NAN).is_err());
    }
}
