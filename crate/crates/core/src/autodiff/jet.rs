use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::{Scalar, Unary, UnaryFn};
use crate::error::{PinnError, Result};

/// A value carried with its `d/dt`, `d/dx` and `d²/dx²` tangents.
///
/// Arithmetic follows truncated Taylor rules, so pushing seeded jets through
/// any composition of the supported operations yields the exact first time
/// derivative and first and second space derivatives of the result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet4<S = f64> {
    pub val: S,
    pub dt: S,
    pub dx: S,
    pub dxx: S,
}

impl<S: Scalar> Jet4<S> {
    pub fn new(val: S, dt: S, dx: S, dxx: S) -> Self {
        Jet4 { val, dt, dx, dxx }
    }

    /// A jet with zero tangents.
    pub fn constant(val: S) -> Self {
        let zero = val.constant(0.0);
        Jet4::new(val, zero, zero, zero)
    }

    /// The constant `c` in the same context as `self`.
    pub fn constant_like(&self, c: f64) -> Self {
        Jet4::constant(self.val.constant(c))
    }

    /// Multiplies every component by `s`.
    pub fn scale(self, s: S) -> Self {
        Jet4 {
            val: self.val * s,
            dt: self.dt * s,
            dx: self.dx * s,
            dxx: self.dxx * s,
        }
    }

    /// Adds `s` to the value.
    pub fn shift(self, s: S) -> Self {
        Jet4 {
            val: self.val + s,
            ..self
        }
    }

    /// Chain rule through a scalar function `g`:
    /// `(g, g'·dt, g'·dx, g''·dx² + g'·dxx)`.
    pub fn map_unary(self, f: &dyn UnaryFn) -> Self {
        let [g, d1, d2] = self.val.unary(f);
        Jet4 {
            val: g,
            dt: d1 * self.dt,
            dx: d1 * self.dx,
            dxx: d2 * self.dx * self.dx + d1 * self.dxx,
        }
    }

    pub fn exp(self) -> Self {
        self.map_unary(&Unary::Exp)
    }

    pub fn tanh(self) -> Self {
        self.map_unary(&Unary::Tanh)
    }

    pub fn erf(self) -> Self {
        self.map_unary(&Unary::Erf)
    }

    pub fn gelu(self) -> Self {
        self.map_unary(&Unary::Gelu)
    }

    pub fn sigmoid(self) -> Self {
        self.map_unary(&Unary::Sigmoid)
    }

    pub fn relu(self) -> Self {
        self.map_unary(&Unary::Relu)
    }

    /// Integer power by repeated multiplication; well defined for negative bases.
    pub fn powi(self, n: u32) -> Self {
        if n == 0 {
            return self.constant_like(1.0);
        }
        let mut acc = self;
        for _ in 1..n {
            acc = acc * self;
        }
        acc
    }

    pub fn recip(self) -> Result<Self> {
        if self.val.value() == 0.0 {
            return Err(PinnError::Singularity(
                "reciprocal of a jet with zero value".into(),
            ));
        }
        Ok(self.map_unary(&Unary::Recip))
    }

    pub fn try_div(self, rhs: Self) -> Result<Self> {
        if rhs.val.value() == 0.0 {
            return Err(PinnError::Singularity(
                "division by a jet with zero value".into(),
            ));
        }
        Ok(self * rhs.recip()?)
    }

    pub fn is_finite(&self) -> bool {
        self.val.value().is_finite()
            && self.dt.value().is_finite()
            && self.dx.value().is_finite()
            && self.dxx.value().is_finite()
    }
}

impl Jet4<f64> {
    /// Seed for the time input: `(t, 1, 0, 0)`.
    pub fn seed_t(t: f64) -> Self {
        Jet4::new(t, 1.0, 0.0, 0.0)
    }

    /// Seed for the space input: `(x, 0, 1, 0)`.
    pub fn seed_x(x: f64) -> Self {
        Jet4::new(x, 0.0, 1.0, 0.0)
    }

    pub fn components(&self) -> [f64; 4] {
        [self.val, self.dt, self.dx, self.dxx]
    }
}

/// Canonical input seeds for the point `(t, x)`.
pub fn jet_seed(t: f64, x: f64) -> Result<(Jet4, Jet4)> {
    if !t.is_finite() || !x.is_finite() {
        return Err(PinnError::Domain(format!(
            "jet seed requires finite inputs, got t={t}, x={x}"
        )));
    }
    Ok((Jet4::seed_t(t), Jet4::seed_x(x)))
}

impl<S: Scalar> Add for Jet4<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Jet4 {
            val: self.val + rhs.val,
            dt: self.dt + rhs.dt,
            dx: self.dx + rhs.dx,
            dxx: self.dxx + rhs.dxx,
        }
    }
}

impl<S: Scalar> Sub for Jet4<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Jet4 {
            val: self.val - rhs.val,
            dt: self.dt - rhs.dt,
            dx: self.dx - rhs.dx,
            dxx: self.dxx - rhs.dxx,
        }
    }
}

impl<S: Scalar> Mul for Jet4<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Jet4 {
            val: self.val * rhs.val,
            dt: self.dt * rhs.val + self.val * rhs.dt,
            dx: self.dx * rhs.val + self.val * rhs.dx,
            dxx: self.dxx * rhs.val + self.dx * rhs.dx * 2.0 + self.val * rhs.dxx,
        }
    }
}

impl<S: Scalar> Neg for Jet4<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet4 {
            val: -self.val,
            dt: -self.dt,
            dx: -self.dx,
            dxx: -self.dxx,
        }
    }
}

impl<S: Scalar> Add<f64> for Jet4<S> {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        Jet4 {
            val: self.val + rhs,
            ..self
        }
    }
}

impl<S: Scalar> Sub<f64> for Jet4<S> {
    type Output = Self;
    fn sub(self, rhs: f64) -> Self {
        Jet4 {
            val: self.val - rhs,
            ..self
        }
    }
}

impl<S: Scalar> Mul<f64> for Jet4<S> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Jet4 {
            val: self.val * rhs,
            dt: self.dt * rhs,
            dx: self.dx * rhs,
            dxx: self.dxx * rhs,
        }
    }
}
