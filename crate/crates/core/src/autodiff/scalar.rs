use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use std::f64::consts::{FRAC_2_SQRT_PI, SQRT_2};

/// `1/sqrt(2*pi)`, the peak of the standard normal density.
pub(crate) const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// A scalar function of one variable with its first three derivatives.
///
/// Three derivatives are needed because the jet chain rule uses `g''` for the
/// second tangent, and reverse sweeps through that tangent need `g'''`.
pub trait UnaryFn {
    /// Returns `[g(v), g'(v), g''(v), g'''(v)]`.
    fn derivs(&self, v: f64) -> [f64; 4];
}

/// Elementary functions supported by both the jet arithmetic and the tape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unary {
    Exp,
    Tanh,
    Erf,
    Gelu,
    Sigmoid,
    Relu,
    Recip,
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / SQRT_2))
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

impl UnaryFn for Unary {
    fn derivs(&self, v: f64) -> [f64; 4] {
        match self {
            Unary::Exp => {
                let e = v.exp();
                [e, e, e, e]
            }
            Unary::Tanh => {
                let t = v.tanh();
                let s = 1.0 - t * t;
                [t, s, -2.0 * t * s, s * (6.0 * t * t - 2.0)]
            }
            Unary::Erf => {
                let d1 = FRAC_2_SQRT_PI * (-v * v).exp();
                [libm::erf(v), d1, -2.0 * v * d1, (4.0 * v * v - 2.0) * d1]
            }
            Unary::Gelu => {
                let cdf = normal_cdf(v);
                let pdf = normal_pdf(v);
                [
                    v * cdf,
                    cdf + v * pdf,
                    pdf * (2.0 - v * v),
                    pdf * (v * v * v - 4.0 * v),
                ]
            }
            Unary::Sigmoid => {
                let s = 1.0 / (1.0 + (-v).exp());
                let d1 = s * (1.0 - s);
                [s, d1, d1 * (1.0 - 2.0 * s), d1 * (1.0 - 6.0 * s + 6.0 * s * s)]
            }
            Unary::Relu => {
                if v > 0.0 {
                    [v, 1.0, 0.0, 0.0]
                } else {
                    [0.0, 0.0, 0.0, 0.0]
                }
            }
            Unary::Recip => {
                let r = 1.0 / v;
                let r2 = r * r;
                [r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2]
            }
        }
    }
}

/// Number types the jet arithmetic can be built over: plain `f64` for
/// evaluation and tape variables for reverse-mode differentiation.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn value(&self) -> f64;

    /// A constant living in the same context as `self`.
    fn constant(&self, c: f64) -> Self;

    /// `[g(self), g'(self), g''(self)]`.
    fn unary(self, f: &dyn UnaryFn) -> [Self; 3];

    /// A value computed outside the arithmetic from `a` and `b`, with known
    /// local partials `da`, `db`.
    fn lift2(a: Self, b: Self, value: f64, da: f64, db: f64) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn value(&self) -> f64 {
        *self
    }

    #[inline]
    fn constant(&self, c: f64) -> Self {
        c
    }

    #[inline]
    fn unary(self, f: &dyn UnaryFn) -> [Self; 3] {
        let [g, d1, d2, _] = f.derivs(self);
        [g, d1, d2]
    }

    #[inline]
    fn lift2(_a: Self, _b: Self, value: f64, _da: f64, _db: f64) -> Self {
        value
    }
}
