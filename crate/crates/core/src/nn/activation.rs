use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::autodiff::{normal_cdf, Unary, UnaryFn};
use crate::error::PinnError;

/// Hidden-layer nonlinearity. The output layer is always linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Gelu,
    Tanh,
    Sigmoid,
    Relu,
}

impl Activation {
    pub fn unary(self) -> Unary {
        match self {
            Activation::Gelu => Unary::Gelu,
            Activation::Tanh => Unary::Tanh,
            Activation::Sigmoid => Unary::Sigmoid,
            Activation::Relu => Unary::Relu,
        }
    }

    /// `[σ(v), σ'(v), σ''(v), σ'''(v)]`.
    #[inline]
    pub fn derivs(self, v: f64) -> [f64; 4] {
        self.unary().derivs(v)
    }

    /// `σ(v)`, computed with the same expressions as `derivs(v)[0]`.
    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Gelu => v * normal_cdf(v),
            Activation::Tanh => v.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-v).exp()),
            Activation::Relu => {
                if v > 0.0 {
                    v
                } else {
                    0.0
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Gelu => "gelu",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Relu => "relu",
        }
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            Activation::Gelu => 0,
            Activation::Tanh => 1,
            Activation::Sigmoid => 2,
            Activation::Relu => 3,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Activation::Gelu),
            1 => Some(Activation::Tanh),
            2 => Some(Activation::Sigmoid),
            3 => Some(Activation::Relu),
            _ => None,
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = PinnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gelu" => Ok(Activation::Gelu),
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" => Ok(Activation::Sigmoid),
            "relu" => Ok(Activation::Relu),
            other => Err(PinnError::config(
                "network.activation",
                format!("expected one of gelu|tanh|sigmoid|relu, got `{other}`"),
            )),
        }
    }
}

/// Exact GELU, `x·Φ(x)`.
pub fn gelu(x: f64) -> f64 {
    Unary::Gelu.derivs(x)[0]
}

/// `Φ(x) + x·φ(x)`.
pub fn gelu_prime(x: f64) -> f64 {
    Unary::Gelu.derivs(x)[1]
}

/// `φ(x)·(2 − x²)`.
pub fn gelu_second(x: f64) -> f64 {
    Unary::Gelu.derivs(x)[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    // Φ(1) to 20 digits: 0.84134474606854293...
    const CDF_ONE: f64 = 0.841_344_746_068_542_9;

    #[test]
    fn gelu_reference_values() {
        assert_eq!(gelu(0.0), 0.0);
        assert!((gelu(1.0) - CDF_ONE).abs() < 1e-15);
        assert!((gelu(-1.0) + (1.0 - CDF_ONE)).abs() < 1e-15);
        assert!((gelu(1.0) - 0.841_344_7).abs() < 1e-7);
        assert!((gelu(-1.0) + 0.158_655_2).abs() < 1e-7);
    }

    #[test]
    fn gelu_derivatives_match_differences() {
        let h = 1e-5;
        for &x in &[-2.5, -1.0, -0.3, 0.0, 0.4, 1.7, 3.0] {
            let d1 = (gelu(x + h) - gelu(x - h)) / (2.0 * h);
            let d2 = (gelu_prime(x + h) - gelu_prime(x - h)) / (2.0 * h);
            let d3 = (gelu_second(x + h) - gelu_second(x - h)) / (2.0 * h);
            assert!((gelu_prime(x) - d1).abs() < 1e-9);
            assert!((gelu_second(x) - d2).abs() < 1e-9);
            assert!((Activation::Gelu.derivs(x)[3] - d3).abs() < 1e-9);
        }
    }

    #[test]
    fn third_derivatives_match_differences() {
        let h = 1e-5;
        for act in [Activation::Tanh, Activation::Sigmoid] {
            for &x in &[-1.3, -0.2, 0.0, 0.6, 2.1] {
                for k in 0..3 {
                    let fd = (act.derivs(x + h)[k] - act.derivs(x - h)[k]) / (2.0 * h);
                    assert!((act.derivs(x)[k + 1] - fd).abs() < 1e-9, "{act} order {k} at {x}");
                }
            }
        }
    }

    #[test]
    fn apply_agrees_with_derivs_bitwise() {
        for act in [Activation::Gelu, Activation::Tanh, Activation::Sigmoid, Activation::Relu] {
            for i in -40..=40 {
                let v = i as f64 * 0.137;
                assert_eq!(act.apply(v).to_bits(), act.derivs(v)[0].to_bits());
            }
        }
    }

    #[test]
    fn parse_and_tag_round_trip() {
        for act in [
            Activation::Gelu,
            Activation::Tanh,
            Activation::Sigmoid,
            Activation::Relu,
        ] {
            assert_eq!(act.name().parse::<Activation>().unwrap(), act);
            assert_eq!(Activation::from_tag(act.tag()), Some(act));
        }
        assert!("swish".parse::<Activation>().is_err());
    }
}
