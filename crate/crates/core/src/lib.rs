//! Physics-informed neural networks for one-dimensional nonlinear
//! reaction-diffusion equations.

pub mod autodiff;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod eval;
pub mod nn;
pub mod pde;
pub mod pipeline;
pub mod rng;
pub mod sampling;
pub mod training;

pub use error::{CheckpointError, PinnError, Result};
