//! Exact input derivatives through forward jets and parameter gradients
//! through a reverse-mode tape.

mod check;
mod jet;
mod scalar;
mod tape;

pub use check::{derivative_check, relative_gap, DerivativeReport, JetFunction, RELATIVE_FLOOR};
pub use jet::{jet_seed, Jet4};
pub use scalar::{normal_cdf, normal_pdf, Scalar, Unary, UnaryFn};
pub use tape::{Gradients, OpTag, Tape, TapeNode, Var};
