//! Numerics for the log-Gamma directed polymer: special functions, the
//! large-deviation rate function, Fredholm determinants by Nyström
//! quadrature, and Monte Carlo simulation of the polymer and its
//! zero-temperature limit.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod error;
pub mod fredholm;
pub mod linalg;
pub mod phase;
pub mod polymer;
pub mod quadrature;
pub mod rate;
pub mod special_fn;

pub use error::{Error, Result};
pub use fredholm::{ContourSpec, DetResult, NystromGrid};
pub use phase::{PhaseParams, SignGrid};
pub use polymer::{SimConfig, SimSummary};
pub use rate::{QuadratureSpec, RateQuery, RateResult};
pub use special_fn::ComplexValue;
