//! Robust linear least squares built on soft truncation of loss differences.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! side: the data model and OLS/ridge baselines, the truncation functions and
//! the robust mean built from them, the min-max truncated estimator, a
//! quadrature realization of the truncated Gibbs posterior, the synthetic
//! benchmark generators with exact excess risk, and plug-in estimates of the
//! moment constants that drive the risk bound. File formats, the Monte Carlo
//! driver and the CLI live in the `trunc-regress-bench` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod linalg;
mod math;

pub mod diagnostics;
pub mod gibbs;
pub mod lin;
pub mod minmax;
pub mod synth;
pub mod trunc;

pub use error::{Error, Result};
pub use lin::{
    effective_dimension, empirical_gram, solve_ols, solve_ridge, Dataset, GramInfo, ParamVector,
};
pub use minmax::{alpha_grid, criterion_d, fit, iterate, EstimatorResult, MinMaxConfig};
pub use trunc::{catoni_lambda, catoni_mean, psi, soft_trunc, TruncationParams};
