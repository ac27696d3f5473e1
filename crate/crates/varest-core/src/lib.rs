//! Estimation of a finite population variance from a simple random sample,
//! with and without auxiliary information.
//!
//! The crate covers the classical estimator families built on a known
//! auxiliary variance: Isaki's ratio and regression estimators, the
//! Kadilar–Cingi shifted-ratio family and their weighted combination, the
//! Gupta–Shabbir hybrid class, and a generalized two-weight power class.
//! For each family it provides the point estimator, the first-order
//! (Taylor) mean squared error, closed-form optimal weights, an exact
//! design-based MSE oracle by exhaustive subset enumeration, and a
//! deterministic replicated-sampling harness for empirical validation.
//!
//! The crate is `no_std` (with `alloc`); file formats, parallel drivers and
//! the command line front end live in the companion `varest` crate.

#![no_std]

extern crate alloc;

mod error;
mod math;
#[cfg(test)]
mod testutil;

pub mod estimators;
pub mod montecarlo;
pub mod mse;
pub mod population;
pub mod sampling;
pub mod tuning;

pub use error::{Error, Result};
pub use estimators::{EstimatorSpec, SpecRequest, TClassSpec};
pub use mse::{MseFormulaVariant, MseReport};
pub use population::{theta, BivariatePopulation, PopulationParams};
pub use sampling::{Sample, SampleStats};
