//! Concentration bounds in transformed coordinates.
//!
//! The crate computes closed-form sub-Gaussian tail bounds for statistics of
//! bounded random variables in a user-chosen coordinate system (identity,
//! log, Box-Cox, logit, data-driven Gaussianizer, ...), selects the
//! coordinate that concentrates a sample best, measures distances between
//! empirical distributions in transformed coordinates, and verifies every
//! bound against seeded Monte Carlo simulation.
//!
//! Module map:
//! - [`diffeo`]: the transform family, its calculus, and `gaussianize`
//! - [`bounds`]: Hoeffding-type constants and tail bounds per coordinate
//! - [`optimize`]: concentration functional and transform-grid selection
//! - [`transport`]: exact 1-D Wasserstein distances in transformed coordinates
//! - [`montecarlo`]: seeded samplers and bound-domination checks
//! - [`apps`]: log-linear regression, portfolio bound, geometric-mean
//!   covariance, transformed median
//! - [`measure`], [`special`], [`rng`]: supporting machinery

pub mod apps;
pub mod bounds;
pub mod diffeo;
pub mod error;
mod linalg;
pub mod measure;
pub mod montecarlo;
pub mod optimize;
pub mod rng;
pub mod special;
pub mod transport;

pub use diffeo::{gaussianize, CoordinateTransform, SupportInterval};
pub use error::{Error, Result};
pub use measure::EmpiricalMeasure;
