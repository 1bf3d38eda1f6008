//! Covert communication through a fluid reconfigurable intelligent surface.
//!
//! The crate pairs closed-form covertness and reliability metrics with a
//! Monte Carlo simulator of the underlying correlated-fading channel:
//!
//! - [`specfun`]: `J0`, `ln Γ` and the regularized incomplete gamma function.
//! - [`surface`]: port grid geometry, Jakes correlation and its square root.
//! - [`analytics`]: Gamma moment matching, detector error probabilities,
//!   covertness outage, outage and success probabilities.
//! - [`channel`]: fading draws, fluid port selection, phase configuration and
//!   the fixed-position baseline.
//! - [`montecarlo`]: seeded parallel trials, estimators with confidence
//!   intervals, empirical CDFs and KS distances.
//! - [`config`], [`sweep`], [`output`], [`plot`], [`recipes`]: configuration
//!   files, parameter sweeps and CSV/SVG emission.
//! - [`validation`]: closed-form versus simulation checks.

pub mod analytics;
pub mod channel;
pub mod config;
pub mod error;
pub mod montecarlo;
pub mod output;
pub mod plot;
pub mod recipes;
pub mod specfun;
pub mod surface;
pub mod sweep;
pub mod validation;

pub use error::{Error, Result};
