//! Shrinkage and equal-weights regression.
//!
//! The crate covers least squares ([`linear`]), single-predictor slope
//! shrinkage ([`shrinkage`]), elastic-net coordinate descent with penalty
//! factors ([`penalized`]), the sum-score / deviation-score design that turns
//! shrinkage toward zero into shrinkage toward a common weight
//! ([`equal_weights`]), K-fold cross-validation with the minimum and
//! one-standard-error rules ([`selection`]), classical composite weighting
//! schemes ([`weighting`]), and a classical-test-theory simulation of how
//! test reliability interacts with cross-validated shrinkage
//! ([`simulation`]). [`report`] writes the tidy CSV outputs.

pub mod dataset;
pub mod equal_weights;
pub mod error;
pub mod linear;
pub mod penalized;
pub mod report;
pub mod selection;
pub mod shrinkage;
pub mod simulation;
pub mod weighting;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use linear::{evaluate, fit_ols, predict, LinearFit, PredictionMetrics};
pub use penalized::{
    fit_path, fit_penalized, kkt_check, lambda_max, soft_threshold, CoefficientPath, KktReport, LambdaGrid,
    PenaltySpec,
};
pub use shrinkage::{ShrinkageFactor, SlopeSamplingModel};
