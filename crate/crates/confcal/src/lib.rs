//! Conformal calibration of predictive systems.
//!
//! A predictive system maps a training sequence and a test object to a
//! CDF-like function of the label. This crate wraps any such system in a
//! conformal calibrator whose randomized output is calibrated in probability
//! regardless of how poor the base system is: split ([`calibrate::scps_grid`],
//! [`calibrate::scps_exact`]), cross ([`calibrate::ccps_evaluate`]) or ideal
//! ([`calibrate::icps_evaluate`]). Supporting modules
//! provide ready-made base systems ([`predictors`]), CRPS scoring and
//! uniformity diagnostics ([`evaluate`]), and seeded toy-data generation
//! ([`datagen`]).

// Validation deliberately writes `!(x > 0.0)` so NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibrate;
pub mod datagen;
pub mod error;
pub mod evaluate;
pub mod numeric;
pub mod predictors;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    ConditionalDistribution, DistributionEvaluation, FnSystem, LabeledSequence, Observation,
    PredictiveSystem, TauInterval,
};
