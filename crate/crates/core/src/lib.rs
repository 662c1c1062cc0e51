//! Verification of possibilistic categorical forecasts.
//!
//! A forecast assigns each ordered category a possibility in `[0, 1]`; the
//! largest value is the forecaster's commitment and its shortfall from one is
//! explicit ignorance. This crate scores such forecasts directly, converts
//! them into probabilities for log-score verification, reduces them to
//! categorical calls, and builds diagnostics and two-version comparisons.
//!
//! Heavy per-record loops use rayon when the `parallel` feature is on
//! (default). Every such entry point takes an [`Execution`] so the sequential
//! path stays available and produces identical results.

pub mod bridge;
pub mod categorical;
pub mod compare;
pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod possibility;
pub mod scorecard;
pub mod synthgen;
pub mod universe;

pub use bridge::{
    convert, decompose, information_gain, surprise, Decomposition, ProbabilityVector,
};
pub use categorical::{peak_category, CategoricalScores, ConfusionMatrix, ContingencyTable};
pub use compare::{compare, CompareSettings, ComparisonReport, Metric, Orientation};
pub use error::{Error, Result};
pub use exec::Execution;
pub use possibility::{EventSet, NormalisedForecast, PossibilityForecast};
pub use scorecard::{aggregate, score_all, ScorecardAggregate, ScorecardRow, VerificationPair};
pub use synthgen::{generate, SynthConfig, SynthSample};
pub use universe::Universe;
