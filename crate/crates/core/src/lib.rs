//! Optimal sample-size strategies under publication-policy ecosystems.
//!
//! A researcher picks a pre-study probability `psp` and a power `pwr`; the
//! power fixes the sample size `n` of a two-sample t-test, each study costs
//! `k + n`, and a journal policy decides which results get published.
//! [`grid`] turns this into densities over strategies, [`metrics`] reduces
//! them to ecosystem-level numbers and [`mc`] checks those numbers by
//! simulation.

pub mod ecosystem;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod mc;
pub mod metrics;
pub mod presets;

pub use ecosystem::{
    category_probs, pub_prob_negative, pub_prob_positive, CategoryProbs, EcosystemConfig, Strategy,
};
pub use error::{Error, Result};
pub use grid::{
    build_grid, Density, GridSpec, MarginalSummary, QuantileRule, StrategyGrid, Variable,
};
pub use kernel::{noncentral_t_cdf, prob_positive, sample_size_for_power, TestSpec};
pub use metrics::{compare, Comparison, MetricsReport};
