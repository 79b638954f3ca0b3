//! Exact two-sample t-test machinery.

pub mod beta;
pub mod noncentral_t;
pub mod power;

pub use noncentral_t::{central_t_cdf, noncentral_t_cdf, normal_cdf, t_upper_quantile};
pub use power::{prob_positive, sample_size_for_power, TestSpec, MAX_TOTAL_N, MIN_TOTAL_N};
