//! Power of the equal-allocation two-sample t-test and its inverse.

use serde::{Deserialize, Serialize};

use super::noncentral_t::{noncentral_t_cdf, t_upper_quantile};
use crate::error::{Error, Result};

/// Smallest total sample size considered: two observations per group.
pub const MIN_TOTAL_N: f64 = 4.0;
/// Upper end of the sample-size search bracket.
pub const MAX_TOTAL_N: f64 = 1e8;

/// Effect size, observation noise and two-sided significance level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestSpec {
    pub delta: f64,
    pub sigma: f64,
    pub alpha: f64,
}

impl TestSpec {
    pub fn new(delta: f64, sigma: f64, alpha: f64) -> Result<Self> {
        let spec = TestSpec {
            delta,
            sigma,
            alpha,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::domain(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::domain(format!(
                "delta must be >= 0, got {}",
                self.delta
            )));
        }
        Ok(())
    }

    /// Noncentrality of the t statistic at total sample size `n` split
    /// evenly between the two groups: `delta / (sigma * sqrt(4 / n))`.
    pub fn noncentrality(&self, n: f64) -> f64 {
        self.delta * n.sqrt() / (2.0 * self.sigma)
    }
}

/// Probability that the two-sided test rejects at total sample size `n`
/// (real-valued; `df = n - 2`).
pub fn prob_positive(n: f64, spec: &TestSpec) -> Result<f64> {
    spec.validate()?;
    if !(n > 2.0) || !n.is_finite() {
        return Err(Error::domain(format!(
            "total sample size must exceed 2, got {n}"
        )));
    }
    let df = n - 2.0;
    let ncp = spec.noncentrality(n);
    let t_crit = t_upper_quantile(0.5 * spec.alpha, df)?;
    let upper = 1.0 - noncentral_t_cdf(t_crit, df, ncp)?;
    let lower = noncentral_t_cdf(-t_crit, df, ncp)?;
    Ok(upper + lower)
}

/// Total sample size at which the test reaches power `pwr`.
///
/// Fails with [`Error::UnattainablePower`] when `pwr` lies below the power at
/// [`MIN_TOTAL_N`] or is not below 1.
pub fn sample_size_for_power(pwr: f64, spec: &TestSpec) -> Result<f64> {
    spec.validate()?;
    if !(spec.delta > 0.0) {
        return Err(Error::domain("power cannot be tuned when delta = 0"));
    }
    let floor = prob_positive(MIN_TOTAL_N, spec)?;
    if !(pwr >= floor && pwr < 1.0) {
        return Err(Error::UnattainablePower {
            requested: pwr,
            min: floor,
        });
    }
    if pwr == floor {
        return Ok(MIN_TOTAL_N);
    }

    let mut lo = MIN_TOTAL_N;
    let mut hi = 2.0 * MIN_TOTAL_N;
    while prob_positive(hi, spec)? < pwr {
        lo = hi;
        hi *= 2.0;
        if hi > MAX_TOTAL_N {
            return Err(Error::UnattainablePower {
                requested: pwr,
                min: floor,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if prob_positive(mid, spec)? < pwr {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
