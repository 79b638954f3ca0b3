//! Publication-policy ecosystems and per-study outcome probabilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{prob_positive, TestSpec, MIN_TOTAL_N};

/// One complete policy world.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EcosystemConfig {
    /// Two-sided significance threshold.
    pub alpha: f64,
    /// Fixed cost per study, in observations.
    pub k: f64,
    /// Novelty exponent in `A = (1 - psp)^m`.
    pub m: f64,
    /// Total resources, in observations.
    #[serde(rename = "T")]
    pub t: f64,
    pub delta: f64,
    pub sigma: f64,
    /// Probability of publishing a negative result.
    #[serde(rename = "b")]
    pub b_const: f64,
    /// Sample-size requirement on positive results.
    pub ssr: bool,
    pub c50: f64,
    pub c95: f64,
    /// Breakthroughs are true positives with psp below this cutoff.
    pub dscv_threshold: f64,
    /// Lowest power a researcher may choose (besides alpha and the n = 4 floor).
    pub pwr_floor: f64,
    /// Highest power on the strategy grid.
    pub pwr_cap: f64,
    /// Lowest psp on the strategy grid.
    pub psp_min: f64,
}

impl Default for EcosystemConfig {
    fn default() -> Self {
        EcosystemConfig {
            alpha: 0.05,
            k: 100.0,
            m: 1.0,
            t: 100_000.0,
            delta: 0.21,
            sigma: 1.0,
            b_const: 0.0,
            ssr: false,
            c50: 0.5,
            c95: 0.8,
            dscv_threshold: 0.05,
            pwr_floor: 0.05,
            pwr_cap: 0.995,
            psp_min: 0.0,
        }
    }
}

fn in_open_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

impl EcosystemConfig {
    pub fn new(alpha: f64, k: f64, m: f64, ssr: bool) -> Self {
        EcosystemConfig {
            alpha,
            k,
            m,
            ssr,
            ..Default::default()
        }
    }

    pub fn test_spec(&self) -> TestSpec {
        TestSpec {
            delta: self.delta,
            sigma: self.sigma,
            alpha: self.alpha,
        }
    }

    /// Checks every invariant; the message names the offending field.
    pub fn validate(&self) -> Result<()> {
        let bad =
            |field: &str, why: &str, v: f64| Err(Error::config(format!("{field} {why}, got {v}")));
        if !in_open_unit(self.alpha) {
            return bad("alpha", "must lie in (0,1)", self.alpha);
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad("k", "must be positive", self.k);
        }
        if !(self.m >= 0.0 && self.m.is_finite()) {
            return bad("m", "must be >= 0", self.m);
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return bad("T", "must be positive", self.t);
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad("delta", "must be positive", self.delta);
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("sigma", "must be positive", self.sigma);
        }
        if !(0.0..=1.0).contains(&self.b_const) {
            return bad("b", "must lie in [0,1]", self.b_const);
        }
        if !in_open_unit(self.c50) {
            return bad("c50", "must lie in (0,1)", self.c50);
        }
        if !(in_open_unit(self.c95) && self.c95 > self.c50) {
            return bad("c95", "must lie in (c50,1)", self.c95);
        }
        if !(0.0..1.0).contains(&self.dscv_threshold) {
            return bad("dscv_threshold", "must lie in [0,1)", self.dscv_threshold);
        }
        if !(0.0..1.0).contains(&self.pwr_floor) {
            return bad("pwr_floor", "must lie in [0,1)", self.pwr_floor);
        }
        if !in_open_unit(self.pwr_cap) {
            return bad("pwr_cap", "must lie in (0,1)", self.pwr_cap);
        }
        if !(0.0..1.0).contains(&self.psp_min) {
            return bad("psp_min", "must lie in [0,1)", self.psp_min);
        }
        Ok(())
    }
}

/// A research strategy: pre-study probability and power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub psp: f64,
    pub pwr: f64,
}

impl Strategy {
    pub fn new(psp: f64, pwr: f64, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&psp) {
            return Err(Error::domain(format!("psp must lie in [0,1], got {psp}")));
        }
        if !(pwr >= alpha && pwr < 1.0) {
            return Err(Error::domain(format!(
                "pwr must lie in [alpha,1) = [{alpha},1), got {pwr}"
            )));
        }
        Ok(Strategy { psp, pwr })
    }
}

/// Probability of publishing a positive result.
pub fn pub_prob_positive(s: Strategy, cfg: &EcosystemConfig) -> f64 {
    let a = (1.0 - s.psp).powf(cfg.m);
    if cfg.ssr {
        a * ssr_multiplier(s.pwr, cfg.c50, cfg.c95)
    } else {
        a
    }
}

/// Logistic penalty on low power: 0.5 at `c50`, 0.95 at `c95`.
pub fn ssr_multiplier(pwr: f64, c50: f64, c95: f64) -> f64 {
    1.0 / (1.0 + (-(19f64).ln() * (pwr - c50) / (c95 - c50)).exp())
}

/// Probability of publishing a negative result.
pub fn pub_prob_negative(_s: Strategy, cfg: &EcosystemConfig) -> f64 {
    cfg.b_const
}

/// Per-study probabilities of (truth, finding, publication status).
///
/// Field names read `q{truth}{finding}{P|U}`: `q10U` is a true effect, a
/// negative finding, unpublished.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct CategoryProbs {
    pub q11P: f64,
    pub q11U: f64,
    pub q10P: f64,
    pub q10U: f64,
    pub q01P: f64,
    pub q01U: f64,
    pub q00P: f64,
    pub q00U: f64,
}

/// Category labels in field order.
pub const CATEGORY_LABELS: [&str; 8] = ["11P", "11U", "10P", "10U", "01P", "01U", "00P", "00U"];

#[allow(non_snake_case)]
impl CategoryProbs {
    /// `a` and `b` are the publication probabilities of positive and
    /// negative results; the false-positive rate is `alpha` exactly.
    pub fn from_rates(psp: f64, pwr: f64, alpha: f64, a: f64, b: f64) -> Self {
        let t = psp;
        let f = 1.0 - psp;
        CategoryProbs {
            q11P: t * a * pwr,
            q11U: t * (1.0 - a) * pwr,
            q10P: t * b * (1.0 - pwr),
            q10U: t * (1.0 - b) * (1.0 - pwr),
            q01P: f * a * alpha,
            q01U: f * (1.0 - a) * alpha,
            q00P: f * b * (1.0 - alpha),
            q00U: f * (1.0 - b) * (1.0 - alpha),
        }
    }

    pub fn as_array(&self) -> [f64; 8] {
        [
            self.q11P, self.q11U, self.q10P, self.q10U, self.q01P, self.q01U, self.q00P, self.q00U,
        ]
    }

    pub fn total(&self) -> f64 {
        self.as_array().iter().sum()
    }

    /// Published positives, true or false.
    pub fn q_p1P(&self) -> f64 {
        self.q11P + self.q01P
    }

    /// Everything published.
    pub fn q_ppP(&self) -> f64 {
        self.q11P + self.q10P + self.q01P + self.q00P
    }

    /// True positives, published or not.
    pub fn q_11p(&self) -> f64 {
        self.q11P + self.q11U
    }
}

/// The eight outcome probabilities for a strategy.
///
/// Fails when `s.pwr` is below the power reachable with the smallest
/// allowed sample.
pub fn category_probs(s: Strategy, cfg: &EcosystemConfig) -> Result<CategoryProbs> {
    let spec = cfg.test_spec();
    let min = prob_positive(MIN_TOTAL_N, &spec)?;
    if !(s.pwr >= min && s.pwr < 1.0) {
        return Err(Error::UnattainablePower {
            requested: s.pwr,
            min,
        });
    }
    Ok(CategoryProbs::from_rates(
        s.psp,
        s.pwr,
        cfg.alpha,
        pub_prob_positive(s, cfg),
        pub_prob_negative(s, cfg),
    ))
}
