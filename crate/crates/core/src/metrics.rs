//! Ecosystem metrics computed from a strategy grid.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Density, MarginalSummary, QuantileRule, StrategyGrid, Variable};

/// Proportion of published findings that are correct.
///
/// Uses published true positives over published positives when negative
/// results are never published, and the general form (correct published
/// findings over all published findings) otherwise.
pub fn reliability(grid: &StrategyGrid) -> Result<f64> {
    if grid.config().b_const > 0.0 {
        reliability_general(grid)
    } else {
        reliability_positive(grid)
    }
}

/// `E_ATM[q11P] / E_ATM[q+1P]`.
pub fn reliability_positive(grid: &StrategyGrid) -> Result<f64> {
    let num = grid.expectation(Density::Atm, |c| c.q.q11P)?;
    let den = grid.expectation(Density::Atm, |c| c.q.q_p1P())?;
    ratio("REL", num, den, "no published positives")
}

/// `E_ATM[q00P + q11P] / E_ATM[q++P]`.
pub fn reliability_general(grid: &StrategyGrid) -> Result<f64> {
    let num = grid.expectation(Density::Atm, |c| c.q.q00P + c.q.q11P)?;
    let den = grid.expectation(Density::Atm, |c| c.q.q_ppP())?;
    ratio("REL", num, den, "nothing is published")
}

fn ratio(metric: &'static str, num: f64, den: f64, why: &str) -> Result<f64> {
    if den > 0.0 {
        Ok(num / den)
    } else {
        Err(Error::UndefinedMetric {
            metric,
            reason: why.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyCounts {
    pub n_atm: f64,
    pub n_pub: f64,
    pub pr: f64,
}

/// Expected attempted and published studies at the configured resources.
pub fn study_counts(grid: &StrategyGrid) -> Result<StudyCounts> {
    let k = grid.config().k;
    let t = grid.config().t;
    let atm = grid.expectation(Density::Res, |c| 1.0 / (k + c.n))?;
    let publ = grid.expectation(Density::Res, |c| c.q.q_ppP() / (k + c.n))?;
    Ok(StudyCounts {
        n_atm: t * atm,
        n_pub: t * publ,
        pr: publ / atm,
    })
}

/// Share of true positives that go unpublished.
pub fn silenced_tp_rate(grid: &StrategyGrid) -> Result<f64> {
    let num = grid.expectation(Density::Atm, |c| c.q.q11U)?;
    let den = grid.expectation(Density::Atm, |c| c.q.q_11p())?;
    ratio("STPR", num, den, "no true positives")
}

/// Expected published true positives with psp below the breakthrough
/// cutoff, at the configured resources. Each cell contributes the share of
/// its psp extent that lies below the cutoff.
pub fn breakthrough_discoveries(grid: &StrategyGrid) -> Result<f64> {
    let cfg = grid.config();
    let (k, cut) = (cfg.k, cfg.dscv_threshold);
    let per_unit = grid.expectation(Density::Res, |c| {
        c.fraction_below(cut) * c.q.q11P / (k + c.n)
    })?;
    Ok(cfg.t * per_unit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rel: f64,
    pub n_atm: f64,
    pub n_pub: f64,
    pub pr: f64,
    pub stpr: f64,
    pub dscv: f64,
    pub psp_atm: MarginalSummary,
    pub psp_pub: MarginalSummary,
    pub pwr_atm: MarginalSummary,
    pub pwr_pub: MarginalSummary,
}

impl MetricsReport {
    pub fn compute(grid: &StrategyGrid) -> Result<Self> {
        Self::compute_with(grid, QuantileRule::Interpolated)
    }

    pub fn compute_with(grid: &StrategyGrid, rule: QuantileRule) -> Result<Self> {
        let counts = study_counts(grid)?;
        let summary = |v, d| grid.marginal_summary(v, d, rule);
        Ok(MetricsReport {
            rel: reliability(grid)?,
            n_atm: counts.n_atm,
            n_pub: counts.n_pub,
            pr: counts.pr,
            stpr: silenced_tp_rate(grid)?,
            dscv: breakthrough_discoveries(grid)?,
            psp_atm: summary(Variable::Psp, Density::Atm),
            psp_pub: summary(Variable::Psp, Density::Pub),
            pwr_atm: summary(Variable::Pwr, Density::Atm),
            pwr_pub: summary(Variable::Pwr, Density::Pub),
        })
    }

    /// Column names of [`MetricsReport::values`], in order.
    pub fn columns() -> Vec<String> {
        let mut cols: Vec<String> = ["rel", "n_atm", "n_pub", "pr", "stpr", "dscv"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for var in ["psp", "pwr"] {
            for dens in ["atm", "pub"] {
                for stat in ["mean", "median", "q25", "q75"] {
                    cols.push(format!("{var}_{stat}_{dens}"));
                }
            }
        }
        cols
    }

    /// Flat values matching [`MetricsReport::columns`].
    pub fn values(&self) -> Vec<f64> {
        let mut v = vec![
            self.rel, self.n_atm, self.n_pub, self.pr, self.stpr, self.dscv,
        ];
        for s in [&self.psp_atm, &self.psp_pub, &self.pwr_atm, &self.pwr_pub] {
            v.extend([s.mean, s.median, s.q25, s.q75]);
        }
        v
    }
}

/// A raw pair and its ratio; the ratio is `None` when the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioCell {
    pub a: f64,
    pub b: f64,
    pub ratio: Option<f64>,
}

impl RatioCell {
    pub fn new(a: f64, b: f64) -> Self {
        let ratio = if b != 0.0 { Some(a / b) } else { None };
        RatioCell { a, b, ratio }
    }
}

impl fmt::Display for RatioCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ratio {
            Some(r) => write!(f, "{:.3} : {:.3} = {:.2}", self.a, self.b, r),
            None => write!(f, "{:.3} : {:.3} = undefined", self.a, self.b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub pr: RatioCell,
    pub rel: RatioCell,
    pub dscv: RatioCell,
}

/// PR, REL and DSCV of `a` relative to `b`.
pub fn compare(a: &MetricsReport, b: &MetricsReport) -> Comparison {
    Comparison {
        pr: RatioCell::new(a.pr, b.pr),
        rel: RatioCell::new(a.rel, b.rel),
        dscv: RatioCell::new(a.dscv, b.dscv),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_cell_formats() {
        assert_eq!(
            RatioCell::new(0.086, 0.082).to_string(),
            "0.086 : 0.082 = 1.05"
        );
        assert_eq!(
            RatioCell::new(0.1, 0.0).to_string(),
            "0.100 : 0.000 = undefined"
        );
    }

    #[test]
    fn columns_match_values() {
        assert_eq!(MetricsReport::columns().len(), 22);
        assert!(MetricsReport::columns().contains(&"psp_q25_atm".to_string()));
    }
}
