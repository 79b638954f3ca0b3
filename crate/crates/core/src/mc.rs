//! Stochastic replication of an ecosystem, used to cross-check the
//! analytic metrics.
//!
//! Researchers spend resources according to the researcher density, so
//! individual studies arrive proportionally to the attempted-study density.
//! Each study draws its cell, pays `k + n`, then draws truth, finding and
//! publication. Sampling stops at the first study whose full cost no longer
//! fits the budget.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::ecosystem::{pub_prob_negative, pub_prob_positive};
use crate::error::{Error, Result};
use crate::grid::{Density, StrategyGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Total resources across all replicas, in observations.
    pub resources: f64,
    /// Independent streams, run in parallel. The budget is split evenly.
    pub replicas: usize,
    /// Retain one record per study.
    pub keep_log: bool,
}

impl SimOptions {
    /// Budget that buys `studies` studies in expectation.
    pub fn for_studies(grid: &StrategyGrid, studies: u64, replicas: usize) -> Result<Self> {
        let k = grid.config().k;
        let per_unit = grid.expectation(Density::Res, |c| 1.0 / (k + c.n))?;
        Ok(SimOptions {
            resources: studies as f64 / per_unit,
            replicas,
            keep_log: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub psp: f64,
    pub pwr: f64,
    pub n: f64,
    pub truth: bool,
    pub finding: bool,
    pub published: bool,
}

/// Raw counts of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    /// Study counts in the order of [`crate::ecosystem::CATEGORY_LABELS`].
    pub counts: [u64; 8],
    pub studies: u64,
    pub resources_spent: f64,
    /// Sum over published true positives of the cell share below the
    /// breakthrough cutoff, and the sum of its squares.
    pub breakthrough_mass: f64,
    pub breakthrough_mass_sq: f64,
    pub log: Vec<StudyRecord>,
}

impl SimOutcome {
    fn empty() -> Self {
        SimOutcome {
            counts: [0; 8],
            studies: 0,
            resources_spent: 0.0,
            breakthrough_mass: 0.0,
            breakthrough_mass_sq: 0.0,
            log: Vec::new(),
        }
    }

    fn merge(mut self, other: SimOutcome) -> Self {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.studies += other.studies;
        self.resources_spent += other.resources_spent;
        self.breakthrough_mass += other.breakthrough_mass;
        self.breakthrough_mass_sq += other.breakthrough_mass_sq;
        self.log.extend(other.log);
        self
    }

    pub fn published(&self) -> u64 {
        self.counts[0] + self.counts[2] + self.counts[4] + self.counts[6]
    }
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    fn proportion(hits: u64, trials: u64, metric: &'static str) -> Result<Self> {
        if trials == 0 {
            return Err(Error::UndefinedMetric {
                metric,
                reason: "no simulated studies in the denominator".into(),
            });
        }
        let p = hits as f64 / trials as f64;
        Ok(Estimate {
            value: p,
            se: (p * (1.0 - p) / trials as f64).sqrt(),
        })
    }

    /// `(estimate - reference) / se`; infinite when the estimate is exact
    /// but disagrees.
    pub fn z_score(&self, reference: f64) -> f64 {
        let d = self.value - reference;
        if d == 0.0 {
            0.0
        } else {
            d / self.se
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub outcome: SimOutcome,
    pub resources: f64,
    pub rel: Estimate,
    pub pr: Estimate,
    pub stpr: Estimate,
    /// Scaled to the configured resources `T`.
    pub n_atm: Estimate,
    pub n_pub: Estimate,
    pub dscv: Estimate,
}

/// Runs `opts.replicas` seeded streams and pools them.
pub fn simulate(grid: &StrategyGrid, opts: &SimOptions, seed: u64) -> Result<SimReport> {
    if !(opts.resources > 0.0 && opts.resources.is_finite()) || opts.replicas == 0 {
        return Err(Error::config(
            "simulation needs positive resources and at least one replica",
        ));
    }
    let picker = WeightedIndex::new(grid.weights(Density::Atm))
        .map_err(|e| Error::config(format!("attempted-study density cannot be sampled: {e}")))?;
    let budget = opts.resources / opts.replicas as f64;
    let outcome = (0..opts.replicas)
        .into_par_iter()
        .map(|r| run_replica(grid, &picker, budget, seed, r as u64, opts.keep_log))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(SimOutcome::empty(), SimOutcome::merge);
    estimate(grid, outcome, opts.resources)
}

fn run_replica(
    grid: &StrategyGrid,
    picker: &WeightedIndex<f64>,
    budget: f64,
    seed: u64,
    stream: u64,
    keep_log: bool,
) -> SimOutcome {
    let cfg = grid.config();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut out = SimOutcome::empty();
    loop {
        let cell = grid.cell(picker.sample(&mut rng));
        let cost = cfg.k + cell.n;
        if out.resources_spent + cost > budget {
            break;
        }
        out.resources_spent += cost;
        out.studies += 1;

        let s = cell.strategy;
        let truth = rng.random_bool(s.psp);
        let finding = rng.random_bool(if truth { s.pwr } else { cfg.alpha });
        let p_pub = if finding {
            pub_prob_positive(s, cfg)
        } else {
            pub_prob_negative(s, cfg)
        };
        let published = rng.random_bool(p_pub);
        let idx = usize::from(!truth) * 4 + usize::from(!finding) * 2 + usize::from(!published);
        out.counts[idx] += 1;
        if truth && finding && published {
            let f = cell.fraction_below(cfg.dscv_threshold);
            out.breakthrough_mass += f;
            out.breakthrough_mass_sq += f * f;
        }
        if keep_log {
            out.log.push(StudyRecord {
                psp: s.psp,
                pwr: s.pwr,
                n: cell.n,
                truth,
                finding,
                published,
            });
        }
    }
    out
}

fn estimate(grid: &StrategyGrid, outcome: SimOutcome, resources: f64) -> Result<SimReport> {
    let c = &outcome.counts;
    let rel = if grid.config().b_const > 0.0 {
        Estimate::proportion(c[0] + c[6], outcome.published(), "REL")?
    } else {
        Estimate::proportion(c[0], c[0] + c[4], "REL")?
    };
    let pr = Estimate::proportion(outcome.published(), outcome.studies, "PR")?;
    let stpr = Estimate::proportion(c[1], c[0] + c[1], "STPR")?;
    let scale = grid.config().t / resources;
    let count = |x: f64| Estimate {
        value: x * scale,
        se: x.sqrt() * scale,
    };
    let n_atm = count(outcome.studies as f64);
    let n_pub = count(outcome.published() as f64);
    let dscv = Estimate {
        value: outcome.breakthrough_mass * scale,
        se: outcome.breakthrough_mass_sq.sqrt() * scale,
    };
    Ok(SimReport {
        outcome,
        resources,
        rel,
        pr,
        stpr,
        n_atm,
        n_pub,
        dscv,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson chi-square of the simulated category counts against the
/// attempted-study expectations, over categories with nonzero probability.
pub fn category_gof(grid: &StrategyGrid, outcome: &SimOutcome) -> Result<GoodnessOfFit> {
    let mut expected = [0.0; 8];
    for (c, e) in expected.iter_mut().enumerate() {
        *e = grid.expectation(Density::Atm, |cell| cell.q.as_array()[c])?;
    }
    let n = outcome.studies as f64;
    let mut statistic = 0.0;
    let mut used = 0usize;
    for (e, &o) in expected.iter().zip(&outcome.counts) {
        if *e > 0.0 {
            let exp = e * n;
            statistic += (o as f64 - exp).powi(2) / exp;
            used += 1;
        } else if o > 0 {
            return Err(Error::domain("simulated a category with zero probability"));
        }
    }
    if used < 2 {
        return Err(Error::domain(
            "chi-square needs at least two possible categories",
        ));
    }
    let df = used - 1;
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::domain(e.to_string()))?;
    Ok(GoodnessOfFit {
        statistic,
        df,
        p_value: 1.0 - dist.cdf(statistic),
    })
}
