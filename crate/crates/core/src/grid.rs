//! Discretized strategy space and the three strategy densities.
//!
//! Cells are midpoint cells of a psp x pwr rectangle. With `N(psp, pwr)`
//! the expected number of publications of a researcher who commits all
//! resources to one strategy,
//!
//! ```text
//! w_res ~ q_ppP / (k + n)        researchers
//! w_atm ~ w_res / (k + n)        attempted studies
//! w_pub ~ q_ppP * w_atm          published studies
//! ```
//!
//! each normalized to sum to one over the grid.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ecosystem::{
    pub_prob_negative, pub_prob_positive, CategoryProbs, EcosystemConfig, Strategy,
};
use crate::error::{Error, Result};
use crate::kernel::{prob_positive, sample_size_for_power, TestSpec, MIN_TOTAL_N};

/// Default number of cells per axis.
pub const DEFAULT_RESOLUTION: usize = 512;
/// Smallest accepted number of cells per axis for uniform grids.
pub const MIN_RESOLUTION: usize = 16;

/// `count` equal cells covering `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || count == 0 {
            return Err(Error::config(format!(
                "degenerate axis [{lo}, {hi}] with {count} cells"
            )));
        }
        Ok(Axis { lo, hi, count })
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.count as f64
    }

    pub fn mid(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width()
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + i as f64 * w, self.lo + (i + 1) as f64 * w)
    }

    pub fn midpoints(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.mid(i)).collect()
    }
}

/// Lowest power on the grid: above alpha, above the configured floor, and
/// reachable with the smallest allowed sample.
pub fn pwr_lower_bound(cfg: &EcosystemConfig) -> Result<f64> {
    let p_min = prob_positive(MIN_TOTAL_N, &cfg.test_spec())?;
    Ok((cfg.alpha + 1e-3).max(cfg.pwr_floor).max(p_min))
}

/// Placement of the two axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub psp: Axis,
    pub pwr: Axis,
}

impl GridSpec {
    /// `resolution` x `resolution` cells over `[psp_min, 1] x [pwr_lower_bound, pwr_cap]`.
    pub fn uniform(cfg: &EcosystemConfig, resolution: usize) -> Result<Self> {
        cfg.validate()?;
        if resolution < MIN_RESOLUTION {
            return Err(Error::config(format!(
                "grid resolution must be at least {MIN_RESOLUTION}, got {resolution}"
            )));
        }
        let lo = pwr_lower_bound(cfg)?;
        if lo >= cfg.pwr_cap {
            return Err(Error::config(format!(
                "pwr range is empty: lower bound {lo} >= pwr_cap {}",
                cfg.pwr_cap
            )));
        }
        Ok(GridSpec {
            psp: Axis::new(cfg.psp_min, 1.0, resolution)?,
            pwr: Axis::new(lo, cfg.pwr_cap, resolution)?,
        })
    }

    /// Cells centred on the multiples of `step`: psp nodes in `[step, 1]`,
    /// pwr nodes at or above `pwr_floor`, strictly above both alpha and the
    /// smallest-sample power, and at most `pwr_cap`.
    pub fn lattice(cfg: &EcosystemConfig, step: f64) -> Result<Self> {
        cfg.validate()?;
        if !(step > 0.0 && step <= 0.1) {
            return Err(Error::config(format!(
                "lattice step must lie in (0, 0.1], got {step}"
            )));
        }
        const SLACK: f64 = 1e-9;
        let p_min = prob_positive(MIN_TOTAL_N, &cfg.test_spec())?;
        let strict = cfg.alpha.max(p_min);

        let psp_first = ((cfg.psp_min / step - SLACK).ceil() as i64).max(1);
        let psp_last = (1.0 / step + SLACK).floor() as i64;
        let pwr_first = ((cfg.pwr_floor / step - SLACK).ceil() as i64)
            .max((strict / step + SLACK).floor() as i64 + 1);
        let pwr_last = (cfg.pwr_cap / step + SLACK).floor() as i64;
        if pwr_first > pwr_last || psp_first > psp_last {
            return Err(Error::config("lattice has no admissible pwr or psp nodes"));
        }
        let axis = |first: i64, last: i64| {
            Axis::new(
                (first as f64 - 0.5) * step,
                (last as f64 + 0.5) * step,
                (last - first + 1) as usize,
            )
        };
        Ok(GridSpec {
            psp: axis(psp_first, psp_last)?,
            pwr: axis(pwr_first, pwr_last)?,
        })
    }
}

/// Which of the three densities to integrate against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Density {
    Res,
    Atm,
    Pub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variable {
    Psp,
    Pwr,
}

/// How a quantile is read off the cell-aggregated marginal CDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum QuantileRule {
    /// Linear interpolation of the CDF within the cell.
    #[default]
    Interpolated,
    /// Centre of the first cell whose cumulative mass reaches the level.
    CellCenter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalSummary {
    pub mean: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

/// Everything an integrand may look at in one cell.
#[derive(Debug, Clone, Copy)]
pub struct Cell<'a> {
    pub strategy: Strategy,
    pub q: &'a CategoryProbs,
    /// Sample size needed for the cell's power.
    pub n: f64,
    /// psp extent of the cell.
    pub psp_edges: (f64, f64),
}

impl Cell<'_> {
    /// Share of the cell's psp extent lying below `threshold`.
    pub fn fraction_below(&self, threshold: f64) -> f64 {
        let (lo, hi) = self.psp_edges;
        ((threshold - lo) / (hi - lo)).clamp(0.0, 1.0)
    }
}

/// One row of a grid dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct GridRow {
    pub psp: f64,
    pub pwr: f64,
    pub n: f64,
    /// Expected publications of a researcher spending all of `T` here.
    pub n_pub: f64,
    pub q11P: f64,
    pub q01P: f64,
    pub q_ppP: f64,
    pub w_res: f64,
    pub w_atm: f64,
    pub w_pub: f64,
}

/// A discretized strategy space with cached sample sizes, outcome
/// probabilities and normalized weights. Cell `(i, j)` (psp index `i`, pwr
/// index `j`) is stored at `i * pwr_count + j`.
#[derive(Debug, Clone)]
pub struct StrategyGrid {
    cfg: EcosystemConfig,
    spec: GridSpec,
    psp: Vec<f64>,
    pwr: Vec<f64>,
    n_of_pwr: Vec<f64>,
    q: Vec<CategoryProbs>,
    w_res: Vec<f64>,
    w_atm: Vec<f64>,
    w_pub: Vec<f64>,
}

type SizeKey = (u64, u64, u64, u64, u64, usize);

/// Sample sizes at the midpoints of `axis`, memoized for the process: the
/// inversion depends only on the test and the axis, which many ecosystems
/// share.
fn sample_sizes(test: &TestSpec, axis: &Axis) -> Result<Arc<Vec<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<SizeKey, Arc<Vec<f64>>>>> = OnceLock::new();
    let key = (
        test.delta.to_bits(),
        test.sigma.to_bits(),
        test.alpha.to_bits(),
        axis.lo.to_bits(),
        axis.hi.to_bits(),
        axis.count,
    );
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(Arc::clone(hit));
    }
    let sizes = Arc::new(
        axis.midpoints()
            .par_iter()
            .map(|&p| sample_size_for_power(p, test))
            .collect::<Result<Vec<_>>>()?,
    );
    cache.lock().unwrap().insert(key, Arc::clone(&sizes));
    Ok(sizes)
}

/// `resolution` x `resolution` midpoint grid for `cfg`.
pub fn build_grid(cfg: &EcosystemConfig, resolution: usize) -> Result<StrategyGrid> {
    StrategyGrid::build(cfg, GridSpec::uniform(cfg, resolution)?)
}

impl StrategyGrid {
    pub fn build(cfg: &EcosystemConfig, spec: GridSpec) -> Result<Self> {
        cfg.validate()?;
        let test = cfg.test_spec();
        let pwr = spec.pwr.midpoints();
        let n_of_pwr = sample_sizes(&test, &spec.pwr)?.as_ref().clone();
        let psp = spec.psp.midpoints();
        let np = pwr.len();
        let q = (0..psp.len() * np)
            .into_par_iter()
            .map(|idx| {
                let s = Strategy {
                    psp: psp[idx / np],
                    pwr: pwr[idx % np],
                };
                CategoryProbs::from_rates(
                    s.psp,
                    s.pwr,
                    cfg.alpha,
                    pub_prob_positive(s, cfg),
                    pub_prob_negative(s, cfg),
                )
            })
            .collect::<Vec<_>>();
        let w_res = (0..q.len())
            .into_par_iter()
            .map(|idx| q[idx].q_ppP() / (cfg.k + n_of_pwr[idx % np]))
            .collect();
        Self::from_parts(*cfg, spec, n_of_pwr, q, w_res)
    }

    /// Assembles a grid from precomputed parts; `w_res` need not be
    /// normalized. The other two densities are derived from it.
    pub fn from_parts(
        cfg: EcosystemConfig,
        spec: GridSpec,
        n_of_pwr: Vec<f64>,
        q: Vec<CategoryProbs>,
        mut w_res: Vec<f64>,
    ) -> Result<Self> {
        let cells = spec.psp.count * spec.pwr.count;
        if n_of_pwr.len() != spec.pwr.count || q.len() != cells || w_res.len() != cells {
            return Err(Error::config("grid parts do not match the axis sizes"));
        }
        if w_res.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::config("grid weights must be finite and nonnegative"));
        }
        let np = spec.pwr.count;
        normalize(&mut w_res, "researcher")?;
        let mut w_atm: Vec<f64> = w_res
            .par_iter()
            .enumerate()
            .map(|(idx, w)| w / (cfg.k + n_of_pwr[idx % np]))
            .collect();
        normalize(&mut w_atm, "attempted-study")?;
        let mut w_pub: Vec<f64> = w_atm
            .par_iter()
            .zip(q.par_iter())
            .map(|(w, q)| w * q.q_ppP())
            .collect();
        normalize(&mut w_pub, "published-study")?;
        Ok(StrategyGrid {
            cfg,
            psp: spec.psp.midpoints(),
            pwr: spec.pwr.midpoints(),
            spec,
            n_of_pwr,
            q,
            w_res,
            w_atm,
            w_pub,
        })
    }

    pub fn config(&self) -> &EcosystemConfig {
        &self.cfg
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn psp_axis(&self) -> &[f64] {
        &self.psp
    }

    pub fn pwr_axis(&self) -> &[f64] {
        &self.pwr
    }

    pub fn n_of_pwr(&self) -> &[f64] {
        &self.n_of_pwr
    }

    pub fn q_table(&self) -> &[CategoryProbs] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn weights(&self, density: Density) -> &[f64] {
        match density {
            Density::Res => &self.w_res,
            Density::Atm => &self.w_atm,
            Density::Pub => &self.w_pub,
        }
    }

    /// `(psp index, pwr index)` of a flat cell index.
    pub fn cell_indices(&self, idx: usize) -> (usize, usize) {
        (idx / self.pwr.len(), idx % self.pwr.len())
    }

    pub fn cell(&self, idx: usize) -> Cell<'_> {
        let (i, j) = self.cell_indices(idx);
        Cell {
            strategy: Strategy {
                psp: self.psp[i],
                pwr: self.pwr[j],
            },
            q: &self.q[idx],
            n: self.n_of_pwr[j],
            psp_edges: self.spec.psp.edges(i),
        }
    }

    /// Weighted sum of `f` over all cells under the chosen density.
    ///
    /// Summation order is fixed, so the result does not depend on the
    /// number of threads.
    pub fn expectation<F>(&self, density: Density, f: F) -> Result<f64>
    where
        F: Fn(&Cell<'_>) -> f64 + Sync,
    {
        let w = self.weights(density);
        let terms: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|idx| {
                let v = f(&self.cell(idx));
                if v.is_finite() {
                    w[idx] * v
                } else {
                    f64::NAN
                }
            })
            .collect();
        if let Some(idx) = terms.iter().position(|t| t.is_nan()) {
            let s = self.cell(idx).strategy;
            return Err(Error::NonFinite {
                psp: s.psp,
                pwr: s.pwr,
            });
        }
        Ok(pairwise_sum(&terms))
    }

    /// Cell masses of the marginal of `variable` under `density`.
    pub fn marginal(&self, variable: Variable, density: Density) -> Vec<f64> {
        let w = self.weights(density);
        let np = self.pwr.len();
        match variable {
            Variable::Psp => w.par_chunks(np).map(pairwise_sum).collect(),
            Variable::Pwr => {
                let mut out = vec![0.0; np];
                for row in w.chunks(np) {
                    for (o, x) in out.iter_mut().zip(row) {
                        *o += x;
                    }
                }
                out
            }
        }
    }

    pub fn marginal_summary(
        &self,
        variable: Variable,
        density: Density,
        rule: QuantileRule,
    ) -> MarginalSummary {
        let axis = match variable {
            Variable::Psp => &self.spec.psp,
            Variable::Pwr => &self.spec.pwr,
        };
        summarize(axis, &self.marginal(variable, density), rule)
    }

    pub fn rows(&self) -> impl Iterator<Item = GridRow> + '_ {
        (0..self.len()).map(move |idx| {
            let c = self.cell(idx);
            GridRow {
                psp: c.strategy.psp,
                pwr: c.strategy.pwr,
                n: c.n,
                n_pub: self.cfg.t / (self.cfg.k + c.n) * c.q.q_ppP(),
                q11P: c.q.q11P,
                q01P: c.q.q01P,
                q_ppP: c.q.q_ppP(),
                w_res: self.w_res[idx],
                w_atm: self.w_atm[idx],
                w_pub: self.w_pub[idx],
            }
        })
    }
}

fn normalize(w: &mut [f64], what: &str) -> Result<()> {
    let total = pairwise_sum(w);
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::UndefinedMetric {
            metric: "density",
            reason: format!("{what} density has no mass on the grid"),
        });
    }
    w.par_iter_mut().for_each(|x| *x /= total);
    Ok(())
}

/// Mean and quartiles of a distribution given by cell masses on `axis`.
pub fn summarize(axis: &Axis, mass: &[f64], rule: QuantileRule) -> MarginalSummary {
    let total: f64 = mass.iter().sum();
    let mean = mass
        .iter()
        .enumerate()
        .map(|(i, m)| m * axis.mid(i))
        .sum::<f64>()
        / total;
    let mut cdf = Vec::with_capacity(mass.len());
    let mut acc = 0.0;
    for m in mass {
        acc += m / total;
        cdf.push(acc);
    }
    let quantile = |level: f64| {
        let i = cdf
            .iter()
            .position(|&c| c >= level - 1e-12)
            .unwrap_or(mass.len() - 1);
        match rule {
            QuantileRule::CellCenter => axis.mid(i),
            QuantileRule::Interpolated => {
                let below = if i == 0 { 0.0 } else { cdf[i - 1] };
                let frac = ((level - below) / (cdf[i] - below)).clamp(0.0, 1.0);
                let (lo, hi) = axis.edges(i);
                lo + frac * (hi - lo)
            }
        }
    };
    MarginalSummary {
        mean,
        median: quantile(0.5),
        q25: quantile(0.25),
        q75: quantile(0.75),
    }
}

/// Pairwise summation with split points depending only on the length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 256;
    const PARALLEL: usize = 1 << 15;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    if xs.len() >= PARALLEL {
        let (x, y) = rayon::join(|| pairwise_sum(a), || pairwise_sum(b));
        x + y
    } else {
        pairwise_sum(a) + pairwise_sum(b)
    }
}
