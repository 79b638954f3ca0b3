//! Central and noncentral Student t distribution functions.
//!
//! The noncentral CDF follows the Poisson-mixture representation
//!
//! ```text
//! F(x; v, d) = Phi(-d) + 1/2 * sum_j [ p_j I_y(j + 1/2, v/2) + q_j I_y(j + 1, v/2) ]
//! ```
//!
//! with `y = x^2 / (x^2 + v)`, `p_j = e^-l l^j / j!`, `q_j = d e^-l l^j / (sqrt(2) G(j + 3/2))`
//! and `l = d^2 / 2`, valid for `x >= 0`. Negative `x` is reflected through
//! `F(x; v, d) = 1 - F(-x; v, -d)`. Summation starts at the Poisson mode and
//! walks outwards using the incomplete-beta recurrences, so the cost grows
//! with `sqrt(l)` rather than `l`.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::gamma::ln_gamma;

use super::beta::{beta_reg_split, beta_step_split};
use crate::error::{Error, Result};

const TERM_CUTOFF: f64 = 1e-20;

/// Below this the series carries ~1e-14 absolute noise that is large
/// relative to the answer; the tail is integrated directly instead.
const TAIL_SWITCH: f64 = 1e-7;

fn check_args(x: f64, df: f64, ncp: f64) -> Result<()> {
    if !x.is_finite() || !df.is_finite() || !ncp.is_finite() {
        return Err(Error::domain(format!(
            "noncentral t arguments must be finite (x={x}, df={df}, ncp={ncp})"
        )));
    }
    if df <= 0.0 {
        return Err(Error::domain(format!(
            "degrees of freedom must be positive, got {df}"
        )));
    }
    Ok(())
}

/// Standard normal lower tail Phi(z).
pub fn normal_cdf(z: f64) -> f64 {
    // statrs' erfc is only good to ~1e-11 relative; libm's is faithful
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// P(T <= x) for T ~ t(df, ncp). `df` may be any positive real.
pub fn noncentral_t_cdf(x: f64, df: f64, ncp: f64) -> Result<f64> {
    check_args(x, df, ncp)?;
    // F(x) = Phi(-d) + S(x, d) for x >= 0; for x < 0 the reflected form
    // 1 - Phi(d) - S(-x, -d) is rearranged to avoid cancelling against 1.
    // F(0) = Phi(-d) splits the two branches, so each is clamped to its side.
    let at_zero = normal_cdf(-ncp);
    let p = if x >= 0.0 {
        let p = at_zero + mixture_sum(x, df, ncp);
        if x > 0.0 && p > 1.0 - TAIL_SWITCH {
            1.0 - lower_tail(-x, df, -ncp)
        } else {
            p
        }
        .clamp(at_zero, 1.0)
    } else {
        let p = at_zero - mixture_sum(-x, df, -ncp);
        if p < TAIL_SWITCH {
            lower_tail(x, df, ncp)
        } else {
            p
        }
        .clamp(0.0, at_zero)
    };
    Ok(p)
}

/// The Poisson-mixture part of the CDF, `x >= 0`.
fn mixture_sum(x: f64, df: f64, ncp: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let y = x * x / (x * x + df);
    let ym = df / (x * x + df);
    let b = 0.5 * df;
    let lambda = 0.5 * ncp * ncp;
    let beta_reg = |a: f64| beta_reg_split(a, b, y, ym);
    let beta_step = |a: f64| beta_step_split(a, b, y, ym);

    if lambda == 0.0 {
        return 0.5 * beta_reg(0.5);
    }

    let mode = lambda.floor();
    let j0 = mode as u64;
    // q_j = sign(d) * p_{j + 1/2} with p read as a continuous Poisson weight
    let p0 = poisson_weight(mode, lambda);
    let q0 = ncp.signum() * poisson_weight(mode + 0.5, lambda);

    let a_half = mode + 0.5;
    let a_one = mode + 1.0;
    let i_half0 = beta_reg(a_half);
    let i_one0 = beta_reg(a_one);
    let s_half0 = beta_step(a_half);
    let s_one0 = beta_step(a_one);

    // terms of both signs nearly cancel when ncp < 0, so the running sums
    // and the incomplete-beta recurrences carry their rounding error along
    let mut sum = Neumaier::default();
    sum.add(p0 * i_half0);
    sum.add(q0 * i_one0);

    // forward from the mode
    {
        let (mut p, mut q) = (p0, q0);
        let (mut i_half, mut i_one) = (Neumaier::from(i_half0), Neumaier::from(i_one0));
        let (mut s_half, mut s_one) = (s_half0, s_one0);
        let mut j = j0;
        loop {
            let a_h = j as f64 + 0.5;
            let a_o = j as f64 + 1.0;
            i_half.add(-s_half);
            i_one.add(-s_one);
            s_half *= y * (a_h + b) / (a_h + 1.0);
            s_one *= y * (a_o + b) / (a_o + 1.0);
            j += 1;
            p *= lambda / j as f64;
            q *= lambda / (j as f64 + 0.5);
            let (ih, io) = (i_half.value(), i_one.value());
            sum.add(p * ih);
            sum.add(q * io);
            if p.max(q.abs()) < TERM_CUTOFF && (j as f64) > lambda {
                break;
            }
            if ih.max(io) <= 0.0 {
                break;
            }
        }
    }

    // backward from the mode
    {
        let (mut p, mut q) = (p0, q0);
        let (mut i_half, mut i_one) = (Neumaier::from(i_half0), Neumaier::from(i_one0));
        let (mut s_half, mut s_one) = (s_half0, s_one0);
        let mut j = j0;
        while j > 0 {
            let a_h = j as f64 + 0.5;
            let a_o = j as f64 + 1.0;
            // step(a - 1) = step(a) * a / ((a + b - 1) y)
            s_half *= a_h / ((a_h + b - 1.0) * y);
            s_one *= a_o / ((a_o + b - 1.0) * y);
            if s_half == 0.0 || s_one == 0.0 || !s_half.is_finite() || !s_one.is_finite() {
                s_half = beta_step(a_h - 1.0);
                s_one = beta_step(a_o - 1.0);
                i_half = Neumaier::from(beta_reg(a_h - 1.0));
                i_one = Neumaier::from(beta_reg(a_o - 1.0));
            } else {
                i_half.add(s_half);
                i_one.add(s_one);
            }
            p *= j as f64 / lambda;
            q *= (j as f64 + 0.5) / lambda;
            j -= 1;
            sum.add(p * i_half.value());
            sum.add(q * i_one.value());
            if p.max(q.abs()) < TERM_CUTOFF {
                break;
            }
        }
    }

    0.5 * sum.value()
}

/// `ln Phi(z)`, accurate far into the lower tail.
fn ln_normal_cdf(z: f64) -> f64 {
    if z > -30.0 {
        return normal_cdf(z).ln();
    }
    let r = 1.0 / (z * z);
    let series = 1.0 - r * (1.0 - r * (3.0 - r * (15.0 - 105.0 * r)));
    -0.5 * z * z - (-z).ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() + series.ln()
}

/// `P(T <= x)` for `x < 0`, by integrating the defining mixture
/// `E[Phi(x S - d)]`, `S = sqrt(chi2_v / v)`, over `u = ln S`.
///
/// The log-integrand is concave in `u`, so it is integrated outwards from
/// its mode in panels of one Laplace width until the panels stop
/// contributing. Every term is positive: relative accuracy holds however
/// small the result.
fn lower_tail(x: f64, df: f64, ncp: f64) -> f64 {
    debug_assert!(x < 0.0);
    let a = 0.5 * df;
    // ln(2 a^a / G(a)) - a
    let ln_norm = if a >= 10.0 {
        std::f64::consts::LN_2 + 0.5 * a.ln()
            - 0.5 * (2.0 * std::f64::consts::PI).ln()
            - stirling_err(a)
    } else {
        std::f64::consts::LN_2 + a * a.ln() - ln_gamma(a) - a
    };
    let h =
        |u: f64| ln_normal_cdf(x * u.exp() - ncp) + ln_norm + a * (2.0 * u - (2.0 * u).exp_m1());
    let dh = |u: f64| {
        let z = x * u.exp() - ncp;
        let mills =
            (-0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI).ln() - ln_normal_cdf(z)).exp();
        mills * x * u.exp() - 2.0 * a * (2.0 * u).exp_m1()
    };

    let (mut lo, mut hi) = (-1.0, 1.0);
    while dh(lo) <= 0.0 {
        lo *= 2.0;
    }
    while dh(hi) >= 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-12 * (1.0 + hi.abs()) {
        let mid = 0.5 * (lo + hi);
        if dh(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mode = 0.5 * (lo + hi);
    let e = 1e-4;
    let curv = (dh(mode - e) - dh(mode + e)) / (2.0 * e);
    let width = if curv > 0.0 { curv.sqrt().recip() } else { 1.0 };
    let peak = h(mode);

    let rule = legendre_rule();
    let panel = |from: f64| rule.integrate(from, from + width, |u| (h(u) - peak).exp());
    let mut total = 0.0;
    for dir in [-1.0, 1.0] {
        let mut k = 0.0f64;
        loop {
            let from = if dir > 0.0 {
                mode + k * width
            } else {
                mode - (k + 1.0) * width
            };
            let part = panel(from);
            total += part;
            k += 1.0;
            if k >= 3.0 && part <= 1e-17 * total || k >= 2000.0 {
                break;
            }
        }
    }
    (peak + total.ln()).exp()
}

fn legendre_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(20).unwrap()))
}

/// `e^-l l^x / G(x + 1)` for real `x >= 0`.
///
/// Past the first few terms the saddle-point form is used; differencing
/// `x ln l` against `ln G(x + 1)` would cost ~1e-14 relative, which shows
/// up as non-monotone noise in the CDF tails.
fn poisson_weight(x: f64, lambda: f64) -> f64 {
    if x < 10.0 {
        return (-lambda + x * lambda.ln() - ln_gamma(x + 1.0)).exp();
    }
    (-stirling_err(x) - deviance(x, lambda)).exp() / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// `ln G(x + 1) - (x + 1/2) ln x + x - ln(2 pi)/2`, for `x >= 10`.
fn stirling_err(x: f64) -> f64 {
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
    ];
    let r = 1.0 / x;
    let r2 = r * r;
    r * C.iter().rev().fold(0.0, |acc, c| c + r2 * acc)
}

/// `x ln(x / m) + m - x`, stable near `x = m`.
fn deviance(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let next = s + ej / (2 * j + 1) as f64;
            if next == s {
                return s;
            }
            s = next;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// Compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    hi: f64,
    lo: f64,
}

impl Neumaier {
    fn from(x: f64) -> Self {
        Neumaier { hi: x, lo: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let t = self.hi + x;
        self.lo += if self.hi.abs() >= x.abs() {
            (self.hi - t) + x
        } else {
            (x - t) + self.hi
        };
        self.hi = t;
    }

    fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// Central t CDF via the incomplete beta function.
pub fn central_t_cdf(x: f64, df: f64) -> Result<f64> {
    check_args(x, df, 0.0)?;
    let (y, ym) = (x * x / (x * x + df), df / (x * x + df));
    Ok(0.5 + 0.5 * x.signum() * beta_reg_split(0.5, 0.5 * df, y, ym))
}

/// Upper tail P(T > x) of the central t, computed without cancellation.
fn central_t_upper(x: f64, df: f64) -> f64 {
    let tail = 0.5 * beta_reg_split(0.5 * df, 0.5, df / (df + x * x), x * x / (df + x * x));
    if x >= 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

fn central_t_pdf(x: f64, df: f64) -> f64 {
    let ln_norm =
        ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df) - 0.5 * (df * std::f64::consts::PI).ln();
    (ln_norm - 0.5 * (df + 1.0) * (x * x / df).ln_1p()).exp()
}

/// The value `t` with `P(T > t) = tail` for the central t with `df` degrees
/// of freedom, refined so that the in-crate CDF reproduces `tail` to machine
/// precision.
pub fn t_upper_quantile(tail: f64, df: f64) -> Result<f64> {
    if !(tail > 0.0 && tail < 1.0) {
        return Err(Error::domain(format!(
            "tail probability must lie in (0,1), got {tail}"
        )));
    }
    check_args(0.0, df, 0.0)?;
    if tail == 0.5 {
        return Ok(0.0);
    }
    if tail > 0.5 {
        return Ok(-t_upper_quantile(1.0 - tail, df)?);
    }

    let mut t = StudentsT::new(0.0, 1.0, df)
        .ok()
        .map(|d| d.inverse_cdf(1.0 - tail))
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(1.0);

    // bracket [lo, hi] with upper(lo) >= tail >= upper(hi)
    let mut lo = 0.0;
    let mut hi = t.max(1.0);
    while central_t_upper(hi, df) > tail {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::domain(format!(
                "t quantile for tail {tail}, df {df} overflows"
            )));
        }
    }
    if !(lo..=hi).contains(&t) {
        t = 0.5 * (lo + hi);
    }

    for _ in 0..200 {
        let g = central_t_upper(t, df) - tail;
        if g > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let d = central_t_pdf(t, df);
        let mut next = t + g / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 1e-15 * t.abs().max(1.0) {
            return Ok(next);
        }
        t = next;
    }
    Ok(t)
}
