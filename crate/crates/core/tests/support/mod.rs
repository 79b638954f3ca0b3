//! Shared test fixtures: an independent quadrature oracle for the
//! noncentral t and the published reference tables.
#![allow(dead_code)]

use statrs::function::gamma::ln_gamma;

// ---------------------------------------------------------------------------
// Quadrature oracle
// ---------------------------------------------------------------------------

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let pair = f(c - x) + f(c + x);
        kronrod += GK_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive Gauss-Kronrod over `[a, b]`, starting from `pieces`
/// panels and repeatedly bisecting the panel with the largest error
/// estimate until the total estimate drops below `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    const MAX_PANELS: usize = 5_000;
    let w = (b - a) / pieces as f64;
    let mut panels: Vec<(f64, f64, f64, f64)> = (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * w, a + (i + 1) as f64 * w);
            let (v, e) = gk15(&f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    while panels.len() < MAX_PANELS {
        let total_err: f64 = panels.iter().map(|p| p.3).sum();
        if total_err <= tol {
            break;
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].3.total_cmp(&panels[j].3))
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        for (l, h) in [(lo, mid), (mid, hi)] {
            let (v, e) = gk15(&f, l, h);
            panels.push((l, h, v, e));
        }
    }
    panels.iter().map(|p| p.2).sum()
}

/// P(T <= x) for T = (Z + ncp) / S with S = sqrt(V / df), V chi-square:
/// `F(x) = integral of Phi(x s - ncp) f_S(s) ds`.
pub fn nct_cdf_quadrature(x: f64, df: f64, ncp: f64) -> f64 {
    let phi = |z: f64| 0.5 * libm::erfc(-z / std::f64::consts::SQRT_2);
    // f_S(s) = 2 (df/2)^(df/2) / G(df/2) s^(df-1) exp(-df s^2 / 2)
    let ln_c = std::f64::consts::LN_2 + 0.5 * df * (0.5 * df).ln() - ln_gamma(0.5 * df);
    let spread = 12.0 / df.sqrt();
    let s_hi = 1.0 + spread + if df < 4.0 { 10.0 } else { 0.0 };
    if df >= 1.0 {
        let s_lo = (1.0 - spread).max(0.0);
        let f = |s: f64| {
            if s <= 0.0 {
                return if df == 1.0 {
                    ln_c.exp() * phi(-ncp)
                } else {
                    0.0
                };
            }
            let dens = (ln_c + (df - 1.0) * s.ln() - 0.5 * df * s * s).exp();
            dens * phi(x * s - ncp)
        };
        integrate(f, s_lo, s_hi, 64, 1e-14)
    } else {
        // u = s^df removes the integrable singularity at s = 0
        let u_hi = s_hi.powf(df);
        let f = |u: f64| {
            if u <= 0.0 {
                return ln_c.exp() / df * phi(-ncp);
            }
            let s = u.powf(1.0 / df);
            (ln_c - 0.5 * df * s * s).exp() / df * phi(x * s - ncp)
        };
        integrate(f, 0.0, u_hi, 64, 1e-14)
    }
}

/// 100 deterministic probe points `(x, df, ncp)`.
pub fn nct_probe_points() -> Vec<(f64, f64, f64)> {
    let dfs = [1.0, 3.7, 10.0, 58.0, 700.0];
    let xs = [-3.0, -0.5, 0.8, 2.2, 6.0];
    let ncps = [-1.5, 0.4, 2.5, 9.0];
    let mut out = Vec::with_capacity(100);
    for &df in &dfs {
        for &x in &xs {
            for &ncp in &ncps {
                out.push((x, df, ncp));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Published tables
// ---------------------------------------------------------------------------

/// (k, m) in table row order.
pub const KM: [(f64, f64); 9] = [
    (100.0, 1.0),
    (100.0, 3.0),
    (100.0, 6.0),
    (500.0, 1.0),
    (500.0, 3.0),
    (500.0, 6.0),
    (1000.0, 1.0),
    (1000.0, 3.0),
    (1000.0, 6.0),
];

/// alpha = 0.05, no SSR: (PR, N_PUB, N_ATM, REL, DSCV).
pub const BASELINE: [(f64, f64, f64, f64, f64); 9] = [
    (0.08, 24.3, 296.7, 0.76, 0.10),
    (0.04, 13.8, 317.6, 0.53, 0.23),
    (0.03, 11.0, 337.7, 0.35, 0.41),
    (0.11, 12.5, 112.1, 0.84, 0.04),
    (0.05, 6.2, 114.9, 0.66, 0.11),
    (0.04, 4.4, 117.8, 0.48, 0.20),
    (0.12, 8.4, 68.7, 0.85, 0.03),
    (0.06, 4.1, 69.7, 0.69, 0.07),
    (0.04, 2.8, 70.7, 0.51, 0.13),
];

/// Ratios (PR, REL, DSCV): alpha 0.005 over alpha 0.05, both without SSR.
pub const STRICTER_ALPHA: [(f64, f64, f64); 9] = [
    (1.05, 1.29, 0.20),
    (0.80, 1.79, 0.23),
    (0.56, 2.63, 0.28),
    (0.93, 1.18, 0.29),
    (0.77, 1.47, 0.34),
    (0.59, 1.96, 0.39),
    (0.92, 1.16, 0.34),
    (0.77, 1.41, 0.38),
    (0.61, 1.84, 0.44),
];

/// Ratios (PR, REL, DSCV): SSR over no SSR, both at alpha 0.05.
pub const WITH_SSR: [(f64, f64, f64); 9] = [
    (1.45, 1.18, 0.52),
    (1.24, 1.46, 0.56),
    (1.04, 1.83, 0.61),
    (1.19, 1.08, 0.76),
    (1.11, 1.20, 0.80),
    (1.01, 1.36, 0.85),
    (1.14, 1.06, 0.84),
    (1.08, 1.15, 0.88),
    (1.00, 1.27, 0.93),
];

/// Ratios (PR, REL, DSCV): SSR with alpha 0.005 over no SSR with alpha 0.05.
pub const TANDEM: [(f64, f64, f64); 9] = [
    (1.45, 1.30, 0.15),
    (1.10, 1.83, 0.18),
    (0.78, 2.74, 0.22),
    (1.13, 1.18, 0.26),
    (0.93, 1.49, 0.30),
    (0.71, 2.02, 0.35),
    (1.07, 1.16, 0.31),
    (0.90, 1.42, 0.36),
    (0.70, 1.87, 0.42),
];

/// Interquartile ranges: (alpha, k, m, [psp_atm, psp_pub, pwr_atm, pwr_pub] as (q25, q75)).
pub type IqrRow = (f64, f64, f64, [(f64, f64); 4]);

/// Without SSR.
pub const IQR_NO_SSR: [IqrRow; 18] = [
    (
        0.005,
        100.0,
        1.0,
        [(0.32, 0.67), (0.35, 0.64), (0.21, 0.62), (0.39, 0.76)],
    ),
    (
        0.005,
        100.0,
        3.0,
        [(0.18, 0.44), (0.18, 0.38), (0.20, 0.61), (0.38, 0.76)],
    ),
    (
        0.005,
        100.0,
        6.0,
        [(0.10, 0.29), (0.10, 0.24), (0.20, 0.61), (0.36, 0.75)],
    ),
    (
        0.005,
        500.0,
        1.0,
        [(0.32, 0.67), (0.36, 0.64), (0.31, 0.72), (0.47, 0.81)],
    ),
    (
        0.005,
        500.0,
        3.0,
        [(0.18, 0.44), (0.18, 0.38), (0.30, 0.71), (0.46, 0.81)],
    ),
    (
        0.005,
        500.0,
        6.0,
        [(0.11, 0.29), (0.10, 0.24), (0.29, 0.71), (0.45, 0.80)],
    ),
    (
        0.005,
        1000.0,
        1.0,
        [(0.32, 0.67), (0.36, 0.64), (0.36, 0.76), (0.51, 0.84)],
    ),
    (
        0.005,
        1000.0,
        3.0,
        [(0.18, 0.45), (0.19, 0.38), (0.35, 0.76), (0.50, 0.84)],
    ),
    (
        0.005,
        1000.0,
        6.0,
        [(0.11, 0.29), (0.11, 0.24), (0.34, 0.75), (0.49, 0.84)],
    ),
    (
        0.05,
        100.0,
        1.0,
        [(0.22, 0.61), (0.26, 0.58), (0.14, 0.48), (0.23, 0.66)],
    ),
    (
        0.05,
        100.0,
        3.0,
        [(0.11, 0.38), (0.09, 0.30), (0.12, 0.44), (0.16, 0.58)],
    ),
    (
        0.05,
        100.0,
        6.0,
        [(0.06, 0.22), (0.04, 0.15), (0.11, 0.40), (0.12, 0.49)],
    ),
    (
        0.05,
        500.0,
        1.0,
        [(0.26, 0.64), (0.29, 0.60), (0.28, 0.68), (0.41, 0.78)],
    ),
    (
        0.05,
        500.0,
        3.0,
        [(0.12, 0.40), (0.12, 0.32), (0.25, 0.66), (0.34, 0.75)],
    ),
    (
        0.05,
        500.0,
        6.0,
        [(0.06, 0.24), (0.05, 0.18), (0.22, 0.64), (0.28, 0.71)],
    ),
    (
        0.05,
        1000.0,
        1.0,
        [(0.26, 0.64), (0.29, 0.60), (0.34, 0.75), (0.47, 0.83)],
    ),
    (
        0.05,
        1000.0,
        3.0,
        [(0.13, 0.40), (0.12, 0.33), (0.31, 0.73), (0.41, 0.80)],
    ),
    (
        0.05,
        1000.0,
        6.0,
        [(0.07, 0.25), (0.06, 0.18), (0.28, 0.71), (0.35, 0.77)],
    ),
];

/// With SSR.
pub const IQR_SSR: [IqrRow; 18] = [
    (
        0.005,
        100.0,
        1.0,
        [(0.32, 0.67), (0.36, 0.64), (0.64, 0.84), (0.72, 0.89)],
    ),
    (
        0.005,
        100.0,
        3.0,
        [(0.19, 0.45), (0.19, 0.38), (0.64, 0.84), (0.72, 0.89)],
    ),
    (
        0.005,
        100.0,
        6.0,
        [(0.12, 0.30), (0.11, 0.24), (0.63, 0.84), (0.72, 0.89)],
    ),
    (
        0.005,
        500.0,
        1.0,
        [(0.32, 0.67), (0.36, 0.64), (0.66, 0.86), (0.73, 0.90)],
    ),
    (
        0.005,
        500.0,
        3.0,
        [(0.19, 0.45), (0.19, 0.38), (0.66, 0.86), (0.73, 0.90)],
    ),
    (
        0.005,
        500.0,
        6.0,
        [(0.12, 0.30), (0.11, 0.24), (0.65, 0.86), (0.73, 0.90)],
    ),
    (
        0.005,
        1000.0,
        1.0,
        [(0.32, 0.67), (0.36, 0.64), (0.66, 0.88), (0.74, 0.90)],
    ),
    (
        0.005,
        1000.0,
        3.0,
        [(0.19, 0.45), (0.19, 0.38), (0.66, 0.87), (0.74, 0.90)],
    ),
    (
        0.005,
        1000.0,
        6.0,
        [(0.12, 0.30), (0.11, 0.24), (0.66, 0.87), (0.74, 0.90)],
    ),
    (
        0.05,
        100.0,
        1.0,
        [(0.28, 0.65), (0.32, 0.61), (0.61, 0.82), (0.70, 0.87)],
    ),
    (
        0.05,
        100.0,
        3.0,
        [(0.15, 0.42), (0.14, 0.35), (0.61, 0.82), (0.70, 0.87)],
    ),
    (
        0.05,
        100.0,
        6.0,
        [(0.08, 0.26), (0.07, 0.20), (0.60, 0.82), (0.69, 0.86)],
    ),
    (
        0.05,
        500.0,
        1.0,
        [(0.28, 0.65), (0.32, 0.61), (0.64, 0.85), (0.72, 0.89)],
    ),
    (
        0.05,
        500.0,
        3.0,
        [(0.15, 0.42), (0.14, 0.35), (0.64, 0.85), (0.72, 0.89)],
    ),
    (
        0.05,
        500.0,
        6.0,
        [(0.08, 0.26), (0.07, 0.20), (0.64, 0.85), (0.71, 0.89)],
    ),
    (
        0.05,
        1000.0,
        1.0,
        [(0.28, 0.66), (0.32, 0.61), (0.66, 0.87), (0.74, 0.90)],
    ),
    (
        0.05,
        1000.0,
        3.0,
        [(0.15, 0.42), (0.14, 0.35), (0.66, 0.87), (0.73, 0.90)],
    ),
    (
        0.05,
        1000.0,
        6.0,
        [(0.08, 0.26), (0.07, 0.20), (0.66, 0.87), (0.73, 0.90)],
    ),
];
