//! The standard 72-ecosystem sweep and the reference calibration used for
//! the comparison tables.

use crate::ecosystem::EcosystemConfig;

pub const ALPHAS: [f64; 4] = [0.001, 0.005, 0.05, 0.10];
pub const COSTS: [f64; 3] = [100.0, 500.0, 1000.0];
pub const NOVELTY: [f64; 3] = [1.0, 3.0, 6.0];

/// Node spacing of the reference lattice.
pub const LATTICE_STEP: f64 = 0.005;

/// Settings behind the reference tables. `STATED` keeps the model defaults
/// (`c50 = 0.5`, cutoff `psp < 0.05`, psp from 0); `REFERENCE` is the
/// continuous equivalent of a 0.005 node lattice with an inclusive cutoff,
/// plus a stricter sample-size requirement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub c50: f64,
    pub dscv_threshold: f64,
    pub psp_min: f64,
}

impl Calibration {
    pub const STATED: Calibration = Calibration {
        c50: 0.5,
        dscv_threshold: 0.05,
        psp_min: 0.0,
    };

    pub const REFERENCE: Calibration = Calibration {
        c50: 0.6,
        dscv_threshold: 0.05 + LATTICE_STEP / 2.0,
        psp_min: LATTICE_STEP / 2.0,
    };

    pub fn apply(&self, cfg: EcosystemConfig) -> EcosystemConfig {
        EcosystemConfig {
            c50: self.c50,
            dscv_threshold: self.dscv_threshold,
            psp_min: self.psp_min,
            ..cfg
        }
    }
}

/// Canonical scenario name, e.g. `a0.05_k100_m1_ssr`.
pub fn scenario_name(cfg: &EcosystemConfig) -> String {
    format!(
        "a{}_k{}_m{}_{}",
        cfg.alpha,
        cfg.k,
        cfg.m,
        if cfg.ssr { "ssr" } else { "nossr" }
    )
}

/// All 72 ecosystems (4 alphas x 3 costs x 3 novelty exponents x SSR off/on)
/// under `cal`.
pub fn standard_ecosystems(cal: Calibration) -> Vec<EcosystemConfig> {
    let mut out = Vec::with_capacity(72);
    for ssr in [false, true] {
        for alpha in ALPHAS {
            for k in COSTS {
                for m in NOVELTY {
                    out.push(cal.apply(EcosystemConfig::new(alpha, k, m, ssr)));
                }
            }
        }
    }
    out
}

/// The nine alpha = 0.05, no-SSR ecosystems, in (k, m) order.
pub fn baseline_ecosystems(cal: Calibration) -> Vec<EcosystemConfig> {
    let mut out = Vec::with_capacity(9);
    for k in COSTS {
        for m in NOVELTY {
            out.push(cal.apply(EcosystemConfig::new(0.05, k, m, false)));
        }
    }
    out
}
