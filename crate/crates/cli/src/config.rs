//! Scenario suites from TOML.
//!
//! ```toml
//! grid_resolution = 256      # optional, cells per axis
//! out_dir = "results"        # optional
//!
//! [defaults]                 # any ecosystem key; unset keys take the model defaults
//! T = 100000
//! c50 = 0.6
//!
//! [sweep]                    # cartesian product over the listed axes
//! alpha = [0.005, 0.05]
//! k = [100, 500, 1000]
//! m = [1, 3, 6]
//! ssr = [false, true]
//!
//! [[scenario]]               # explicit scenarios, on top of the defaults
//! name = "lenient"
//! alpha = 0.1
//! b = 0.2
//! ```
//!
//! A flat file holding only ecosystem keys (no `[sweep]`, no `[[scenario]]`)
//! is a single scenario. Top-level ecosystem keys otherwise act as defaults.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use stringency::presets::scenario_name;
use stringency::EcosystemConfig;
use toml::{Table, Value};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub config: EcosystemConfig,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioSuite {
    pub scenarios: Vec<Scenario>,
    pub resolution: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sweep {
    alpha: Option<Vec<f64>>,
    k: Option<Vec<f64>>,
    m: Option<Vec<f64>>,
    ssr: Option<Vec<bool>>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Deserializes `value`, reporting failures as `prefix.path: message`.
fn typed<'de, T: Deserialize<'de>>(value: Value, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let at = match (prefix.is_empty(), path == ".") {
            (true, _) => path,
            (false, true) => prefix.to_string(),
            (false, false) => format!("{prefix}.{path}"),
        };
        config_err(format!("{at}: {}", e.into_inner()))
    })
}

fn ecosystem(table: Table, origin: &dyn Fn(&str) -> String) -> Result<EcosystemConfig, CliError> {
    let keys: Vec<String> = table.keys().cloned().collect();
    let cfg: EcosystemConfig =
        serde_path_to_error::deserialize(Value::Table(table)).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner().to_string();
            // unknown keys fail at the table itself; the key is in the message
            let first = match path.split('.').next() {
                Some(f) if keys.iter().any(|k| k == f) => f.to_string(),
                _ => inner.split('`').nth(1).unwrap_or_default().to_string(),
            };
            let at = if keys.contains(&first) {
                origin(&first)
            } else {
                path
            };
            config_err(format!("{at}: {inner}"))
        })?;
    cfg.validate().map_err(|e| {
        let msg = match e {
            stringency::Error::Config(m) => m,
            other => other.to_string(),
        };
        let field = msg
            .split_whitespace()
            .next()
            .unwrap_or_default()
            .to_string();
        config_err(format!("{}: {msg}", origin(&field)))
    })?;
    Ok(cfg)
}

impl ScenarioSuite {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut doc: Table = text
            .parse()
            .map_err(|e: toml::de::Error| config_err(e.to_string()))?;

        let resolution = match doc.remove("grid_resolution") {
            Some(v) => Some(typed::<usize>(v, "grid_resolution")?),
            None => None,
        };
        let out_dir = match doc.remove("out_dir") {
            Some(v) => Some(typed::<PathBuf>(v, "out_dir")?),
            None => None,
        };
        let defaults = match doc.remove("defaults") {
            Some(v) => typed::<Table>(v, "defaults")?,
            None => Table::new(),
        };
        let sweep = match doc.remove("sweep") {
            Some(v) => Some(typed::<Sweep>(v, "sweep")?),
            None => None,
        };
        let explicit = match doc.remove("scenario") {
            Some(v) => typed::<Vec<Table>>(v, "scenario")?,
            None => Vec::new(),
        };

        // whatever is left at the top level is ecosystem keys
        let flat = doc;
        let flat_only = sweep.is_none() && explicit.is_empty() && !flat.is_empty();
        let mut base = flat.clone();
        for (key, value) in defaults.iter() {
            if base.contains_key(key) {
                return Err(config_err(format!(
                    "defaults.{key}: also set at the top level"
                )));
            }
            base.insert(key.clone(), value.clone());
        }
        let base_origin = |key: &str| {
            if flat.contains_key(key) {
                key.to_string()
            } else {
                format!("defaults.{key}")
            }
        };
        let base_cfg = ecosystem(base.clone(), &base_origin)?;

        let mut scenarios = Vec::new();
        if flat_only {
            scenarios.push(Scenario {
                name: scenario_name(&base_cfg),
                config: base_cfg,
            });
        }
        if let Some(sweep) = sweep {
            let nonempty = |axis: &str, len: usize| {
                if len == 0 {
                    Err(config_err(format!("sweep.{axis}: must not be empty")))
                } else {
                    Ok(())
                }
            };
            let alphas = sweep.alpha.unwrap_or_else(|| vec![base_cfg.alpha]);
            let ks = sweep.k.unwrap_or_else(|| vec![base_cfg.k]);
            let ms = sweep.m.unwrap_or_else(|| vec![base_cfg.m]);
            let ssrs = sweep.ssr.unwrap_or_else(|| vec![base_cfg.ssr]);
            nonempty("alpha", alphas.len())?;
            nonempty("k", ks.len())?;
            nonempty("m", ms.len())?;
            nonempty("ssr", ssrs.len())?;
            for &ssr in &ssrs {
                for &alpha in &alphas {
                    for &k in &ks {
                        for &m in &ms {
                            let config = EcosystemConfig {
                                alpha,
                                k,
                                m,
                                ssr,
                                ..base_cfg
                            };
                            config
                                .validate()
                                .map_err(|e| config_err(format!("sweep: {e}")))?;
                            scenarios.push(Scenario {
                                name: scenario_name(&config),
                                config,
                            });
                        }
                    }
                }
            }
        }
        for (i, mut table) in explicit.into_iter().enumerate() {
            let name = match table.remove("name") {
                Some(v) => Some(typed::<String>(v, &format!("scenario[{i}].name"))?),
                None => None,
            };
            let own: HashSet<String> = table.keys().cloned().collect();
            let mut merged = base.clone();
            merged.extend(table);
            let origin = |key: &str| {
                if own.contains(key) {
                    format!("scenario[{i}].{key}")
                } else {
                    base_origin(key)
                }
            };
            let config = ecosystem(merged, &origin)?;
            let name = name.unwrap_or_else(|| scenario_name(&config));
            if name.is_empty() {
                return Err(config_err(format!("scenario[{i}].name: must not be empty")));
            }
            scenarios.push(Scenario { name, config });
        }

        let mut seen = HashSet::new();
        for s in &scenarios {
            if !seen.insert(s.name.as_str()) {
                return Err(config_err(format!(
                    "scenario name {:?} is not unique",
                    s.name
                )));
            }
        }
        Ok(ScenarioSuite {
            scenarios,
            resolution,
            out_dir,
        })
    }

    pub fn find(&self, name: &str) -> Result<&Scenario, CliError> {
        self.scenarios
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| {
                let known: Vec<_> = self.scenarios.iter().map(|s| s.name.as_str()).collect();
                config_err(format!(
                    "no scenario named {name:?}; known: {}",
                    known.join(", ")
                ))
            })
    }
}
