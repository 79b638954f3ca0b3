//! CSV/JSON writers. Every file is written to a temporary sibling and
//! renamed into place, so readers never see a partial file.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use stringency::grid::StrategyGrid;
use stringency::{EcosystemConfig, MetricsReport};

use crate::CliError;

/// Shortest round-tripping decimal form; exponent notation only for very
/// large or small magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_atomic(
    path: &Path,
    fill: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        fill(&mut buf)?;
        buf.flush()?;
    }
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    write_atomic(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(header)?;
        for row in rows {
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    })
}

/// Scenario identification columns leading every metrics row.
pub const CONFIG_COLUMNS: [&str; 11] = [
    "scenario",
    "alpha",
    "k",
    "m",
    "ssr",
    "T",
    "b",
    "c50",
    "c95",
    "dscv_threshold",
    "resolution",
];

pub fn metrics_header() -> Vec<String> {
    CONFIG_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain(MetricsReport::columns())
        .collect()
}

pub fn metrics_row(
    name: &str,
    cfg: &EcosystemConfig,
    resolution: usize,
    report: &MetricsReport,
) -> Vec<String> {
    let mut row = vec![
        name.to_string(),
        num(cfg.alpha),
        num(cfg.k),
        num(cfg.m),
        cfg.ssr.to_string(),
        num(cfg.t),
        num(cfg.b_const),
        num(cfg.c50),
        num(cfg.c95),
        num(cfg.dscv_threshold),
        resolution.to_string(),
    ];
    row.extend(report.values().into_iter().map(num));
    row
}

#[derive(Serialize)]
pub struct MetricsRecord<'a> {
    pub scenario: &'a str,
    pub resolution: usize,
    pub config: &'a EcosystemConfig,
    pub metrics: &'a MetricsReport,
}

pub const GRID_COLUMNS: [&str; 10] = [
    "psp", "pwr", "n", "n_pub", "q11P", "q01P", "q_ppP", "w_res", "w_atm", "w_pub",
];

pub fn write_grid(path: &Path, grid: &StrategyGrid) -> Result<(), CliError> {
    write_atomic(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(GRID_COLUMNS)?;
        for r in grid.rows() {
            out.write_record(
                [
                    r.psp, r.pwr, r.n, r.n_pub, r.q11P, r.q01P, r.q_ppP, r.w_res, r.w_atm, r.w_pub,
                ]
                .map(num),
            )?;
        }
        out.flush()?;
        Ok(())
    })
}
