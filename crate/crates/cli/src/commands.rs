use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use stringency::ecosystem::CATEGORY_LABELS;
use stringency::grid::{
    build_grid, Density, GridSpec, QuantileRule, StrategyGrid, Variable, DEFAULT_RESOLUTION,
};
use stringency::mc::{category_gof, simulate, Estimate, SimOptions};
use stringency::metrics::{compare, RatioCell};
use stringency::presets::{
    scenario_name, standard_ecosystems, Calibration, COSTS, LATTICE_STEP, NOVELTY,
};
use stringency::{EcosystemConfig, MetricsReport};

use crate::config::{Scenario, ScenarioSuite};
use crate::output::{
    metrics_header, metrics_row, num, write_csv, write_grid, write_json, MetricsRecord,
};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub resolution: Option<usize>,
    pub format: Format,
    pub dump_grids: bool,
}

fn out_dir(flag: Option<PathBuf>, suite: &ScenarioSuite) -> PathBuf {
    flag.or_else(|| suite.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

fn resolution(flag: Option<usize>, suite: &ScenarioSuite) -> usize {
    flag.or(suite.resolution).unwrap_or(DEFAULT_RESOLUTION)
}

/// Metrics for every scenario; returns the files written.
pub fn run(suite: &ScenarioSuite, opts: RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let out = out_dir(opts.out, suite);
    let res = resolution(opts.resolution, suite);
    let reports = suite
        .scenarios
        .par_iter()
        .map(|s| {
            let grid = build_grid(&s.config, res)?;
            if opts.dump_grids {
                write_grid(&out.join(format!("grid_{}.csv", s.name)), &grid)?;
            }
            Ok(MetricsReport::compute(&grid)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut written = Vec::new();
    if opts.dump_grids {
        written.extend(
            suite
                .scenarios
                .iter()
                .map(|s| out.join(format!("grid_{}.csv", s.name))),
        );
    }
    if opts.format != Format::Json {
        let rows: Vec<_> = suite
            .scenarios
            .iter()
            .zip(&reports)
            .map(|(s, r)| metrics_row(&s.name, &s.config, res, r))
            .collect();
        let path = out.join("metrics.csv");
        write_csv(&path, &metrics_header(), &rows)?;
        written.push(path);
    }
    if opts.format != Format::Csv {
        let records: Vec<_> = suite
            .scenarios
            .iter()
            .zip(&reports)
            .map(|(s, r)| MetricsRecord {
                scenario: &s.name,
                resolution: res,
                config: &s.config,
                metrics: r,
            })
            .collect();
        let path = out.join("metrics.json");
        write_json(&path, &records)?;
        written.push(path);
    }
    Ok(written)
}

pub fn dump_grid(
    suite: &ScenarioSuite,
    scenario: &str,
    out: &Path,
    res: Option<usize>,
) -> Result<(), CliError> {
    let s = suite.find(scenario)?;
    let grid = build_grid(&s.config, resolution(res, suite))?;
    write_grid(out, &grid)
}

pub struct TableOptions {
    pub out: PathBuf,
    pub resolution: usize,
    pub calibration: Calibration,
    /// Compare every ecosystem with itself; all ratios become 1.
    pub self_compare: bool,
}

fn strs(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn ratio_cells(c: &RatioCell) -> [String; 3] {
    [num(c.a), num(c.b), c.ratio.map(num).unwrap_or_default()]
}

/// The 72-ecosystem sweep and the comparison and interquartile tables
/// derived from it.
pub fn reproduce_tables(opts: TableOptions) -> Result<Vec<PathBuf>, CliError> {
    let cal = opts.calibration;
    let cfgs = standard_ecosystems(cal);
    let reports: HashMap<String, MetricsReport> = cfgs
        .par_iter()
        .map(|c| {
            Ok((
                scenario_name(c),
                MetricsReport::compute(&build_grid(c, opts.resolution)?)?,
            ))
        })
        .collect::<Result<_, CliError>>()?;
    let get = |alpha: f64, k: f64, m: f64, ssr: bool| {
        &reports[&scenario_name(&cal.apply(EcosystemConfig::new(alpha, k, m, ssr)))]
    };
    let km: Vec<(f64, f64)> = COSTS
        .iter()
        .flat_map(|&k| NOVELTY.iter().map(move |&m| (k, m)))
        .collect();
    let mut written = Vec::new();
    let mut emit =
        |name: &str, header: Vec<String>, rows: Vec<Vec<String>>| -> Result<(), CliError> {
            let path = opts.out.join(name);
            write_csv(&path, &header, &rows)?;
            written.push(path);
            Ok(())
        };

    let rows = cfgs
        .iter()
        .map(|c| {
            let name = scenario_name(c);
            metrics_row(&name, c, opts.resolution, &reports[&name])
        })
        .collect();
    emit("metrics_all.csv", metrics_header(), rows)?;

    let rows = km
        .iter()
        .map(|&(k, m)| {
            let r = get(0.05, k, m, false);
            vec![
                num(k),
                num(m),
                num(r.pr),
                num(r.n_pub),
                num(r.n_atm),
                num(r.rel),
                num(r.dscv),
            ]
        })
        .collect();
    emit(
        "table2.csv",
        strs(&["k", "m", "pr", "n_pub", "n_atm", "rel", "dscv"]),
        rows,
    )?;

    let ratio_header = strs(&[
        "k",
        "m",
        "pr_a",
        "pr_b",
        "pr_ratio",
        "rel_a",
        "rel_b",
        "rel_ratio",
        "dscv_a",
        "dscv_b",
        "dscv_ratio",
    ]);
    for (file, num_side, den_side) in [
        ("table3.csv", (0.005, false), (0.05, false)),
        ("table4.csv", (0.05, true), (0.05, false)),
        ("table5.csv", (0.005, true), (0.05, false)),
    ] {
        let rows = km
            .iter()
            .map(|&(k, m)| {
                let b = get(den_side.0, k, m, den_side.1);
                let a = if opts.self_compare {
                    b
                } else {
                    get(num_side.0, k, m, num_side.1)
                };
                let c = compare(a, b);
                let mut row = vec![num(k), num(m)];
                for cell in [&c.pr, &c.rel, &c.dscv] {
                    row.extend(ratio_cells(cell));
                }
                row
            })
            .collect();
        emit(file, ratio_header.clone(), rows)?;
    }

    let iqr_header = strs(&[
        "alpha",
        "k",
        "m",
        "psp_atm_q25",
        "psp_atm_q75",
        "psp_pub_q25",
        "psp_pub_q75",
        "pwr_atm_q25",
        "pwr_atm_q75",
        "pwr_pub_q25",
        "pwr_pub_q75",
    ]);
    for (file, ssr) in [("table6.csv", false), ("table7.csv", true)] {
        let mut rows = Vec::new();
        for alpha in [0.005, 0.05] {
            for &(k, m) in &km {
                let r = get(alpha, k, m, ssr);
                let mut row = vec![num(alpha), num(k), num(m)];
                for s in [&r.psp_atm, &r.psp_pub, &r.pwr_atm, &r.pwr_pub] {
                    row.extend([num(s.q25), num(s.q75)]);
                }
                rows.push(row);
            }
        }
        emit(file, iqr_header.clone(), rows)?;
    }

    // median power under SSR, read off the node lattice
    let rows = km
        .par_iter()
        .map(|&(k, m)| {
            let cfg = cal.apply(EcosystemConfig::new(0.05, k, m, true));
            let grid = StrategyGrid::build(&cfg, GridSpec::lattice(&cfg, LATTICE_STEP)?)?;
            let med = |d| {
                grid.marginal_summary(Variable::Pwr, d, QuantileRule::CellCenter)
                    .median
            };
            Ok(vec![
                num(k),
                num(m),
                num(med(Density::Atm)),
                num(med(Density::Pub)),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    emit(
        "ssr_median_power.csv",
        strs(&["k", "m", "pwr_atm_median", "pwr_pub_median"]),
        rows,
    )?;
    Ok(written)
}

pub struct McOptions {
    pub seed: u64,
    pub studies: u64,
    pub replicas: usize,
    pub resolution: Option<usize>,
    pub out: Option<PathBuf>,
    /// Largest |z| still counted as agreement.
    pub threshold: f64,
    pub keep_log: bool,
}

#[derive(Debug, Clone)]
pub struct McCheck {
    pub scenario: String,
    pub metric: &'static str,
    pub analytic: f64,
    pub estimate: Estimate,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct McSummary {
    pub checks: Vec<McCheck>,
    pub files: Vec<PathBuf>,
}

/// Simulates every scenario and compares the estimates with the analytic
/// metrics.
pub fn mc_validate(suite: &ScenarioSuite, opts: McOptions) -> Result<McSummary, CliError> {
    if opts.studies == 0 || opts.replicas == 0 {
        return Err(CliError::Config(
            "--studies and --replicas must be positive".into(),
        ));
    }
    let out = out_dir(opts.out.clone(), suite);
    let res = resolution(opts.resolution, suite);
    let mut checks = Vec::new();
    let mut gof_rows = Vec::new();
    let mut files = Vec::new();
    for Scenario { name, config } in &suite.scenarios {
        let grid = build_grid(config, res)?;
        let analytic = MetricsReport::compute(&grid)?;
        let sim_opts = SimOptions {
            keep_log: opts.keep_log,
            ..SimOptions::for_studies(&grid, opts.studies, opts.replicas)?
        };
        let sim = simulate(&grid, &sim_opts, opts.seed)?;
        for (metric, estimate, value) in [
            ("rel", sim.rel, analytic.rel),
            ("pr", sim.pr, analytic.pr),
            ("stpr", sim.stpr, analytic.stpr),
            ("n_atm", sim.n_atm, analytic.n_atm),
            ("n_pub", sim.n_pub, analytic.n_pub),
            ("dscv", sim.dscv, analytic.dscv),
        ] {
            let z = estimate.z_score(value);
            checks.push(McCheck {
                scenario: name.clone(),
                metric,
                analytic: value,
                estimate,
                z,
                pass: z.abs() <= opts.threshold,
            });
        }
        let gof = category_gof(&grid, &sim.outcome)?;
        let mut row = vec![name.clone(), sim.outcome.studies.to_string()];
        row.extend(sim.outcome.counts.iter().map(|c| c.to_string()));
        row.extend([num(gof.statistic), gof.df.to_string(), num(gof.p_value)]);
        gof_rows.push(row);
        if opts.keep_log {
            let rows = sim
                .outcome
                .log
                .iter()
                .map(|s| {
                    vec![
                        num(s.psp),
                        num(s.pwr),
                        num(s.n),
                        s.truth.to_string(),
                        s.finding.to_string(),
                        s.published.to_string(),
                    ]
                })
                .collect::<Vec<_>>();
            let path = out.join(format!("mc_log_{name}.csv"));
            write_csv(
                &path,
                &strs(&["psp", "pwr", "n", "truth", "finding", "published"]),
                &rows,
            )?;
            files.push(path);
        }
    }

    let rows = checks
        .iter()
        .map(|c| {
            vec![
                c.scenario.clone(),
                c.metric.to_string(),
                num(c.analytic),
                num(c.estimate.value),
                num(c.estimate.se),
                num(c.z),
                if c.pass { "PASS" } else { "FAIL" }.to_string(),
            ]
        })
        .collect::<Vec<_>>();
    let path = out.join("mc_validation.csv");
    write_csv(
        &path,
        &strs(&[
            "scenario", "metric", "analytic", "estimate", "se", "z", "verdict",
        ]),
        &rows,
    )?;
    files.push(path);
    let path = out.join("mc_categories.csv");
    let mut header = strs(&["scenario", "studies"]);
    header.extend(CATEGORY_LABELS.iter().map(|l| format!("n{l}")));
    header.extend(strs(&["chi2", "df", "p_value"]));
    write_csv(&path, &header, &gof_rows)?;
    files.push(path);
    Ok(McSummary { checks, files })
}
