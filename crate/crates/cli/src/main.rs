use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stringency::grid::DEFAULT_RESOLUTION;
use stringency::presets::Calibration;
use stringency_cli::commands::{self, Format, McOptions, RunOptions, TableOptions};
use stringency_cli::config::ScenarioSuite;
use stringency_cli::CliError;

#[derive(Parser)]
#[command(
    name = "stringency",
    version,
    about = "Publication-policy ecosystems: metrics, tables and simulation checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CalibrationArg {
    /// c50 = 0.6, breakthrough cutoff 0.0525, psp from 0.0025
    Reference,
    /// c50 = 0.5, breakthrough cutoff 0.05, psp from 0
    Stated,
}

#[derive(Subcommand)]
enum Command {
    /// Compute metrics for every scenario in a config file
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory [default: config `out_dir`, else .]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cells per grid axis [default: config `grid_resolution`, else 512]
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
        /// Also write grid_<scenario>.csv for every scenario
        #[arg(long)]
        dump_grids: bool,
    },
    /// Run the 72 standard ecosystems and write the comparison tables
    ReproduceTables {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long, value_enum, default_value = "reference")]
        calibration: CalibrationArg,
        /// Compare every ecosystem with itself (all ratios 1)
        #[arg(long)]
        self_compare: bool,
    },
    /// Simulate each scenario and compare with the analytic metrics
    McValidate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Expected number of simulated studies per scenario
        #[arg(long, default_value_t = 1_000_000)]
        studies: u64,
        /// Independent random streams per scenario
        #[arg(long, default_value_t = 8)]
        replicas: usize,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest |z| counted as agreement
        #[arg(long, default_value_t = 3.0)]
        threshold: f64,
        /// Write one row per simulated study to mc_log_<scenario>.csv
        #[arg(long)]
        log: bool,
    },
    /// Write the full strategy grid of one scenario
    DumpGrid {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        resolution: Option<usize>,
    },
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            out,
            resolution,
            format,
            dump_grids,
        } => {
            let suite = ScenarioSuite::from_path(&config)?;
            let files = commands::run(
                &suite,
                RunOptions {
                    out,
                    resolution,
                    format,
                    dump_grids,
                },
            )?;
            println!("{} scenarios", suite.scenarios.len());
            report(&files);
        }
        Command::ReproduceTables {
            out,
            resolution,
            calibration,
            self_compare,
        } => {
            let calibration = match calibration {
                CalibrationArg::Reference => Calibration::REFERENCE,
                CalibrationArg::Stated => Calibration::STATED,
            };
            let files = commands::reproduce_tables(TableOptions {
                out,
                resolution,
                calibration,
                self_compare,
            })?;
            report(&files);
        }
        Command::McValidate {
            config,
            seed,
            studies,
            replicas,
            resolution,
            out,
            threshold,
            log,
        } => {
            let suite = ScenarioSuite::from_path(&config)?;
            let summary = commands::mc_validate(
                &suite,
                McOptions {
                    seed,
                    studies,
                    replicas,
                    resolution,
                    out,
                    threshold,
                    keep_log: log,
                },
            )?;
            for c in &summary.checks {
                println!(
                    "{} {} {}: simulated {:.6} +- {:.2e}, analytic {:.6}, z = {:.2}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.scenario,
                    c.metric,
                    c.estimate.value,
                    c.estimate.se,
                    c.analytic,
                    c.z
                );
            }
            let failed = summary.checks.iter().filter(|c| !c.pass).count();
            println!(
                "{} checks, {} outside |z| <= {}",
                summary.checks.len(),
                failed,
                threshold
            );
            report(&summary.files);
        }
        Command::DumpGrid {
            config,
            scenario,
            out,
            resolution,
        } => {
            let suite = ScenarioSuite::from_path(&config)?;
            commands::dump_grid(&suite, &scenario, &out, resolution)?;
            report(&[out]);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
