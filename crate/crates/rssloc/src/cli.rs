//! The `rssloc` command line.
//!
//! Subcommands: `localize` (one instance from files or a simulated target),
//! `sweep` (RMSE versus sigma or anchor count), `tune` (solver parameter
//! tables), `oracle-compare` (solver cost versus the grid oracle) and
//! `surface` (ML cost lattice dump).
//!
//! Exit codes: 0 success, 2 input/validation error, 3 geometry/numeric
//! error, 4 I/O error. All randomness derives from `--seed`, so reruns
//! with the same arguments reproduce every data column byte for byte
//! (wall-clock runtime columns excepted).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rssloc_core::{
    cost_surface, generate_measurements, localize, localize_traced, Branch, GridSpec,
    MeasurementSet, Position, SaaConfig, Scenario, Stream,
};

use crate::error::AppError;
use crate::formats;
use crate::harness::{
    oracle_compare, run_sweep_detailed, run_tune, Comparators, ExperimentSpec, SweepParam,
    TuneTable,
};

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "rssloc",
    version,
    about = "RSS-based localization: opposition-based simulated annealing with baselines and bounds",
    after_help = "Model defaults: P0 = 10 dB, gamma = 3, d0 = 1 m, search area [0,40] x [0,40] m.\n\
                  Solver defaults: epsilon = 0.9, lambda = 0.4, n_max = 500 (the recommended operating point).\n\
                  All randomness is seeded; the default seed is 42."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one localization instance and print the report as JSON.
    Localize(LocalizeArgs),
    /// Monte-Carlo RMSE sweep over sigma or the anchor count.
    Sweep(SweepArgs),
    /// RMSE/runtime table for one solver control over its grid.
    Tune(TuneArgs),
    /// Compare solver cost against the exhaustive grid oracle.
    OracleCompare(OracleCompareArgs),
    /// Dump the ML cost on a lattice over the scenario bounds.
    Surface(SurfaceArgs),
}

fn parse_position(text: &str) -> Result<Position, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err("expected two comma-separated coordinates, e.g. 12.5,30".into());
    }
    let x1: f64 = parts[0].trim().parse().map_err(|_| "bad x1 coordinate")?;
    let x2: f64 = parts[1].trim().parse().map_err(|_| "bad x2 coordinate")?;
    Ok(Position::new(x1, x2))
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    /// Scenario JSON file (anchors, path-loss params, bounds).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Measurement JSON file (array of dB readings, one per anchor).
    #[arg(
        long,
        conflicts_with = "simulate",
        required_unless_present = "simulate"
    )]
    pub measurements: Option<PathBuf>,
    /// Generate the measurements instead of reading them (needs --target).
    #[arg(long, requires = "target")]
    pub simulate: bool,
    /// True target position "x1,x2" for --simulate.
    #[arg(long, value_parser = parse_position)]
    pub target: Option<Position>,
    /// Solver config JSON file; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Random seed; overrides the config file's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the per-iteration trace of both branches to this CSV file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Vary {
    /// Sweep the noise standard deviation.
    Sigma,
    /// Sweep the anchor count.
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComparatorArg {
    Lls,
    GridOracle,
    Crlb,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Which variable the sweep walks.
    #[arg(long, value_enum)]
    pub vary: Vary,
    /// Sweep values, strictly increasing (e.g. 1,2,3,4,5,6).
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    /// Monte-Carlo trials per sweep point.
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    /// Master seed for all trial streams.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Anchor count when sweeping sigma.
    #[arg(long, default_value_t = 10)]
    pub n_anchors: usize,
    /// Noise sigma (dB) when sweeping the anchor count.
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,
    /// Output base path: writes <out>.csv and <out>.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Comparators to run alongside the solver.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ComparatorArg::Crlb])]
    pub comparators: Vec<ComparatorArg>,
    /// Also write one CSV row per trial to <out>_trials.csv.
    #[arg(long)]
    pub dump_trials: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    #[value(name = "epsilon")]
    Epsilon,
    #[value(name = "lambda")]
    Lambda,
    #[value(name = "n_max", alias = "n-max")]
    NMax,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    /// Which control to sweep over its grid.
    #[arg(long, value_enum)]
    pub table: TableArg,
    /// Monte-Carlo trials per grid value.
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OracleCompareArgs {
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 10)]
    pub n_anchors: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Coarse grid pitch for the oracle, meters.
    #[arg(long, default_value_t = 0.4)]
    pub resolution: f64,
    #[arg(long, default_value_t = 2)]
    pub refine_levels: u32,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub measurements: PathBuf,
    /// Lattice pitch, meters.
    #[arg(long)]
    pub pitch: f64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

/// JSON shape printed by `localize`.
#[derive(Debug, Serialize)]
struct LocalizeOutput {
    estimate: Position,
    cost: f64,
    winning_branch: Branch,
    branch_costs: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<Position>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_m: Option<f64>,
}

/// Runs a parsed command line to completion.
pub fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Localize(args) => cmd_localize(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Tune(args) => cmd_tune(args),
        Command::OracleCompare(args) => cmd_oracle_compare(args),
        Command::Surface(args) => cmd_surface(args),
    }
}

fn load_checked_measurements(
    path: &std::path::Path,
    scenario: &Scenario,
) -> Result<MeasurementSet, AppError> {
    let meas = formats::load_measurements(path)?;
    meas.validate(scenario)?;
    Ok(meas)
}

/// Rejects an output destination whose directory does not exist, before
/// any computation starts.
fn check_destination(path: &std::path::Path) -> Result<(), AppError> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = parent {
        if !dir.is_dir() {
            return Err(AppError::io(
                path.display().to_string(),
                std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("directory {} does not exist", dir.display()),
                ),
            ));
        }
    }
    Ok(())
}

fn cmd_localize(args: LocalizeArgs) -> Result<(), AppError> {
    if let Some(trace_path) = &args.trace {
        check_destination(trace_path)?;
    }
    let scenario = formats::load_scenario(&args.scenario)?;
    let config = match &args.config {
        Some(path) => formats::load_config(path)?,
        None => SaaConfig::default(),
    };
    let seed = args.seed.unwrap_or(config.seed);
    let mut rng = Stream::from_seed(seed);

    let (meas, truth) = if args.simulate {
        let target = args.target.expect("clap enforces --target with --simulate");
        let meas = generate_measurements(&scenario, &target, &mut rng)?;
        (meas, Some(target))
    } else {
        let path = args.measurements.as_ref().expect("clap enforces the pair");
        (load_checked_measurements(path, &scenario)?, None)
    };

    let report = if args.trace.is_some() {
        localize_traced(&scenario, &meas, &config, &mut rng)
    } else {
        localize(&scenario, &meas, &config, &mut rng)
    };
    if let Some(trace_path) = &args.trace {
        let csv = formats::trace_csv(&report).expect("traced solve carries a trace");
        formats::write_string(trace_path, &csv)?;
    }

    let output = LocalizeOutput {
        estimate: report.estimate,
        cost: report.cost,
        winning_branch: report.winning_branch,
        branch_costs: report.branch_costs,
        truth,
        error_m: truth.map(|t| report.estimate.distance_to(&t)),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&output).expect("report serializes")
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), AppError> {
    check_destination(&args.out)?;
    if args.values.is_empty() {
        return Err(AppError::Invalid("sweep values must be non-empty".into()));
    }
    if !args.values.windows(2).all(|w| w[0] < w[1]) {
        return Err(AppError::Invalid(
            "sweep values must be strictly increasing".into(),
        ));
    }

    let mut spec = ExperimentSpec::fixed(args.sigma, args.n_anchors, args.trials, args.seed);
    match args.vary {
        Vary::Sigma => spec.sigma = SweepParam::Sweep(args.values.clone()),
        Vary::N => {
            let counts: Result<Vec<usize>, AppError> = args
                .values
                .iter()
                .map(|&v| {
                    if v.fract() == 0.0 && v >= 1.0 {
                        Ok(v as usize)
                    } else {
                        Err(AppError::Invalid(format!(
                            "anchor counts must be integers >= 1, got {v}"
                        )))
                    }
                })
                .collect();
            spec.n_anchors = SweepParam::Sweep(counts?);
        }
    }
    spec.comparators = Comparators {
        lls: args.comparators.contains(&ComparatorArg::Lls),
        grid_oracle: args.comparators.contains(&ComparatorArg::GridOracle),
        crlb: args.comparators.contains(&ComparatorArg::Crlb),
    };

    let (results, records) = run_sweep_detailed(&spec)?;

    let csv_path = args.out.with_extension("csv");
    let json_path = args.out.with_extension("json");
    formats::write_string(&csv_path, &formats::sweep_csv(&results))?;
    formats::write_string(&json_path, &formats::sweep_json(&results))?;
    if args.dump_trials {
        let mut trials_name = args
            .out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "sweep".into());
        trials_name.push_str("_trials.csv");
        let trials_path = args.out.with_file_name(trials_name);
        let all: Vec<_> = records.into_iter().flatten().collect();
        formats::write_string(&trials_path, &formats::trial_csv(&all))?;
    }

    // Summary to stdout; same table the CSV holds.
    print!("{}", formats::sweep_csv(&results));
    Ok(())
}

fn cmd_tune(args: TuneArgs) -> Result<(), AppError> {
    let table = match args.table {
        TableArg::Epsilon => TuneTable::Epsilon,
        TableArg::Lambda => TuneTable::Lambda,
        TableArg::NMax => TuneTable::NMax,
    };
    let rows = run_tune(table, args.trials, args.seed)?;
    println!("table,value,rmse_m,mean_runtime_s,trials");
    for row in rows {
        println!(
            "{},{},{},{},{}",
            table.as_str(),
            row.value,
            row.rmse_m,
            row.mean_runtime_s,
            args.trials
        );
    }
    Ok(())
}

fn cmd_oracle_compare(args: OracleCompareArgs) -> Result<(), AppError> {
    let grid = GridSpec {
        resolution: args.resolution,
        refine_levels: args.refine_levels,
    };
    grid.validate()?;
    let summary = oracle_compare(args.trials, args.sigma, args.n_anchors, args.seed, grid)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    );
    Ok(())
}

fn cmd_surface(args: SurfaceArgs) -> Result<(), AppError> {
    if !(args.pitch > 0.0 && args.pitch.is_finite()) {
        return Err(AppError::Invalid("pitch must be positive".into()));
    }
    check_destination(&args.out)?;
    let scenario = formats::load_scenario(&args.scenario)?;
    let meas = load_checked_measurements(&args.measurements, &scenario)?;
    let rows = cost_surface(&scenario, &meas, args.pitch);
    formats::write_string(&args.out, &formats::surface_csv(&rows))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn target_positions_parse() {
        assert_eq!(
            parse_position("12.5,30").unwrap(),
            Position::new(12.5, 30.0)
        );
        assert_eq!(
            parse_position(" 1 , -2 ").unwrap(),
            Position::new(1.0, -2.0)
        );
        assert!(parse_position("12.5").is_err());
        assert!(parse_position("a,b").is_err());
    }
}
