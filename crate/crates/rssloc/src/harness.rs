//! Monte-Carlo evaluation harness.
//!
//! A batch is described by an [`ExperimentSpec`]: area, anchor count and
//! noise level (one of which may sweep over a list), path-loss parameters,
//! solver configuration, comparators and a master seed. Each trial draws a
//! fresh geometry, generates measurements, runs the solver and the enabled
//! comparators, and records errors and wall-clock runtimes.
//!
//! Reproducibility: all of a trial's randomness derives from
//! `(master_seed, sigma, n_anchors, trial_index)`, so trials can run in any
//! order or in parallel and aggregate to bit-identical results; only the
//! runtime fields vary between runs. Aggregation always walks the records
//! in trial order.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rssloc_core::{
    crlb_rmse, generate_measurements, grid_oracle, lls_estimate, localize, Bounds, GridSpec,
    PathLossParams, Position, RandomSource, SaaConfig, Scenario, Stream,
};

use crate::error::AppError;

/// Placement redraw budget per trial before giving up.
const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

/// Minimum anchor-target separation when drawing geometries, meters.
const MIN_SEPARATION: f64 = 0.1;

/// A parameter that is either fixed or swept over a list.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepParam<T> {
    Fixed(T),
    Sweep(Vec<T>),
}

impl<T: Copy> SweepParam<T> {
    fn values(&self) -> Vec<T> {
        match self {
            SweepParam::Fixed(v) => vec![*v],
            SweepParam::Sweep(vs) => vs.clone(),
        }
    }

    fn is_sweep(&self) -> bool {
        matches!(self, SweepParam::Sweep(_))
    }
}

/// Which comparators run alongside the solver in each trial.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Comparators {
    pub lls: bool,
    pub grid_oracle: bool,
    pub crlb: bool,
}

/// One full Monte-Carlo experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub area: Bounds,
    pub n_anchors: SweepParam<usize>,
    pub sigma: SweepParam<f64>,
    /// Base path-loss parameters; the sigma field is overridden by the
    /// per-setting noise level.
    pub params: PathLossParams,
    pub trials: usize,
    pub master_seed: u64,
    pub solver: SaaConfig,
    pub comparators: Comparators,
    /// Grid-oracle controls, used when that comparator is enabled.
    pub grid: GridSpec,
}

impl ExperimentSpec {
    /// Fixed-point experiment at the default operating area and path-loss
    /// parameters.
    pub fn fixed(sigma: f64, n_anchors: usize, trials: usize, master_seed: u64) -> Self {
        ExperimentSpec {
            area: Bounds::square40(),
            n_anchors: SweepParam::Fixed(n_anchors),
            sigma: SweepParam::Fixed(sigma),
            params: PathLossParams::default(),
            trials,
            master_seed,
            solver: SaaConfig::default(),
            comparators: Comparators::default(),
            grid: GridSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<(), AppError> {
        self.area.validate()?;
        self.params.validate()?;
        self.solver.validate()?;
        self.grid.validate()?;
        if self.trials < 1 {
            return Err(AppError::Invalid("trials must be >= 1".into()));
        }
        if self.n_anchors.is_sweep() && self.sigma.is_sweep() {
            return Err(AppError::Invalid(
                "at most one of n_anchors/sigma may sweep".into(),
            ));
        }
        for &n in &self.n_anchors.values() {
            if n < 1 {
                return Err(AppError::Invalid("n_anchors must be >= 1".into()));
            }
        }
        for &s in &self.sigma.values() {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(AppError::Invalid("sigma must be finite and >= 0".into()));
            }
        }
        Ok(())
    }

    /// The (axis, setting) pairs this spec expands to, in declaration
    /// order.
    pub fn settings(&self) -> Vec<(SweepAxis, Setting)> {
        if self.sigma.is_sweep() {
            self.sigma
                .values()
                .into_iter()
                .map(|s| {
                    (
                        SweepAxis::Sigma,
                        Setting {
                            sigma: s,
                            n_anchors: self.n_anchors.values()[0],
                        },
                    )
                })
                .collect()
        } else if self.n_anchors.is_sweep() {
            self.n_anchors
                .values()
                .into_iter()
                .map(|n| {
                    (
                        SweepAxis::Anchors,
                        Setting {
                            sigma: self.sigma.values()[0],
                            n_anchors: n,
                        },
                    )
                })
                .collect()
        } else {
            vec![(
                SweepAxis::Sigma,
                Setting {
                    sigma: self.sigma.values()[0],
                    n_anchors: self.n_anchors.values()[0],
                },
            )]
        }
    }
}

/// The swept variable of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Sigma,
    Anchors,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::Sigma => "sigma",
            SweepAxis::Anchors => "n_anchors",
        }
    }
}

/// One sweep point: the concrete noise level and anchor count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setting {
    pub sigma: f64,
    pub n_anchors: usize,
}

impl Setting {
    /// Stream-derivation ids: the trial stream is a pure function of
    /// (master_seed, sigma bits, anchor count, trial index).
    fn stream_ids(&self, trial_index: usize) -> [u64; 3] {
        [
            self.sigma.to_bits(),
            self.n_anchors as u64,
            trial_index as u64,
        ]
    }
}

/// An estimation method named in exported results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    OblSaa,
    Lls,
    GridOracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::OblSaa => "obl-saa",
            Method::Lls => "lls",
            Method::GridOracle => "grid-oracle",
        }
    }
}

/// Everything recorded about one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub truth: Position,
    pub estimate: Position,
    /// Solver localization error, meters.
    pub error: f64,
    /// Solver final cost.
    pub cost: f64,
    pub winning_branch: rssloc_core::Branch,
    pub lls_error: Option<f64>,
    pub grid_error: Option<f64>,
    pub grid_cost: Option<f64>,
    /// Cramér-Rao RMSE floor at the truth, meters.
    pub crlb: Option<f64>,
    /// Wall-clock seconds of the localize call alone.
    pub runtime: f64,
    pub lls_runtime: Option<f64>,
    pub grid_runtime: Option<f64>,
}

/// Root mean squared error of a non-empty error sequence.
pub fn rmse(errors: &[f64]) -> Result<f64, AppError> {
    if errors.is_empty() {
        return Err(AppError::EmptyAggregate);
    }
    let sum_sq: f64 = errors.iter().map(|e| e * e).sum();
    Ok((sum_sq / errors.len() as f64).sqrt())
}

/// Runs one trial: derive the trial stream, draw a geometry (redrawing the
/// whole placement while any anchor sits closer than 0.1 m to the target),
/// generate measurements, localize, then run the enabled comparators.
pub fn run_trial(
    spec: &ExperimentSpec,
    setting: Setting,
    trial_index: usize,
) -> Result<TrialRecord, AppError> {
    let mut rng = Stream::derive(spec.master_seed, &setting.stream_ids(trial_index));
    let params = PathLossParams {
        sigma: setting.sigma,
        ..spec.params
    };

    let mut attempts = 0;
    let (scenario, truth) = loop {
        attempts += 1;
        if attempts > MAX_PLACEMENT_ATTEMPTS {
            return Err(AppError::PlacementFailed {
                attempts: MAX_PLACEMENT_ATTEMPTS,
                setting: format!("sigma={}, n={}", setting.sigma, setting.n_anchors),
                trial: trial_index,
            });
        }
        let mut anchors = Vec::with_capacity(setting.n_anchors);
        for _ in 0..setting.n_anchors {
            anchors.push(spec.area.lerp(rng.uniform(), rng.uniform()));
        }
        let target = spec.area.lerp(rng.uniform(), rng.uniform());
        if anchors
            .iter()
            .any(|a| a.distance_to(&target) < MIN_SEPARATION)
        {
            continue;
        }
        break (Scenario::new(anchors, params, spec.area), target);
    };

    let meas = generate_measurements(&scenario, &truth, &mut rng)?;

    let started = Instant::now();
    let report = localize(&scenario, &meas, &spec.solver, &mut rng);
    let runtime = started.elapsed().as_secs_f64();

    let (mut lls_error, mut lls_runtime) = (None, None);
    if spec.comparators.lls {
        let started = Instant::now();
        let estimate = lls_estimate(&scenario, &meas)?;
        lls_runtime = Some(started.elapsed().as_secs_f64());
        lls_error = Some(estimate.distance_to(&truth));
    }

    let (mut grid_error, mut grid_cost, mut grid_runtime) = (None, None, None);
    if spec.comparators.grid_oracle {
        let started = Instant::now();
        let (estimate, cost) = grid_oracle(&scenario, &meas, &spec.grid);
        grid_runtime = Some(started.elapsed().as_secs_f64());
        grid_error = Some(estimate.distance_to(&truth));
        grid_cost = Some(cost);
    }

    let crlb = if spec.comparators.crlb {
        Some(crlb_rmse(&scenario, &truth)?)
    } else {
        None
    };

    Ok(TrialRecord {
        trial_index,
        truth,
        estimate: report.estimate,
        error: report.estimate.distance_to(&truth),
        cost: report.cost,
        winning_branch: report.winning_branch,
        lls_error,
        grid_error,
        grid_cost,
        crlb,
        runtime,
        lls_runtime,
        grid_runtime,
    })
}

/// Per-method aggregate at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodStats {
    pub method: Method,
    pub rmse_m: f64,
    pub mean_runtime_s: f64,
}

/// Aggregates for one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub setting_name: String,
    pub setting_value: f64,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_crlb_m: Option<f64>,
    pub methods: Vec<MethodStats>,
}

fn aggregate(
    axis: SweepAxis,
    setting: Setting,
    comparators: Comparators,
    records: &[TrialRecord],
) -> Result<SweepResult, AppError> {
    let errors: Vec<f64> = records.iter().map(|r| r.error).collect();
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let mut methods = vec![MethodStats {
        method: Method::OblSaa,
        rmse_m: rmse(&errors)?,
        mean_runtime_s: mean(&records.iter().map(|r| r.runtime).collect::<Vec<_>>()),
    }];
    if comparators.lls {
        let errs: Vec<f64> = records.iter().filter_map(|r| r.lls_error).collect();
        let times: Vec<f64> = records.iter().filter_map(|r| r.lls_runtime).collect();
        methods.push(MethodStats {
            method: Method::Lls,
            rmse_m: rmse(&errs)?,
            mean_runtime_s: mean(&times),
        });
    }
    if comparators.grid_oracle {
        let errs: Vec<f64> = records.iter().filter_map(|r| r.grid_error).collect();
        let times: Vec<f64> = records.iter().filter_map(|r| r.grid_runtime).collect();
        methods.push(MethodStats {
            method: Method::GridOracle,
            rmse_m: rmse(&errs)?,
            mean_runtime_s: mean(&times),
        });
    }
    let mean_crlb_m = if comparators.crlb {
        let bounds: Vec<f64> = records.iter().filter_map(|r| r.crlb).collect();
        if bounds.is_empty() {
            return Err(AppError::EmptyAggregate);
        }
        Some(mean(&bounds))
    } else {
        None
    };
    let setting_value = match axis {
        SweepAxis::Sigma => setting.sigma,
        SweepAxis::Anchors => setting.n_anchors as f64,
    };
    Ok(SweepResult {
        setting_name: axis.as_str().to_string(),
        setting_value,
        trials: records.len(),
        mean_crlb_m,
        methods,
    })
}

/// Runs all trials of every sweep point, in parallel, and aggregates in
/// trial order. Also returns the raw per-trial records per setting (in the
/// settings' order) for trial-level export.
pub fn run_sweep_detailed(
    spec: &ExperimentSpec,
) -> Result<(Vec<SweepResult>, Vec<Vec<TrialRecord>>), AppError> {
    spec.validate()?;
    let mut results = Vec::new();
    let mut all_records = Vec::new();
    for (axis, setting) in spec.settings() {
        let outcomes: Vec<Result<TrialRecord, AppError>> = (0..spec.trials)
            .into_par_iter()
            .map(|trial_index| run_trial(spec, setting, trial_index))
            .collect();
        // Surface the lowest-index failure deterministically, tagged with
        // its sweep point.
        let mut records = Vec::with_capacity(outcomes.len());
        for (trial, outcome) in outcomes.into_iter().enumerate() {
            records.push(outcome.map_err(|e| match e {
                already_tagged @ AppError::PlacementFailed { .. } => already_tagged,
                other => AppError::Trial {
                    setting: format!("sigma={}, n={}", setting.sigma, setting.n_anchors),
                    trial,
                    source: Box::new(other),
                },
            })?);
        }
        results.push(aggregate(axis, setting, spec.comparators, &records)?);
        all_records.push(records);
    }
    Ok((results, all_records))
}

/// Runs the experiment and returns one aggregate per sweep point.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepResult>, AppError> {
    run_sweep_detailed(spec).map(|(results, _)| results)
}

/// Which solver control the tuning table varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuneTable {
    Epsilon,
    Lambda,
    NMax,
}

impl TuneTable {
    pub fn as_str(&self) -> &'static str {
        match self {
            TuneTable::Epsilon => "epsilon",
            TuneTable::Lambda => "lambda",
            TuneTable::NMax => "n_max",
        }
    }
}

/// The tuning grids. Off-table controls stay at the defaults
/// (epsilon 0.9, lambda 0.4, n_max 500) with N = 10 anchors and
/// sigma = 2 dB.
pub const EPSILON_GRID: [f64; 6] = [0.2, 0.4, 0.6, 0.8, 0.9, 0.95];
pub const LAMBDA_GRID: [f64; 6] = [0.2, 0.3, 0.4, 0.5, 0.6, 0.8];
pub const N_MAX_GRID: [u32; 6] = [200, 300, 400, 500, 600, 800];

/// One row of a tuning table.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneRow {
    pub value: f64,
    pub rmse_m: f64,
    pub mean_runtime_s: f64,
}

/// Sweeps one solver control over its grid. Trials share geometry and
/// noise across grid values (the trial stream does not depend on the
/// solver config), so rows are paired comparisons.
pub fn run_tune(
    table: TuneTable,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<TuneRow>, AppError> {
    let mut rows = Vec::new();
    let values: Vec<f64> = match table {
        TuneTable::Epsilon => EPSILON_GRID.to_vec(),
        TuneTable::Lambda => LAMBDA_GRID.to_vec(),
        TuneTable::NMax => N_MAX_GRID.iter().map(|&n| n as f64).collect(),
    };
    for value in values {
        let mut spec = ExperimentSpec::fixed(2.0, 10, trials, master_seed);
        match table {
            TuneTable::Epsilon => spec.solver.epsilon = value,
            TuneTable::Lambda => spec.solver.lambda = value,
            TuneTable::NMax => spec.solver.n_max = value as u32,
        }
        let results = run_sweep(&spec)?;
        let stats = &results[0].methods[0];
        rows.push(TuneRow {
            value,
            rmse_m: stats.rmse_m,
            mean_runtime_s: stats.mean_runtime_s,
        });
    }
    Ok(rows)
}

/// Outcome of a solver-versus-grid-oracle comparison batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub trials: usize,
    pub sigma: f64,
    pub n_anchors: usize,
    /// Fraction of trials whose solver cost is within 5% of the oracle's.
    pub matched_fraction: f64,
    pub mean_cost_obl_saa: f64,
    pub mean_cost_grid_oracle: f64,
    pub mean_error_obl_saa_m: f64,
    pub mean_error_grid_oracle_m: f64,
}

/// Runs `trials` trials with the grid oracle enabled and summarizes how
/// often the solver's final cost stays within 5% of the brute-force
/// minimum.
pub fn oracle_compare(
    trials: usize,
    sigma: f64,
    n_anchors: usize,
    master_seed: u64,
    grid: GridSpec,
) -> Result<OracleComparison, AppError> {
    let mut spec = ExperimentSpec::fixed(sigma, n_anchors, trials, master_seed);
    spec.comparators.grid_oracle = true;
    spec.grid = grid;
    let (_, mut records) = run_sweep_detailed(&spec)?;
    let records = records.remove(0);
    let n = records.len() as f64;
    let matched = records
        .iter()
        .filter(|r| r.cost <= 1.05 * r.grid_cost.expect("oracle enabled"))
        .count();
    Ok(OracleComparison {
        trials: records.len(),
        sigma,
        n_anchors,
        matched_fraction: matched as f64 / n,
        mean_cost_obl_saa: records.iter().map(|r| r.cost).sum::<f64>() / n,
        mean_cost_grid_oracle: records.iter().filter_map(|r| r.grid_cost).sum::<f64>() / n,
        mean_error_obl_saa_m: records.iter().map(|r| r.error).sum::<f64>() / n,
        mean_error_grid_oracle_m: records.iter().filter_map(|r| r.grid_error).sum::<f64>() / n,
    })
}
