//! File formats: JSON readers for scenario/measurement/config inputs and
//! CSV/JSON writers for results.
//!
//! Scenario JSON:
//! `{"anchors": [[x1,x2], ...], "params": {"p0":..,"gamma":..,"d0":..,"sigma":..},
//!   "bounds": {"min":[x,y], "max":[x,y]}}`.
//! Measurements: a bare JSON array of dB numbers. Solver config:
//! `{"epsilon":..,"lambda":..,"n_max":..,"k":..,
//!   "t0_policy":{"type":"cost_scaled"|"fixed","value"?:..},"seed":..}`.
//!
//! Sweep CSV columns:
//! `setting_name,setting_value,method,rmse_m,mean_crlb_m,mean_runtime_s,trials`
//! (one row per setting and method; `mean_crlb_m` is empty when the CRLB
//! comparator is off). The JSON export mirrors [`SweepResult`] and parses
//! back to the identical structure.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rssloc_core::{MeasurementSet, SaaConfig, Scenario, SolveReport};

use crate::error::AppError;
use crate::harness::{SweepResult, TrialRecord};

fn read_to_string(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path).map_err(|e| AppError::io(path.display().to_string(), e))
}

/// Writes `content` to `path`, mapping failures to [`AppError::Io`].
pub fn write_string(path: &Path, content: &str) -> Result<(), AppError> {
    fs::write(path, content).map_err(|e| AppError::io(path.display().to_string(), e))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, AppError> {
    serde_json::from_str(text).map_err(|e| AppError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Loads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, AppError> {
    let scenario: Scenario = parse_json(path, &read_to_string(path)?)?;
    scenario.validate()?;
    Ok(scenario)
}

/// Loads a measurement file (length is checked against the scenario by the
/// caller).
pub fn load_measurements(path: &Path) -> Result<MeasurementSet, AppError> {
    parse_json(path, &read_to_string(path)?)
}

/// Loads and validates a solver configuration file.
pub fn load_config(path: &Path) -> Result<SaaConfig, AppError> {
    let config: SaaConfig = parse_json(path, &read_to_string(path)?)?;
    config.validate()?;
    Ok(config)
}

/// Renders sweep results as CSV (header plus one row per setting/method).
pub fn sweep_csv(results: &[SweepResult]) -> String {
    let mut out = String::from(
        "setting_name,setting_value,method,rmse_m,mean_crlb_m,mean_runtime_s,trials\n",
    );
    for r in results {
        for m in &r.methods {
            let crlb = r.mean_crlb_m.map(|c| c.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.setting_name,
                r.setting_value,
                m.method.as_str(),
                m.rmse_m,
                crlb,
                m.mean_runtime_s,
                r.trials
            );
        }
    }
    out
}

/// Renders sweep results as pretty JSON.
pub fn sweep_json(results: &[SweepResult]) -> String {
    serde_json::to_string_pretty(results).expect("sweep results serialize")
}

/// Parses a sweep JSON export back into results.
pub fn parse_sweep_json(text: &str) -> Result<Vec<SweepResult>, AppError> {
    serde_json::from_str(text).map_err(|e| AppError::Parse {
        path: "<sweep json>".into(),
        message: e.to_string(),
    })
}

/// Export format for sweep results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

/// Writes non-empty sweep results to `destination` in the given format.
pub fn export_results(
    results: &[SweepResult],
    format: ExportFormat,
    destination: &Path,
) -> Result<(), AppError> {
    if results.is_empty() {
        return Err(AppError::EmptyAggregate);
    }
    let content = match format {
        ExportFormat::Csv => sweep_csv(results),
        ExportFormat::Json => sweep_json(results),
    };
    write_string(destination, &content)
}

/// Renders a solve trace as CSV rows
/// `branch,iteration,x1,x2,cost,temperature`. Returns `None` when the
/// report carries no trace.
pub fn trace_csv(report: &SolveReport) -> Option<String> {
    let traces = report.trace.as_ref()?;
    let mut out = String::from("branch,iteration,x1,x2,cost,temperature\n");
    for (branch, rows) in [
        ("original", &traces.original),
        ("opposing", &traces.opposing),
    ] {
        for row in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                branch, row.iteration, row.position.x1, row.position.x2, row.cost, row.temperature
            );
        }
    }
    Some(out)
}

/// Renders cost-surface samples as CSV rows `x1,x2,cost`.
pub fn surface_csv(rows: &[(rssloc_core::Position, f64)]) -> String {
    let mut out = String::from("x1,x2,cost\n");
    for (p, cost) in rows {
        let _ = writeln!(out, "{},{},{}", p.x1, p.x2, cost);
    }
    out
}

/// Renders per-trial records as CSV, one row per trial. Disabled
/// comparators leave their columns empty.
pub fn trial_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(
        "trial_index,truth_x1,truth_x2,estimate_x1,estimate_x2,error_m,cost,winning_branch,lls_error_m,grid_error_m,grid_cost,crlb_m,runtime_s\n",
    );
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.trial_index,
            r.truth.x1,
            r.truth.x2,
            r.estimate.x1,
            r.estimate.x2,
            r.error,
            r.cost,
            r.winning_branch.as_str(),
            opt(r.lls_error),
            opt(r.grid_error),
            opt(r.grid_cost),
            opt(r.crlb),
            r.runtime
        );
    }
    out
}
