//! Exhaustive grid search over the ML cost.
//!
//! Serves two jobs: an implementation-independent comparator for the
//! annealer (a brute-force minimizer of the same cost) and the raw data
//! behind cost-surface plots.

use alloc::vec::Vec;

use crate::error::Error;
use crate::model::{ml_cost, MeasurementSet, Position, Scenario};

/// Grid-search controls.
///
/// The search first scans the full bounds at `resolution`, then runs
/// `refine_levels` rounds that re-grid the 3x3-cell neighborhood of the
/// incumbent at one tenth of the previous pitch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Coarse lattice pitch, meters (> 0).
    pub resolution: f64,
    pub refine_levels: u32,
}

impl Default for GridSpec {
    /// 0.4 m over a 40 m box (101 x 101 lattice), two refinement rounds:
    /// under 20k cost evaluations, final pitch 4 mm.
    fn default() -> Self {
        GridSpec {
            resolution: 0.4,
            refine_levels: 2,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::InvalidParameter { name: "resolution" });
        }
        Ok(())
    }
}

/// Lattice coordinates `lo + i * pitch` for `i = 0..=n`, where `n` is the
/// largest index with `lo + n * pitch <= hi` (up to a tiny slack so an
/// exactly divisible span includes `hi`).
fn axis_count(lo: f64, hi: f64, pitch: f64) -> u64 {
    (libm::floor((hi - lo) / pitch + 1e-9)) as u64
}

/// Scans a lattice in x1-major order (x2 varies fastest), keeping the first
/// strict minimum. Returns the running best.
fn scan_window(
    scenario: &Scenario,
    meas: &MeasurementSet,
    lo: Position,
    hi: Position,
    pitch: f64,
    mut best: Option<(Position, f64)>,
) -> (Position, f64) {
    let n1 = axis_count(lo.x1, hi.x1, pitch);
    let n2 = axis_count(lo.x2, hi.x2, pitch);
    for i in 0..=n1 {
        let x1 = lo.x1 + i as f64 * pitch;
        for j in 0..=n2 {
            let x2 = lo.x2 + j as f64 * pitch;
            let p = Position::new(x1, x2);
            let cost = ml_cost(&p, scenario, meas);
            match best {
                Some((_, best_cost)) if cost >= best_cost => {}
                _ => best = Some((p, cost)),
            }
        }
    }
    best.expect("lattice has at least one point")
}

/// Brute-force minimizer of the ML cost over the scenario bounds.
///
/// Fully deterministic: scan order is fixed and ties keep the earlier
/// point, so the result does not depend on how the work is scheduled.
pub fn grid_oracle(scenario: &Scenario, meas: &MeasurementSet, grid: &GridSpec) -> (Position, f64) {
    let bounds = &scenario.bounds;
    let mut best = scan_window(
        scenario,
        meas,
        bounds.min,
        bounds.max,
        grid.resolution,
        None,
    );
    let mut pitch = grid.resolution;
    for _ in 0..grid.refine_levels {
        let center = best.0;
        let lo = bounds.clamp(&Position::new(center.x1 - pitch, center.x2 - pitch));
        let hi = bounds.clamp(&Position::new(center.x1 + pitch, center.x2 + pitch));
        pitch /= 10.0;
        best = scan_window(scenario, meas, lo, hi, pitch, Some(best));
    }
    best
}

/// Evaluates the ML cost on the full-bounds lattice of the given pitch, in
/// scan order. Both axis endpoints are included when the span divides the
/// pitch exactly.
pub fn cost_surface(
    scenario: &Scenario,
    meas: &MeasurementSet,
    pitch: f64,
) -> Vec<(Position, f64)> {
    let bounds = &scenario.bounds;
    let n1 = axis_count(bounds.min.x1, bounds.max.x1, pitch);
    let n2 = axis_count(bounds.min.x2, bounds.max.x2, pitch);
    let mut rows = Vec::with_capacity(((n1 + 1) * (n2 + 1)) as usize);
    for i in 0..=n1 {
        let x1 = bounds.min.x1 + i as f64 * pitch;
        for j in 0..=n2 {
            let x2 = bounds.min.x2 + j as f64 * pitch;
            let p = Position::new(x1, x2);
            rows.push((p, ml_cost(&p, scenario, meas)));
        }
    }
    rows
}
