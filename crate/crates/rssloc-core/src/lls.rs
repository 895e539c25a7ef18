//! Squared-range linear least-squares baseline.
//!
//! Each reading is inverted to a range estimate through the noise-free
//! path-loss model, giving one squared-range equation per anchor:
//!
//! ```text
//! ||x||^2 - 2 a_i . x + ||a_i||^2 = r_i        (r_i = range_i^2)
//! ```
//!
//! Subtracting the anchor-averaged equation cancels the `||x||^2` term and
//! leaves a linear system `A x = b` with rows `2 (a_i - mean(a))`, solved in
//! least squares via the 2x2 normal equations. Exact on noise-free data;
//! a sanity baseline, not a serious estimator, so all anchors get equal
//! weight.

use crate::error::Error;
use crate::model::{range_estimate, MeasurementSet, Position, Scenario};

/// Relative determinant floor below which the anchor geometry is treated
/// as collinear.
const RANK_TOLERANCE: f64 = 1e-12;

/// Closed-form linearized position estimate. No bounds clamping.
///
/// Errors with [`Error::DegenerateGeometry`] when the anchors are collinear
/// (or there are fewer than three of them), and
/// [`Error::DimensionMismatch`] when the reading count is off.
pub fn lls_estimate(scenario: &Scenario, meas: &MeasurementSet) -> Result<Position, Error> {
    let n = scenario.anchor_count();
    if meas.p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: meas.p.len(),
        });
    }

    let nf = n as f64;
    let mut mean_a1 = 0.0;
    let mut mean_a2 = 0.0;
    let mut mean_norm_sq = 0.0;
    let mut mean_range_sq = 0.0;
    for (anchor, &p_i) in scenario.anchors.iter().zip(&meas.p) {
        mean_a1 += anchor.x1;
        mean_a2 += anchor.x2;
        mean_norm_sq += anchor.x1 * anchor.x1 + anchor.x2 * anchor.x2;
        let r = range_estimate(p_i, &scenario.params);
        mean_range_sq += r * r;
    }
    mean_a1 /= nf;
    mean_a2 /= nf;
    mean_norm_sq /= nf;
    mean_range_sq /= nf;

    // Normal equations of A x = b with rows A_i = 2 (a_i - mean(a)) and
    // b_i = ||a_i||^2 - mean(||a||^2) - r_i + mean(r).
    let mut m11 = 0.0;
    let mut m12 = 0.0;
    let mut m22 = 0.0;
    let mut v1 = 0.0;
    let mut v2 = 0.0;
    for (anchor, &p_i) in scenario.anchors.iter().zip(&meas.p) {
        let c1 = 2.0 * (anchor.x1 - mean_a1);
        let c2 = 2.0 * (anchor.x2 - mean_a2);
        let range = range_estimate(p_i, &scenario.params);
        let b = anchor.x1 * anchor.x1 + anchor.x2 * anchor.x2 - mean_norm_sq - range * range
            + mean_range_sq;
        m11 += c1 * c1;
        m12 += c1 * c2;
        m22 += c2 * c2;
        v1 += c1 * b;
        v2 += c2 * b;
    }

    let scale = m11.max(m22);
    let det = m11 * m22 - m12 * m12;
    if scale <= 0.0 || det.abs() <= RANK_TOLERANCE * scale * scale {
        return Err(Error::DegenerateGeometry);
    }
    Ok(Position {
        x1: (m22 * v1 - m12 * v2) / det,
        x2: (m11 * v2 - m12 * v1) / det,
    })
}
