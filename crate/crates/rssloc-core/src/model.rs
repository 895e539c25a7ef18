//! Log-distance path-loss model: geometry, RSS generation and the ML cost.
//!
//! An anchor at `a` observes the target at `x` with received power
//!
//! ```text
//! P = P0 - 10 * gamma * log10(||x - a|| / d0) + n,    n ~ N(0, sigma^2)
//! ```
//!
//! all powers in dB, all distances in meters. The maximum-likelihood target
//! position minimizes the sum of squared dB residuals ([`ml_cost`]); with a
//! common sigma across anchors the 1/sigma^2 weights drop out of the argmin.

use alloc::vec::Vec;

use crate::error::Error;
use crate::rng::RandomSource;
use crate::solver::Bounds;

/// Distance floor applied inside [`ml_cost`] so the solver can evaluate any
/// proposal, including one that lands exactly on an anchor.
pub const MIN_COST_DISTANCE: f64 = 1e-6;

/// A 2-D point, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(from = "[f64; 2]", into = "[f64; 2]"))]
pub struct Position {
    pub x1: f64,
    pub x2: f64,
}

impl Position {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Position { x1, x2 }
    }

    /// Euclidean distance to `other`.
    pub fn distance_to(&self, other: &Position) -> f64 {
        let dx = self.x1 - other.x1;
        let dy = self.x2 - other.x2;
        libm::sqrt(dx * dx + dy * dy)
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

impl From<[f64; 2]> for Position {
    fn from(v: [f64; 2]) -> Self {
        Position { x1: v[0], x2: v[1] }
    }
}

impl From<Position> for [f64; 2] {
    fn from(p: Position) -> Self {
        [p.x1, p.x2]
    }
}

/// Log-distance path-loss parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathLossParams {
    /// Reference received power at distance `d0`, dB.
    pub p0: f64,
    /// Path-loss exponent, dimensionless (> 0).
    pub gamma: f64,
    /// Reference distance, meters (> 0).
    pub d0: f64,
    /// Standard deviation of the dB measurement noise, common to all
    /// anchors (>= 0).
    pub sigma: f64,
}

impl PathLossParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.p0.is_finite()) {
            return Err(Error::InvalidParameter { name: "p0" });
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter { name: "gamma" });
        }
        if !(self.d0 > 0.0 && self.d0.is_finite()) {
            return Err(Error::InvalidParameter { name: "d0" });
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter { name: "sigma" });
        }
        Ok(())
    }
}

impl Default for PathLossParams {
    /// P0 = 10 dB, gamma = 3, d0 = 1 m, sigma = 2 dB.
    fn default() -> Self {
        PathLossParams {
            p0: 10.0,
            gamma: 3.0,
            d0: 1.0,
            sigma: 2.0,
        }
    }
}

/// One localization instance: anchor layout, path-loss parameters and the
/// search region.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scenario {
    pub anchors: Vec<Position>,
    pub params: PathLossParams,
    pub bounds: Bounds,
}

impl Scenario {
    pub fn new(anchors: Vec<Position>, params: PathLossParams, bounds: Bounds) -> Self {
        Scenario {
            anchors,
            params,
            bounds,
        }
    }

    /// Anchor count N.
    pub fn anchor_count(&self) -> usize {
        self.anchors.len()
    }

    /// Checks all scenario invariants: valid params and bounds, N >= 1,
    /// pairwise-distinct anchors, every anchor inside the bounds.
    pub fn validate(&self) -> Result<(), Error> {
        self.params.validate()?;
        self.bounds.validate()?;
        if self.anchors.is_empty() {
            return Err(Error::InvalidParameter { name: "anchors" });
        }
        for (i, a) in self.anchors.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::InvalidParameter { name: "anchors" });
            }
            if !self.bounds.contains(a) {
                return Err(Error::InvalidParameter { name: "anchors" });
            }
            for b in &self.anchors[i + 1..] {
                if a == b {
                    return Err(Error::InvalidParameter { name: "anchors" });
                }
            }
        }
        Ok(())
    }
}

/// Per-anchor RSS readings in dB, index-aligned with the scenario anchors.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct MeasurementSet {
    pub p: Vec<f64>,
}

impl MeasurementSet {
    pub fn new(p: Vec<f64>) -> Self {
        MeasurementSet { p }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Checks length against the scenario and finiteness of every reading.
    pub fn validate(&self, scenario: &Scenario) -> Result<(), Error> {
        if self.p.len() != scenario.anchor_count() {
            return Err(Error::DimensionMismatch {
                expected: scenario.anchor_count(),
                got: self.p.len(),
            });
        }
        if self.p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "measurements",
            });
        }
        Ok(())
    }
}

/// Noise-free received power at `target` from `anchor`:
/// `P0 - 10 * gamma * log10(||target - anchor|| / d0)`.
///
/// Errors with [`Error::SingularGeometry`] when target and anchor coincide.
pub fn expected_rss(
    params: &PathLossParams,
    anchor: &Position,
    target: &Position,
) -> Result<f64, Error> {
    let d = target.distance_to(anchor);
    if d == 0.0 {
        return Err(Error::SingularGeometry { anchor: 0 });
    }
    Ok(params.p0 - 10.0 * params.gamma * libm::log10(d / params.d0))
}

/// Draws one RSS reading per anchor: the noise-free power plus
/// `sigma * z_i`, with `z_i` standard normal. Consumes exactly N Gaussian
/// draws in anchor order (also when sigma = 0, so the stream protocol does
/// not depend on the noise level).
pub fn generate_measurements<R: RandomSource>(
    scenario: &Scenario,
    target: &Position,
    rng: &mut R,
) -> Result<MeasurementSet, Error> {
    let mut p = Vec::with_capacity(scenario.anchor_count());
    for (i, anchor) in scenario.anchors.iter().enumerate() {
        let mean = expected_rss(&scenario.params, anchor, target)
            .map_err(|_| Error::SingularGeometry { anchor: i })?;
        p.push(mean + scenario.params.sigma * rng.gaussian());
    }
    Ok(MeasurementSet { p })
}

/// ML cost `f(x)`: the sum over anchors of the squared dB residual
/// `(P_i - P0 + 10 * gamma * log10(||x - a_i|| / d0))^2`.
///
/// Distances are floored at [`MIN_COST_DISTANCE`], so the cost is finite
/// everywhere and the annealer never faults on a proposal that hits an
/// anchor. Unweighted: with equal sigmas the 1/sigma^2 factor does not move
/// the argmin.
///
/// Panics if the measurement count differs from the anchor count.
pub fn ml_cost(x: &Position, scenario: &Scenario, meas: &MeasurementSet) -> f64 {
    assert_eq!(
        meas.p.len(),
        scenario.anchors.len(),
        "measurement/anchor count mismatch"
    );
    let params = &scenario.params;
    let scale = 10.0 * params.gamma;
    let mut cost = 0.0;
    for (anchor, &p_i) in scenario.anchors.iter().zip(&meas.p) {
        let d = x.distance_to(anchor).max(MIN_COST_DISTANCE);
        let residual = p_i - params.p0 + scale * libm::log10(d / params.d0);
        cost += residual * residual;
    }
    cost
}

/// Inverts the noise-free path-loss model: the distance at which the model
/// would produce the reading `p_i`, i.e. `d0 * 10^((P0 - p_i) / (10 gamma))`.
/// Strictly positive for every finite input.
pub fn range_estimate(p_i: f64, params: &PathLossParams) -> f64 {
    params.d0 * libm::pow(10.0, (params.p0 - p_i) / (10.0 * params.gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use alloc::vec;

    fn params() -> PathLossParams {
        PathLossParams::default()
    }

    fn box40() -> Bounds {
        Bounds::new(Position::new(0.0, 0.0), Position::new(40.0, 40.0))
    }

    #[test]
    fn expected_rss_reference_values() {
        let p = params();
        let a = Position::new(0.0, 0.0);
        let at = |x: f64| expected_rss(&p, &a, &Position::new(x, 0.0)).unwrap();
        assert_eq!(at(1.0), 10.0);
        assert_eq!(at(10.0), -20.0);
        assert_eq!(at(100.0), -50.0);
    }

    #[test]
    fn expected_rss_errors_on_coincident_point() {
        let p = params();
        let a = Position::new(3.0, 4.0);
        assert!(matches!(
            expected_rss(&p, &a, &a),
            Err(Error::SingularGeometry { .. })
        ));
    }

    #[test]
    fn expected_rss_decreases_with_distance() {
        let p = params();
        let a = Position::new(0.0, 0.0);
        let mut rng = Stream::from_seed(11);
        let mut distances: Vec<f64> = (0..50).map(|_| 0.1 + 60.0 * rng.uniform()).collect();
        distances.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let rss: Vec<f64> = distances
            .iter()
            .map(|&d| expected_rss(&p, &a, &Position::new(d, 0.0)).unwrap())
            .collect();
        for w in rss.windows(2) {
            assert!(w[1] < w[0], "rss must strictly decrease with distance");
        }
    }

    #[test]
    fn zero_noise_measurements_match_expected_rss() {
        let mut scenario = Scenario::new(
            vec![
                Position::new(5.0, 5.0),
                Position::new(30.0, 10.0),
                Position::new(12.0, 35.0),
            ],
            params(),
            box40(),
        );
        scenario.params.sigma = 0.0;
        let target = Position::new(20.0, 20.0);
        let mut rng = Stream::from_seed(1);
        let meas = generate_measurements(&scenario, &target, &mut rng).unwrap();
        for (anchor, &p_i) in scenario.anchors.iter().zip(&meas.p) {
            let exact = expected_rss(&scenario.params, anchor, &target).unwrap();
            assert_eq!(p_i, exact);
        }
    }

    #[test]
    fn seeded_measurements_are_identical_across_calls() {
        let scenario = Scenario::new(
            vec![Position::new(5.0, 5.0), Position::new(30.0, 10.0)],
            params(),
            box40(),
        );
        let target = Position::new(20.0, 20.0);
        let a = generate_measurements(&scenario, &target, &mut Stream::from_seed(7)).unwrap();
        let b = generate_measurements(&scenario, &target, &mut Stream::from_seed(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn measurement_noise_moments() {
        // 1e5 readings of one fixed link: sample mean of the noise within
        // ±0.05 dB of 0, sample std within ±0.05 of sigma = 2.
        let scenario = Scenario::new(vec![Position::new(0.0, 0.0)], params(), box40());
        let target = Position::new(10.0, 0.0);
        let exact = expected_rss(&scenario.params, &scenario.anchors[0], &target).unwrap();
        let mut rng = Stream::from_seed(99);
        let n = 100_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let meas = generate_measurements(&scenario, &target, &mut rng).unwrap();
            let noise = meas.p[0] - exact;
            sum += noise;
            sum_sq += noise * noise;
        }
        let mean = sum / n as f64;
        let std = libm::sqrt((sum_sq - sum * sum / n as f64) / (n - 1) as f64);
        assert!(mean.abs() < 0.05, "noise mean {}", mean);
        assert!((std - 2.0).abs() < 0.05, "noise std {}", std);
    }

    #[test]
    fn ml_cost_is_zero_at_truth_without_noise() {
        let mut scenario = Scenario::new(
            vec![
                Position::new(1.0, 2.0),
                Position::new(38.0, 4.0),
                Position::new(17.0, 33.0),
                Position::new(6.0, 28.0),
            ],
            params(),
            box40(),
        );
        scenario.params.sigma = 0.0;
        let truth = Position::new(22.0, 13.0);
        let meas = generate_measurements(&scenario, &truth, &mut Stream::from_seed(5)).unwrap();
        assert_eq!(ml_cost(&truth, &scenario, &meas), 0.0);
    }

    #[test]
    fn ml_cost_single_anchor_reference_value() {
        // Residual: -23 - 10 + 30*log10(10) = -3, cost 9.
        let scenario = Scenario::new(vec![Position::new(0.0, 0.0)], params(), box40());
        let meas = MeasurementSet::new(vec![-23.0]);
        let cost = ml_cost(&Position::new(10.0, 0.0), &scenario, &meas);
        assert!((cost - 9.0).abs() < 1e-12, "cost {}", cost);
    }

    #[test]
    fn ml_cost_sums_squared_residuals() {
        // Two anchors, each residual exactly 2 dB: cost 8.
        let scenario = Scenario::new(
            vec![Position::new(0.0, 0.0), Position::new(20.0, 0.0)],
            params(),
            box40(),
        );
        let x = Position::new(10.0, 0.0);
        let p: Vec<f64> = scenario
            .anchors
            .iter()
            .map(|a| expected_rss(&scenario.params, a, &x).unwrap() + 2.0)
            .collect();
        let cost = ml_cost(&x, &scenario, &MeasurementSet::new(p));
        assert!((cost - 8.0).abs() < 1e-12, "cost {}", cost);
    }

    #[test]
    fn ml_cost_is_finite_on_an_anchor() {
        let scenario = Scenario::new(
            vec![Position::new(5.0, 5.0), Position::new(30.0, 10.0)],
            params(),
            box40(),
        );
        let meas = MeasurementSet::new(vec![-10.0, -20.0]);
        let cost = ml_cost(&scenario.anchors[0], &scenario, &meas);
        assert!(cost.is_finite());
    }

    #[test]
    #[should_panic(expected = "mismatch")]
    fn ml_cost_panics_on_length_mismatch() {
        let scenario = Scenario::new(vec![Position::new(5.0, 5.0)], params(), box40());
        let meas = MeasurementSet::new(vec![-10.0, -20.0]);
        ml_cost(&Position::new(1.0, 1.0), &scenario, &meas);
    }

    #[test]
    fn range_estimate_reference_values() {
        let p = params();
        assert!((range_estimate(10.0, &p) - 1.0).abs() < 1e-15);
        assert!((range_estimate(-20.0, &p) - 10.0).abs() < 1e-12);
        assert!((range_estimate(-5.0, &p) - libm::sqrt(10.0)).abs() < 1e-12);
    }

    #[test]
    fn scenario_validation_catches_violations() {
        let good = Scenario::new(
            vec![Position::new(5.0, 5.0), Position::new(30.0, 10.0)],
            params(),
            box40(),
        );
        assert!(good.validate().is_ok());

        let mut dup = good.clone();
        dup.anchors.push(Position::new(5.0, 5.0));
        assert!(dup.validate().is_err());

        let mut outside = good.clone();
        outside.anchors.push(Position::new(41.0, 5.0));
        assert!(outside.validate().is_err());

        let mut empty = good.clone();
        empty.anchors.clear();
        assert!(empty.validate().is_err());

        let mut bad_gamma = good.clone();
        bad_gamma.params.gamma = 0.0;
        assert!(bad_gamma.validate().is_err());

        let mut bad_sigma = good;
        bad_sigma.params.sigma = -1.0;
        assert!(bad_sigma.validate().is_err());
    }
}
