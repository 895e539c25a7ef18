//! Fisher information and the Cramér-Rao lower bound.
//!
//! For the log-distance model with common Gaussian dB noise the Fisher
//! information about the target position is
//!
//! ```text
//! FIM = c^2 * sum_i (x - a_i)(x - a_i)^T / ||x - a_i||^4,
//! c   = 10 * gamma / (sigma * ln 10),
//! ```
//!
//! and `sqrt(trace(FIM^-1))` bounds the RMSE of any unbiased estimator.

use crate::error::Error;
use crate::model::{Position, Scenario};

/// Symmetric 2x2 Fisher information matrix, entries in 1/m^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherInfo {
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
}

impl FisherInfo {
    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m12
    }

    /// Eigenvalues in ascending order (real by symmetry).
    pub fn eigenvalues(&self) -> (f64, f64) {
        let half_trace = 0.5 * self.trace();
        let diff = 0.5 * (self.m11 - self.m22);
        let radius = libm::sqrt(diff * diff + self.m12 * self.m12);
        (half_trace - radius, half_trace + radius)
    }
}

/// Fisher information about the target position at `target`.
///
/// Requires `sigma > 0` ([`Error::UndefinedBound`] otherwise) and a target
/// distinct from every anchor ([`Error::SingularGeometry`]).
pub fn fisher_information(scenario: &Scenario, target: &Position) -> Result<FisherInfo, Error> {
    let sigma = scenario.params.sigma;
    if sigma <= 0.0 {
        return Err(Error::UndefinedBound);
    }
    let c = 10.0 * scenario.params.gamma / (sigma * core::f64::consts::LN_10);
    let c_sq = c * c;
    let mut m11 = 0.0;
    let mut m12 = 0.0;
    let mut m22 = 0.0;
    for (i, anchor) in scenario.anchors.iter().enumerate() {
        let dx = target.x1 - anchor.x1;
        let dy = target.x2 - anchor.x2;
        let d_sq = dx * dx + dy * dy;
        if d_sq == 0.0 {
            return Err(Error::SingularGeometry { anchor: i });
        }
        let w = c_sq / (d_sq * d_sq);
        m11 += w * dx * dx;
        m12 += w * dx * dy;
        m22 += w * dy * dy;
    }
    Ok(FisherInfo { m11, m12, m22 })
}

/// Cramér-Rao floor on the localization RMSE: `sqrt(trace(FIM^-1))`,
/// meters. Errors with [`Error::DegenerateGeometry`] when the information
/// matrix is singular (all anchor directions collinear).
pub fn crlb_rmse(scenario: &Scenario, target: &Position) -> Result<f64, Error> {
    let fim = fisher_information(scenario, target)?;
    let scale = fim.m11.max(fim.m22);
    let det = fim.det();
    if scale <= 0.0 || det <= RANK_TOLERANCE * scale * scale {
        return Err(Error::DegenerateGeometry);
    }
    Ok(libm::sqrt(fim.trace() / det))
}

const RANK_TOLERANCE: f64 = 1e-12;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PathLossParams;
    use crate::rng::{RandomSource, Stream};
    use crate::solver::Bounds;
    use alloc::vec;
    use alloc::vec::Vec;
    use core::f64::consts::LN_10;

    fn corner_scenario(sigma: f64) -> Scenario {
        Scenario::new(
            vec![
                Position::new(0.0, 0.0),
                Position::new(40.0, 0.0),
                Position::new(0.0, 40.0),
                Position::new(40.0, 40.0),
            ],
            PathLossParams {
                sigma,
                ..PathLossParams::default()
            },
            Bounds::square40(),
        )
    }

    fn random_scenario(seed: u64, n: usize) -> (Scenario, Position) {
        let bounds = Bounds::square40();
        let mut rng = Stream::from_seed(seed);
        let target = bounds.lerp(rng.uniform(), rng.uniform());
        let mut anchors = Vec::new();
        while anchors.len() < n {
            let a = bounds.lerp(rng.uniform(), rng.uniform());
            if a.distance_to(&target) >= 1.0 {
                anchors.push(a);
            }
        }
        (
            Scenario::new(anchors, PathLossParams::default(), bounds),
            target,
        )
    }

    #[test]
    fn symmetric_corner_case_closed_form() {
        // Four corner anchors, center target: unit directions at 45 degree
        // multiples sum to 2I, all distances 20*sqrt(2), so
        // FIM = (c^2 / 400) I with c = 15 / ln 10.
        let scenario = corner_scenario(2.0);
        let fim = fisher_information(&scenario, &Position::new(20.0, 20.0)).unwrap();
        let c = 15.0 / LN_10;
        let expected = c * c / 400.0;
        assert!((fim.m11 - expected).abs() <= 1e-12 * expected);
        assert!((fim.m22 - expected).abs() <= 1e-12 * expected);
        assert!(fim.m12.abs() <= 1e-15);

        let crlb = crlb_rmse(&scenario, &Position::new(20.0, 20.0)).unwrap();
        let expected_crlb = 20.0 * core::f64::consts::SQRT_2 / c;
        assert!((crlb - expected_crlb).abs() <= 1e-12 * expected_crlb);
        // ~4.342 m for gamma = 3, sigma = 2.
        assert!((crlb - 4.342).abs() < 5e-3, "crlb {}", crlb);
    }

    #[test]
    fn doubling_sigma_quarters_the_information() {
        let target = Position::new(13.0, 27.5);
        let base = fisher_information(&corner_scenario(2.0), &target).unwrap();
        let doubled = fisher_information(&corner_scenario(4.0), &target).unwrap();
        for (a, b) in [
            (base.m11, doubled.m11),
            (base.m12, doubled.m12),
            (base.m22, doubled.m22),
        ] {
            assert!((b - 0.25 * a).abs() <= 1e-15 + 1e-12 * a.abs());
        }
        let crlb = crlb_rmse(&corner_scenario(2.0), &target).unwrap();
        let crlb2 = crlb_rmse(&corner_scenario(4.0), &target).unwrap();
        assert!((crlb2 - 2.0 * crlb).abs() <= 1e-12 * crlb);
    }

    #[test]
    fn information_is_positive_semidefinite() {
        for seed in 0..50 {
            let (scenario, target) = random_scenario(seed, 2 + (seed % 9) as usize);
            let fim = fisher_information(&scenario, &target).unwrap();
            assert!((fim.m12 - fim.m12).abs() == 0.0); // symmetric by construction
            let (lo, hi) = fim.eigenvalues();
            assert!(lo >= -1e-12, "eigenvalue {} negative", lo);
            assert!(hi >= lo);
        }
    }

    #[test]
    fn bound_is_rigid_motion_invariant() {
        for seed in 0..20 {
            let (scenario, target) = random_scenario(100 + seed, 8);
            let reference = crlb_rmse(&scenario, &target).unwrap();

            let mut rng = Stream::from_seed(7_000 + seed);
            let theta = 2.0 * core::f64::consts::PI * rng.uniform();
            let (sin, cos) = (libm::sin(theta), libm::cos(theta));
            let shift = Position::new(100.0 * rng.uniform(), 100.0 * rng.uniform());
            let transform = |p: &Position| {
                Position::new(
                    cos * p.x1 - sin * p.x2 + shift.x1,
                    sin * p.x1 + cos * p.x2 + shift.x2,
                )
            };

            let mut moved = scenario.clone();
            moved.anchors = scenario.anchors.iter().map(&transform).collect();
            // Keep the bounds box; it does not enter the bound itself.
            let moved_target = transform(&target);
            let rotated = crlb_rmse(&moved, &moved_target).unwrap();
            assert!(
                (rotated - reference).abs() <= 1e-9 * reference,
                "seed {}: {} vs {}",
                seed,
                rotated,
                reference
            );
        }
    }

    #[test]
    fn duplicated_anchor_never_raises_the_bound() {
        for seed in 0..30 {
            let (mut scenario, target) = random_scenario(200 + seed, 5);
            let before = crlb_rmse(&scenario, &target).unwrap();
            let dup = scenario.anchors[0];
            scenario.anchors.push(dup);
            let after = crlb_rmse(&scenario, &target).unwrap();
            assert!(after <= before + 1e-12, "{} > {}", after, before);
        }
    }

    #[test]
    fn degenerate_inputs_error() {
        let scenario = corner_scenario(0.0);
        assert_eq!(
            fisher_information(&scenario, &Position::new(20.0, 20.0)),
            Err(Error::UndefinedBound)
        );

        let scenario = corner_scenario(2.0);
        assert!(matches!(
            fisher_information(&scenario, &Position::new(0.0, 0.0)),
            Err(Error::SingularGeometry { anchor: 0 })
        ));

        // All anchors in line with the target: rank-1 information.
        let collinear = Scenario::new(
            vec![
                Position::new(5.0, 20.0),
                Position::new(10.0, 20.0),
                Position::new(30.0, 20.0),
            ],
            PathLossParams::default(),
            Bounds::square40(),
        );
        assert_eq!(
            crlb_rmse(&collinear, &Position::new(20.0, 20.0)),
            Err(Error::DegenerateGeometry)
        );
    }

    #[test]
    fn matches_finite_difference_expected_hessian() {
        // Independent check of the closed form: the expected log-likelihood
        // with noise-free readings has Hessian -FIM at the truth. The mean
        // power model is recomputed locally so the oracle shares nothing
        // with fisher_information.
        fn mean_power(params: &PathLossParams, anchor: &Position, x: &Position) -> f64 {
            let d = libm::sqrt(
                (x.x1 - anchor.x1) * (x.x1 - anchor.x1) + (x.x2 - anchor.x2) * (x.x2 - anchor.x2),
            );
            params.p0 - 10.0 * params.gamma * libm::log10(d / params.d0)
        }
        fn expected_loglik(scenario: &Scenario, truth: &Position, x: &Position) -> f64 {
            let inv_two_var = 1.0 / (2.0 * scenario.params.sigma * scenario.params.sigma);
            let mut total = 0.0;
            for anchor in &scenario.anchors {
                let r = mean_power(&scenario.params, anchor, truth)
                    - mean_power(&scenario.params, anchor, x);
                total -= r * r * inv_two_var;
            }
            total
        }

        let h = 1e-3;
        for seed in 0..5 {
            let (scenario, target) = random_scenario(300 + seed, 7);
            let fim = fisher_information(&scenario, &target).unwrap();

            let g = |dx: f64, dy: f64| {
                expected_loglik(
                    &scenario,
                    &target,
                    &Position::new(target.x1 + dx, target.x2 + dy),
                )
            };
            let g0 = g(0.0, 0.0);
            let h11 = (g(h, 0.0) - 2.0 * g0 + g(-h, 0.0)) / (h * h);
            let h22 = (g(0.0, h) - 2.0 * g0 + g(0.0, -h)) / (h * h);
            let h12 = (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4.0 * h * h);

            let scale = fim.m11.abs().max(fim.m22.abs()).max(fim.m12.abs());
            for (analytic, fd) in [(fim.m11, -h11), (fim.m12, -h12), (fim.m22, -h22)] {
                assert!(
                    (analytic - fd).abs() <= 1e-3 * scale,
                    "seed {}: {} vs {}",
                    seed,
                    analytic,
                    fd
                );
            }
        }
    }
}
