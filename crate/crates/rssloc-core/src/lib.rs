//! RSS-based single-target localization in 2-D wireless sensor networks.
//!
//! A target node's position is estimated from received-signal-strength (RSS)
//! readings taken at anchor nodes with known positions. The RSS follows the
//! log-distance path-loss model with i.i.d. Gaussian dB noise, and the
//! maximum-likelihood position is the minimizer of a non-convex, multimodal
//! sum-of-squares cost.
//!
//! The main solver runs simulated annealing twice: once from a uniformly
//! random initial point and once from its opposite point (reflection through
//! the center of the search box), keeping whichever run ends with the lower
//! cost. The opposing start costs one extra anneal but sharply reduces the
//! chance of both runs stalling in the same local minimum.
//!
//! Also included, for evaluating the solver:
//!
//! - an exhaustive grid-search minimizer of the same cost ([`grid_oracle`]),
//! - a squared-range linear least-squares estimator ([`lls_estimate`]),
//! - the Cramér-Rao lower bound on unbiased location estimates
//!   ([`fisher_information`], [`crlb_rmse`]).
//!
//! The crate is `no_std` (with `alloc`). All randomness flows through
//! [`rng::Stream`], an explicitly seeded generator, so every result is
//! reproducible bit for bit.
//!
//! # Example
//!
//! ```
//! use rssloc_core::{
//!     generate_measurements, localize, Bounds, PathLossParams, Position, SaaConfig,
//!     Scenario, Stream,
//! };
//!
//! let scenario = Scenario::new(
//!     vec![
//!         Position::new(5.0, 5.0),
//!         Position::new(35.0, 7.0),
//!         Position::new(20.0, 33.0),
//!         Position::new(8.0, 26.0),
//!     ],
//!     PathLossParams::default(),
//!     Bounds::square40(),
//! );
//! let truth = Position::new(24.0, 16.0);
//!
//! let mut rng = Stream::from_seed(42);
//! let meas = generate_measurements(&scenario, &truth, &mut rng)?;
//! let report = localize(&scenario, &meas, &SaaConfig::default(), &mut rng);
//! assert!(report.estimate.distance_to(&truth) < 5.0);
//! # Ok::<(), rssloc_core::Error>(())
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod crlb;
pub mod grid;
pub mod lls;
pub mod model;
pub mod rng;
pub mod solver;

pub use crlb::{crlb_rmse, fisher_information, FisherInfo};
pub use error::Error;
pub use grid::{cost_surface, grid_oracle, GridSpec};
pub use lls::lls_estimate;
pub use model::{
    expected_rss, generate_measurements, ml_cost, range_estimate, MeasurementSet, PathLossParams,
    Position, Scenario,
};
pub use rng::{RandomSource, Stream};
pub use solver::{
    acceptance_probability, anneal, localize, localize_traced, oppose, propose_neighbor,
    random_initial, AnnealState, Bounds, Branch, BranchTraces, SaaConfig, SolveReport, T0Policy,
    TracePoint,
};
