//! Opposition-based simulated annealing over the ML localization cost.
//!
//! One solve ([`localize`]) runs the annealer twice:
//!
//! 1. draw a uniformly random initial point in the search box,
//! 2. reflect it through the box center ([`oppose`]) for a second,
//!    maximally distant start,
//! 3. anneal independently from both starts,
//! 4. keep the branch that ends with the lower cost (ties go to the
//!    original branch).
//!
//! Each anneal iteration proposes a candidate, accepts it by the Metropolis
//! rule, tracks the best point visited, and cools the temperature by the
//! factor `epsilon`. Most proposals are local: uniform in an axis-aligned
//! box around the current point whose half-width starts at
//! `lambda * (x_max - x_min)` and halves every [`STEP_HALVING_PERIOD`]
//! iterations, so the walk explores coarsely first and settles into
//! sub-centimeter refinement. Every [`PROBE_CADENCE`]-th proposal is
//! instead uniform over the whole box; the ML cost is multimodal and these
//! probes keep the two walks from starving in a local basin once the step
//! has contracted. Each time the step halves, a walk that has drifted above
//! its own best point is re-anchored there. The run ends after `n_max`
//! iterations; the best-visited point is returned, so the result never
//! degrades below the starting cost.
//!
//! Draw protocol (fixed, part of the reproducibility contract): the initial
//! point takes two uniforms (x1 then x2); each branch anneals on its own
//! sub-stream split from the caller's stream (original branch tag 0, then
//! opposing tag 1); each iteration takes exactly two uniforms for the
//! candidate (local or probe) and one more for the Metropolis coin only
//! when the proposal is uphill.

use alloc::vec::Vec;

use crate::error::Error;
use crate::model::{ml_cost, MeasurementSet, Position, Scenario};
use crate::rng::{RandomSource, Stream};

/// Axis-aligned search region.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bounds {
    pub min: Position,
    pub max: Position,
}

impl Bounds {
    pub const fn new(min: Position, max: Position) -> Self {
        Bounds { min, max }
    }

    /// The 40 m x 40 m box at the origin used throughout the simulations.
    pub const fn square40() -> Self {
        Bounds::new(Position::new(0.0, 0.0), Position::new(40.0, 40.0))
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidParameter { name: "bounds" });
        }
        if !(self.min.x1 < self.max.x1 && self.min.x2 < self.max.x2) {
            return Err(Error::InvalidParameter { name: "bounds" });
        }
        Ok(())
    }

    pub fn contains(&self, p: &Position) -> bool {
        p.x1 >= self.min.x1 && p.x1 <= self.max.x1 && p.x2 >= self.min.x2 && p.x2 <= self.max.x2
    }

    pub fn clamp(&self, p: &Position) -> Position {
        Position {
            x1: p.x1.clamp(self.min.x1, self.max.x1),
            x2: p.x2.clamp(self.min.x2, self.max.x2),
        }
    }

    /// Maps unit coordinates onto the box: `min + r * (max - min)` per axis.
    pub fn lerp(&self, r1: f64, r2: f64) -> Position {
        Position {
            x1: self.min.x1 + r1 * (self.max.x1 - self.min.x1),
            x2: self.min.x2 + r2 * (self.max.x2 - self.min.x2),
        }
    }

    /// Box side lengths per axis.
    pub fn span(&self) -> (f64, f64) {
        (self.max.x1 - self.min.x1, self.max.x2 - self.min.x2)
    }
}

/// Every this-many iterations the proposal is uniform over the whole box
/// instead of a local step. Chosen empirically: dense enough that both
/// walks keep seeing fresh basins at every budget, sparse enough that the
/// local walk still dominates and the step scale `lambda` stays relevant.
pub const PROBE_CADENCE: u32 = 20;

/// The local proposal half-width halves every this-many iterations, and a
/// walk sitting above its best-so-far snaps back to it on the same cadence.
/// Chosen empirically: slow enough that a 200-iteration run is still
/// coarse (the accuracy-vs-budget trade stays visible), fast enough that a
/// 500-iteration run refines to well under the noise floor.
pub const STEP_HALVING_PERIOD: u32 = 58;

/// Initial-temperature rule.
///
/// The cost-scaled policy sets `T0 = max(f(x0) / N, 1)` per branch (the
/// mean squared residual at the start), which makes the acceptance rule
/// insensitive to both the measurement magnitudes and the anchor count.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
pub enum T0Policy {
    CostScaled,
    Fixed { value: f64 },
}

/// Annealer control parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SaaConfig {
    /// Temperature ratio applied at each cooling, in (0, 1).
    pub epsilon: f64,
    /// Step ratio: initial local-proposal half-width as a fraction of the
    /// box side, in (0, 1].
    pub lambda: f64,
    /// Number of iterations per branch (>= 1).
    pub n_max: u32,
    /// Boltzmann constant in the Metropolis rule (> 0). Redundant with the
    /// initial temperature; kept at 1 unless there is a reason not to.
    pub k: f64,
    pub t0_policy: T0Policy,
    /// Seed used by file-driven front ends to build the random stream.
    /// Library callers pass a [`Stream`] explicitly; this field does not
    /// enter the solve itself.
    pub seed: u64,
}

impl Default for SaaConfig {
    /// epsilon = 0.9, lambda = 0.4, n_max = 500: the operating point the
    /// parameter tables single out.
    fn default() -> Self {
        SaaConfig {
            epsilon: 0.9,
            lambda: 0.4,
            n_max: 500,
            k: 1.0,
            t0_policy: T0Policy::CostScaled,
            seed: 42,
        }
    }
}

impl SaaConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter { name: "epsilon" });
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::InvalidParameter { name: "lambda" });
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParameter { name: "n_max" });
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidParameter { name: "k" });
        }
        if let T0Policy::Fixed { value } = self.t0_policy {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter { name: "t0_policy" });
            }
        }
        Ok(())
    }
}

/// Which of the two anneal branches produced the reported estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Branch {
    Original,
    Opposing,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Original => "original",
            Branch::Opposing => "opposing",
        }
    }
}

/// One row of an anneal trace: the state after the iteration's move
/// decision and cooling. Row 0 holds the initial point at `T0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: u32,
    pub position: Position,
    pub cost: f64,
    pub temperature: f64,
}

/// Result of one [`localize`] call.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveReport {
    pub estimate: Position,
    /// Cost at the estimate; always `min(branch_costs)`.
    pub cost: f64,
    pub winning_branch: Branch,
    /// Final best costs, `[original, opposing]`.
    pub branch_costs: [f64; 2],
    /// Per-branch iteration traces, populated by [`localize_traced`].
    #[cfg_attr(feature = "serde", serde(skip))]
    pub trace: Option<BranchTraces>,
}

/// Traces of the two anneal branches.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BranchTraces {
    pub original: Vec<TracePoint>,
    pub opposing: Vec<TracePoint>,
}

/// Walking state of one anneal run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealState {
    pub current: Position,
    pub current_cost: f64,
    pub best: Position,
    pub best_cost: f64,
    pub temperature: f64,
    /// Proposal half-width per axis, meters.
    pub step: (f64, f64),
    pub iteration: u32,
}

/// Uniform point in the box: `r (.) (max - min) + min` with `r` uniform on
/// the unit square. Two draws, x1 first.
pub fn random_initial<R: RandomSource>(bounds: &Bounds, rng: &mut R) -> Position {
    let r1 = rng.uniform();
    let r2 = rng.uniform();
    bounds.lerp(r1, r2)
}

/// The opposite point: reflection through the box center,
/// `x_max + x_min - x` per axis.
pub fn oppose(x: &Position, bounds: &Bounds) -> Position {
    Position {
        x1: bounds.max.x1 + bounds.min.x1 - x.x1,
        x2: bounds.max.x2 + bounds.min.x2 - x.x2,
    }
}

/// Metropolis acceptance probability: 1 for a downhill-or-equal move
/// (`delta <= 0`), `exp(-delta / (k T))` otherwise. Always in (0, 1].
pub fn acceptance_probability(delta: f64, temperature: f64, k: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else {
        libm::exp(-delta / (k * temperature))
    }
}

fn shift_clamped(x: &Position, u1: f64, u2: f64, step: (f64, f64), bounds: &Bounds) -> Position {
    bounds.clamp(&Position {
        x1: x.x1 + u1 * step.0,
        x2: x.x2 + u2 * step.1,
    })
}

/// Uniform proposal in the axis-aligned box of half-width `step` around
/// `x`, clamped to the bounds. Exactly two draws, x1 first.
pub fn propose_neighbor<R: RandomSource>(
    x: &Position,
    step: (f64, f64),
    bounds: &Bounds,
    rng: &mut R,
) -> Position {
    let u1 = rng.uniform_signed();
    let u2 = rng.uniform_signed();
    shift_clamped(x, u1, u2, step, bounds)
}

fn initial_temperature(policy: T0Policy, initial_cost: f64, anchor_count: usize) -> f64 {
    match policy {
        T0Policy::CostScaled => (initial_cost / anchor_count as f64).max(1.0),
        T0Policy::Fixed { value } => value,
    }
}

fn anneal_inner<R: RandomSource>(
    x0: Position,
    scenario: &Scenario,
    meas: &MeasurementSet,
    config: &SaaConfig,
    rng: &mut R,
    mut trace: Option<&mut Vec<TracePoint>>,
) -> (Position, f64) {
    let bounds = &scenario.bounds;
    let (span1, span2) = bounds.span();
    let base_step = (config.lambda * span1, config.lambda * span2);
    let step_decay = libm::pow(2.0, -1.0 / STEP_HALVING_PERIOD as f64);
    let cost0 = ml_cost(&x0, scenario, meas);
    let mut state = AnnealState {
        current: x0,
        current_cost: cost0,
        best: x0,
        best_cost: cost0,
        temperature: initial_temperature(config.t0_policy, cost0, scenario.anchor_count()),
        step: base_step,
        iteration: 0,
    };
    if let Some(rows) = trace.as_deref_mut() {
        rows.push(TracePoint {
            iteration: 0,
            position: state.current,
            cost: state.current_cost,
            temperature: state.temperature,
        });
    }

    let mut decay = 1.0;
    for _ in 0..config.n_max {
        state.iteration += 1;
        if state.iteration.is_multiple_of(STEP_HALVING_PERIOD)
            && state.current_cost > state.best_cost
        {
            state.current = state.best;
            state.current_cost = state.best_cost;
        }
        state.step = (base_step.0 * decay, base_step.1 * decay);
        let candidate = if state.iteration.is_multiple_of(PROBE_CADENCE) {
            let r1 = rng.uniform();
            let r2 = rng.uniform();
            bounds.lerp(r1, r2)
        } else {
            propose_neighbor(&state.current, state.step, bounds, rng)
        };
        let candidate_cost = ml_cost(&candidate, scenario, meas);
        let delta = candidate_cost - state.current_cost;
        let accept = if delta <= 0.0 {
            true
        } else {
            let p = acceptance_probability(delta, state.temperature, config.k);
            rng.uniform() < p
        };
        if accept {
            state.current = candidate;
            state.current_cost = candidate_cost;
            if candidate_cost < state.best_cost {
                state.best = candidate;
                state.best_cost = candidate_cost;
            }
        }
        state.temperature *= config.epsilon;
        decay *= step_decay;
        if let Some(rows) = trace.as_deref_mut() {
            rows.push(TracePoint {
                iteration: state.iteration,
                position: state.current,
                cost: state.current_cost,
                temperature: state.temperature,
            });
        }
    }
    (state.best, state.best_cost)
}

/// One simulated-annealing run of `n_max` iterations from `x0`. Returns the
/// best point visited and its cost, so the result is never worse than `x0`.
pub fn anneal<R: RandomSource>(
    x0: Position,
    scenario: &Scenario,
    meas: &MeasurementSet,
    config: &SaaConfig,
    rng: &mut R,
) -> (Position, f64) {
    anneal_inner(x0, scenario, meas, config, rng, None)
}

pub(crate) fn select_branch(original_cost: f64, opposing_cost: f64) -> Branch {
    if opposing_cost < original_cost {
        Branch::Opposing
    } else {
        Branch::Original
    }
}

fn localize_impl<R: RandomSource>(
    scenario: &Scenario,
    meas: &MeasurementSet,
    config: &SaaConfig,
    rng: &mut R,
    want_trace: bool,
) -> SolveReport {
    const TAG_ORIGINAL: u64 = 0;
    const TAG_OPPOSING: u64 = 1;

    let x0 = random_initial(&scenario.bounds, rng);
    let x0_opposing = oppose(&x0, &scenario.bounds);
    // Split both branch streams up front; the two anneals then commute.
    let mut rng_original: Stream = rng.substream(TAG_ORIGINAL);
    let mut rng_opposing: Stream = rng.substream(TAG_OPPOSING);

    let mut traces = want_trace.then(BranchTraces::default);
    let (original, original_cost) = anneal_inner(
        x0,
        scenario,
        meas,
        config,
        &mut rng_original,
        traces.as_mut().map(|t| &mut t.original),
    );
    let (opposing, opposing_cost) = anneal_inner(
        x0_opposing,
        scenario,
        meas,
        config,
        &mut rng_opposing,
        traces.as_mut().map(|t| &mut t.opposing),
    );

    let winning_branch = select_branch(original_cost, opposing_cost);
    let (estimate, cost) = match winning_branch {
        Branch::Original => (original, original_cost),
        Branch::Opposing => (opposing, opposing_cost),
    };
    SolveReport {
        estimate,
        cost,
        winning_branch,
        branch_costs: [original_cost, opposing_cost],
        trace: traces,
    }
}

/// Full solve: random start, opposite start, one anneal each, best of the
/// two. The branches run on independent sub-streams split from `rng`, so
/// the report is a pure function of (scenario, measurements, config, stream
/// state).
pub fn localize<R: RandomSource>(
    scenario: &Scenario,
    meas: &MeasurementSet,
    config: &SaaConfig,
    rng: &mut R,
) -> SolveReport {
    localize_impl(scenario, meas, config, rng, false)
}

/// Same as [`localize`], recording the per-iteration trace of both
/// branches.
pub fn localize_traced<R: RandomSource>(
    scenario: &Scenario,
    meas: &MeasurementSet,
    config: &SaaConfig,
    rng: &mut R,
) -> SolveReport {
    localize_impl(scenario, meas, config, rng, true)
}
