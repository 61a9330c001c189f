//! Fixed-temperature Metropolis search over router positions.
//!
//! One iteration picks a router, a hop length and one of eight compass
//! directions. The move is only considered when the target cell is required
//! and placeable. Non-negative fitness changes are always accepted; a loss
//! `delta < 0` is accepted when a uniform draw in (0, 1) falls below
//! `exp(T * delta)`.

use std::fmt;
use std::str::FromStr;

use rand::distributions::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coverage::{fitness, CoverDepthMap, Disk, Placement};
use crate::error::{Error, Result};
use crate::region::{Cell, RegionGrid};

/// Compass directions, as unit offsets scaled by the hop length.
pub const DIRECTIONS: [(i64, i64); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemovalStrategy {
    /// Drop the router that covers the fewest required cells alone.
    #[default]
    MinSingleCoverage,
    /// Drop the router whose disk touches the most optional cells.
    MaxOptionalCoverage,
    /// Drop the router with the most over-covered required cells.
    MaxOverCoverage,
}

impl RemovalStrategy {
    pub const ALL: [RemovalStrategy; 3] = [
        RemovalStrategy::MinSingleCoverage,
        RemovalStrategy::MaxOptionalCoverage,
        RemovalStrategy::MaxOverCoverage,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RemovalStrategy::MinSingleCoverage => "min-single",
            RemovalStrategy::MaxOptionalCoverage => "max-optional",
            RemovalStrategy::MaxOverCoverage => "max-over",
        }
    }
}

impl fmt::Display for RemovalStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for RemovalStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown removal strategy {s:?}")))
    }
}

/// Hop lengths `r`, `r/2`, `r/4`, rounded to nearest and at least 1.
pub fn default_hops(radius: u32) -> Vec<u32> {
    let r = radius as f64;
    vec![
        radius.max(1),
        ((r / 2.0).round() as u32).max(1),
        ((r / 4.0).round() as u32).max(1),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub temperature: f64,
    pub num_iter: u32,
    pub stop: u32,
    pub radius: u32,
    pub init_factor: f64,
    /// Required-coverage percentage the planner must keep. `None` means two
    /// points under the maximum reached with the initial router count.
    pub coverage_threshold: Option<f64>,
    pub seed: u64,
    pub removal_strategy: RemovalStrategy,
    pub hop_distances: Vec<u32>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self::with_radius(12)
    }
}

impl OptimizerConfig {
    /// Default parameters (T = 0.1, 4000 iterations, stop after 500 without
    /// improvement, 1.5× start) for the given radius.
    pub fn with_radius(radius: u32) -> Self {
        Self {
            temperature: 0.1,
            num_iter: 4000,
            stop: 500,
            radius,
            init_factor: 1.5,
            coverage_threshold: None,
            seed: 0,
            removal_strategy: RemovalStrategy::MinSingleCoverage,
            hop_distances: default_hops(radius),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return bad(format!("temperature must be > 0, got {}", self.temperature));
        }
        if self.num_iter == 0 {
            return bad("num_iter must be >= 1".into());
        }
        if self.stop == 0 {
            return bad("stop must be >= 1".into());
        }
        if self.radius == 0 {
            return bad("radius must be >= 1".into());
        }
        if !(self.init_factor > 1.0 && self.init_factor <= 2.0) {
            return bad(format!("init factor {} not in (1, 2]", self.init_factor));
        }
        if let Some(e) = self.coverage_threshold {
            if !(0.0..=100.0).contains(&e) {
                return bad(format!("coverage threshold {e} not in [0, 100]"));
            }
        }
        if self.hop_distances.is_empty() {
            return bad("at least one hop distance is required".into());
        }
        if let Some(&h) = self
            .hop_distances
            .iter()
            .find(|&&h| h == 0 || h > self.radius)
        {
            return bad(format!("hop distance {h} not in [1, {}]", self.radius));
        }
        Ok(())
    }
}

/// `ceil(factor * nr_min)`.
pub fn initial_router_count(nr_min: usize, init_factor: f64) -> usize {
    // the epsilon absorbs representation error such as 1.1 * 10 = 11.000000000000002
    ((init_factor * nr_min as f64) - 1e-9).ceil().max(1.0) as usize
}

/// Places `count` routers on cells drawn uniformly from the legal cells.
pub fn initialize_placement<R: Rng>(
    grid: &RegionGrid,
    radius: u32,
    count: usize,
    rng: &mut R,
) -> Result<Placement> {
    let legal = grid.legal_cells();
    if legal.is_empty() {
        return Err(Error::NoPlaceableRequired);
    }
    let centers = (0..count)
        .map(|_| legal[rng.gen_range(0..legal.len())])
        .collect();
    Ok(Placement::new(radius, centers))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveProposal {
    pub router_index: usize,
    pub from: Cell,
    pub to: Cell,
    /// Fitness change if applied.
    pub delta: i64,
}

/// Draws one move. Returns `None` when the target is off-grid or not a legal
/// router cell.
pub fn propose_move<R: Rng>(
    grid: &RegionGrid,
    map: &CoverDepthMap,
    placement: &Placement,
    disk: &Disk,
    hops: &[u32],
    rng: &mut R,
) -> Option<MoveProposal> {
    debug_assert!(!placement.is_empty());
    let router_index = rng.gen_range(0..placement.len());
    let hop = hops[rng.gen_range(0..hops.len())] as i64;
    let (ux, uy) = DIRECTIONS[rng.gen_range(0..DIRECTIONS.len())];
    let from = placement.centers[router_index];
    let to = from.offset(ux * hop, uy * hop, grid.width(), grid.height())?;
    if !grid.is_legal(to) {
        return None;
    }
    Some(MoveProposal {
        router_index,
        from,
        to,
        delta: map.move_delta(grid, from, to, disk),
    })
}

/// Metropolis acceptance with the temperature multiplying the delta.
pub fn accept<R: Rng>(delta: i64, temperature: f64, rng: &mut R) -> bool {
    if delta >= 0 {
        return true;
    }
    let x: f64 = rng.sample(Open01);
    x < (temperature * delta as f64).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    IterationLimit,
    NoImprovement,
}

/// Per-run log of the inner loop.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OptimizeTrace {
    pub iterations: u32,
    pub accepted: u32,
    pub rejected_illegal: u32,
    pub rejected_metropolis: u32,
    pub improvements: u32,
    /// Running fitness after each iteration.
    pub fitness: Vec<u32>,
    pub stop_reason: Option<StopReason>,
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    /// State at loop exit.
    pub current: Placement,
    pub current_fitness: u32,
    /// Best state seen, including the starting one.
    pub best: Placement,
    pub best_fitness: u32,
    pub trace: OptimizeTrace,
}

/// Runs the Metropolis loop from `placement`, mutating it and `map` in place.
///
/// The stop counter is decremented every iteration and reset whenever the
/// best-seen fitness strictly improves. The loop ends when either counter
/// reaches zero. On return `placement` and `map` hold the final state.
pub fn optimize<R: Rng>(
    grid: &RegionGrid,
    placement: &mut Placement,
    map: &mut CoverDepthMap,
    config: &OptimizerConfig,
    rng: &mut R,
) -> Result<OptimizeOutcome> {
    if placement.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot optimize an empty placement".into(),
        ));
    }
    let disk = Disk::new(placement.radius);
    let mut current = fitness(grid, map);
    let mut best = current;
    let mut best_centers = placement.centers.clone();
    let mut trace = OptimizeTrace {
        fitness: Vec::with_capacity(config.num_iter as usize),
        ..Default::default()
    };

    let mut stop = config.stop;
    let mut remaining = config.num_iter;
    while remaining > 0 && stop > 0 {
        remaining -= 1;
        stop -= 1;
        trace.iterations += 1;

        match propose_move(grid, map, placement, &disk, &config.hop_distances, rng) {
            None => trace.rejected_illegal += 1,
            Some(mv) if accept(mv.delta, config.temperature, rng) => {
                let lost = map.remove_router(grid, mv.from, &disk)?;
                let gained = map.add_router(grid, mv.to, &disk);
                debug_assert_eq!(gained as i64 - lost as i64, mv.delta);
                placement.centers[mv.router_index] = mv.to;
                current = (current as i64 + mv.delta) as u32;
                trace.accepted += 1;
                if current > best {
                    best = current;
                    best_centers.clone_from(&placement.centers);
                    stop = config.stop;
                    trace.improvements += 1;
                }
            }
            Some(_) => trace.rejected_metropolis += 1,
        }
        trace.fitness.push(current);
    }
    trace.stop_reason = Some(if stop == 0 {
        StopReason::NoImprovement
    } else {
        StopReason::IterationLimit
    });

    Ok(OptimizeOutcome {
        current: placement.clone(),
        current_fitness: current,
        best: Placement::new(placement.radius, best_centers),
        best_fitness: best,
        trace,
    })
}
