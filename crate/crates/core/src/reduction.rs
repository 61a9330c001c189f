//! The outer planning loop: optimise, record, drop one router, repeat.
//!
//! Starting from `ceil(init_factor * nr_min)` random routers, every step runs
//! the Metropolis loop, keeps the best state it saw, records its coverage and
//! connectivity, then removes one router chosen by the removal strategy and
//! re-optimises the survivors. The reduction always runs down to `nr_min`
//! routers; the milestone rows are read off the full trace afterwards.
//!
//! Milestones compare coverage in whole percent (rounded), the way result
//! tables are read:
//!
//! - `nr_same`: fewest routers still at the maximum `M` reached with `nr_init`
//! - `nr_max_1`, `nr_max_2`: fewest routers at `M - 1` and `M - 2` or better
//! - `nr_con`: fewest routers whose placement is connected
//! - `nr_min`: the row at the area-ratio bound

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connectivity::is_connected;
use crate::coverage::{coverage_metrics, nr_min, stats_with, CoverDepthMap, Disk, Placement};
use crate::error::{Error, Result};
use crate::metropolis::{
    initial_router_count, initialize_placement, optimize, OptimizerConfig, RemovalStrategy,
};
use crate::region::{Cell, RegionGrid};

pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MilestoneLabel {
    NrInit,
    NrSame,
    #[serde(rename = "nr_max_1")]
    NrMax1,
    #[serde(rename = "nr_max_2")]
    NrMax2,
    NrCon,
    NrMin,
}

impl MilestoneLabel {
    pub const ALL: [MilestoneLabel; 6] = [
        MilestoneLabel::NrInit,
        MilestoneLabel::NrSame,
        MilestoneLabel::NrMax1,
        MilestoneLabel::NrMax2,
        MilestoneLabel::NrCon,
        MilestoneLabel::NrMin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MilestoneLabel::NrInit => "nr_init",
            MilestoneLabel::NrSame => "nr_same",
            MilestoneLabel::NrMax1 => "nr_max_1",
            MilestoneLabel::NrMax2 => "nr_max_2",
            MilestoneLabel::NrCon => "nr_con",
            MilestoneLabel::NrMin => "nr_min",
        }
    }
}

impl fmt::Display for MilestoneLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for MilestoneLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown milestone {s:?}")))
    }
}

/// One recorded reduction step: the best state found with `router_count` routers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub router_count: usize,
    pub connected: bool,
    pub required_pct: f64,
    pub optional_pct: f64,
    pub centers: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilestoneRow {
    pub label: MilestoneLabel,
    pub router_count: usize,
    pub all_connected: bool,
    pub required_pct: f64,
    pub optional_pct: f64,
    pub centers: Vec<Cell>,
}

impl MilestoneRow {
    fn from_trace(label: MilestoneLabel, row: &TraceRow) -> Self {
        Self {
            label,
            router_count: row.router_count,
            all_connected: row.connected,
            required_pct: row.required_pct,
            optional_pct: row.optional_pct,
            centers: row.centers.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub optimizer: OptimizerConfig,
    pub rng: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub config: ConfigEcho,
    pub nr_min: usize,
    pub trace: Vec<TraceRow>,
    pub milestones: Vec<MilestoneRow>,
    pub duration_secs: f64,
}

impl RunReport {
    pub fn milestone(&self, label: MilestoneLabel) -> Option<&MilestoneRow> {
        self.milestones.iter().find(|m| m.label == label)
    }

    /// Whole-percent required coverage reached with the initial router count.
    pub fn max_required_whole_pct(&self) -> i64 {
        self.trace.first().map_or(0, |r| whole_pct(r.required_pct))
    }

    /// Router count a threshold-stopping planner would settle on: walking down
    /// from `nr_init`, the last count before the placement either disconnects
    /// or drops below the coverage threshold (whole percent). `None` when the
    /// initial placement already fails.
    pub fn threshold_count(&self) -> Option<usize> {
        let threshold = self
            .config
            .optimizer
            .coverage_threshold
            .unwrap_or((self.max_required_whole_pct() - 2) as f64);
        self.trace
            .iter()
            .take_while(|r| r.connected && whole_pct(r.required_pct) as f64 >= threshold)
            .last()
            .map(|r| r.router_count)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn whole_pct(pct: f64) -> i64 {
    pct.round() as i64
}

/// Picks the router to drop. Ties are broken uniformly with `rng`; no draw is
/// made when the extremum is unique.
pub fn select_router_to_remove<R: Rng>(
    grid: &RegionGrid,
    map: &CoverDepthMap,
    placement: &Placement,
    strategy: RemovalStrategy,
    rng: &mut R,
) -> Result<usize> {
    if placement.len() < 2 {
        return Err(Error::TooFewRouters(placement.len()));
    }
    let disk = Disk::new(placement.radius);
    // every strategy maximises a score
    let scores: Vec<i64> = placement
        .centers
        .iter()
        .map(|&c| {
            let s = stats_with(grid, map, c, &disk);
            match strategy {
                RemovalStrategy::MinSingleCoverage => -(s.single_coverage as i64),
                RemovalStrategy::MaxOptionalCoverage => s.optional_coverage as i64,
                RemovalStrategy::MaxOverCoverage => s.over_coverage as i64,
            }
        })
        .collect();
    let best = *scores.iter().max().expect("non-empty");
    let ties: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == best).collect();
    Ok(if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.gen_range(0..ties.len())]
    })
}

/// Derives the milestone rows from a reduction trace ordered by decreasing
/// router count. The first row is `nr_init`, the last `nr_min`.
pub fn milestones(trace: &[TraceRow]) -> Vec<MilestoneRow> {
    let Some(first) = trace.first() else {
        return Vec::new();
    };
    let max = whole_pct(first.required_pct);
    let fewest = |pred: &dyn Fn(&TraceRow) -> bool| {
        trace
            .iter()
            .filter(|r| pred(r))
            .min_by_key(|r| r.router_count)
    };

    let mut rows = vec![MilestoneRow::from_trace(MilestoneLabel::NrInit, first)];
    for (label, floor) in [
        (MilestoneLabel::NrSame, max),
        (MilestoneLabel::NrMax1, max - 1),
        (MilestoneLabel::NrMax2, max - 2),
    ] {
        let row = fewest(&|r| whole_pct(r.required_pct) >= floor).expect("nr_init row qualifies");
        rows.push(MilestoneRow::from_trace(label, row));
    }
    if let Some(row) = fewest(&|r| r.connected) {
        rows.push(MilestoneRow::from_trace(MilestoneLabel::NrCon, row));
    }
    let last = trace.last().expect("non-empty");
    rows.push(MilestoneRow::from_trace(MilestoneLabel::NrMin, last));
    rows
}

/// Optimises `placement`, records the best state, removes one router and
/// repeats until `floor` routers remain. Rows are ordered by decreasing
/// router count, starting with the initial count.
pub fn reduce<R: Rng>(
    grid: &RegionGrid,
    config: &OptimizerConfig,
    mut placement: Placement,
    floor: usize,
    rng: &mut R,
) -> Result<Vec<TraceRow>> {
    let floor = floor.max(1);
    let radius = placement.radius;
    let mut trace = Vec::with_capacity(placement.len().saturating_sub(floor) + 1);
    loop {
        let mut map = CoverDepthMap::from_placement(grid, &placement);
        let outcome = optimize(grid, &mut placement, &mut map, config, rng)?;
        let best = outcome.best;
        let best_map = CoverDepthMap::from_placement(grid, &best);
        let metrics = coverage_metrics(grid, &best_map);
        debug_assert_eq!(metrics.required_covered, outcome.best_fitness as usize);
        trace.push(TraceRow {
            router_count: best.len(),
            connected: is_connected(&best.centers, radius),
            required_pct: metrics.required_pct,
            optional_pct: metrics.optional_pct,
            centers: best.centers.clone(),
        });
        if best.len() <= floor {
            return Ok(trace);
        }
        let victim = select_router_to_remove(grid, &best_map, &best, config.removal_strategy, rng)?;
        placement = best;
        placement.centers.remove(victim);
    }
}

/// Runs the full reduction for one seed: `ceil(init_factor * nr_min)` random
/// routers reduced down to `nr_min`.
pub fn plan(grid: &RegionGrid, config: &OptimizerConfig, instance: &str) -> Result<RunReport> {
    config.validate()?;
    let started = Instant::now();
    let floor = nr_min(grid, config.radius)?;
    let start_count = initial_router_count(floor, config.init_factor);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let placement = initialize_placement(grid, config.radius, start_count, &mut rng)?;
    let trace = reduce(grid, config, placement, floor, &mut rng)?;

    Ok(RunReport {
        instance: instance.to_string(),
        config: ConfigEcho {
            optimizer: config.clone(),
            rng: RNG_NAME.to_string(),
        },
        nr_min: floor,
        milestones: milestones(&trace),
        trace,
        duration_secs: started.elapsed().as_secs_f64(),
    })
}
