//! Multi-run benchmark: independent plans on one region, seeds `base + i`,
//! aggregated per milestone.
//!
//! Runs may execute on a thread pool, but results are collected in run order
//! and the output never includes timing, so the report bytes do not depend on
//! scheduling.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metropolis::OptimizerConfig;
use crate::reduction::{plan, ConfigEcho, MilestoneLabel, MilestoneRow, RNG_NAME};
use crate::region::RegionGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub instance: String,
    pub runs: usize,
    pub base_seed: u64,
    /// Template for every run; its seed is replaced by `base_seed + i`.
    pub config: OptimizerConfig,
    pub jobs: usize,
}

impl BenchSpec {
    pub fn seed_for(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    /// 1-based.
    pub run: usize,
    pub seed: u64,
    pub nr_min: usize,
    pub milestones: Vec<MilestoneRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            (v[n / 2 - 1] + v[n / 2]) / 2.0
        };
        Some(Self {
            min: v[0],
            median,
            max: v[n - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub label: MilestoneLabel,
    /// Runs that produced this milestone.
    pub runs: usize,
    pub connected_runs: usize,
    pub router_count: Summary,
    pub required_pct: Summary,
    pub optional_pct: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub instance: String,
    pub base_seed: u64,
    pub config: ConfigEcho,
    pub runs: Vec<BenchRun>,
    pub aggregate: Vec<AggregateRow>,
}

pub fn run_bench(grid: &RegionGrid, spec: &BenchSpec) -> Result<BenchReport> {
    if spec.runs == 0 {
        return Err(Error::InvalidParameter("runs must be >= 1".into()));
    }
    spec.config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;

    let runs: Vec<BenchRun> = pool.install(|| {
        (0..spec.runs)
            .into_par_iter()
            .map(|i| {
                let config = OptimizerConfig {
                    seed: spec.seed_for(i),
                    ..spec.config.clone()
                };
                let report = plan(grid, &config, &spec.instance)?;
                Ok(BenchRun {
                    run: i + 1,
                    seed: config.seed,
                    nr_min: report.nr_min,
                    milestones: report.milestones,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let aggregate = aggregate(&runs);
    Ok(BenchReport {
        instance: spec.instance.clone(),
        base_seed: spec.base_seed,
        config: ConfigEcho {
            optimizer: OptimizerConfig {
                seed: spec.base_seed,
                ..spec.config.clone()
            },
            rng: RNG_NAME.to_string(),
        },
        runs,
        aggregate,
    })
}

pub fn aggregate(runs: &[BenchRun]) -> Vec<AggregateRow> {
    MilestoneLabel::ALL
        .into_iter()
        .filter_map(|label| {
            let rows: Vec<&MilestoneRow> = runs
                .iter()
                .filter_map(|r| r.milestones.iter().find(|m| m.label == label))
                .collect();
            let col = |f: fn(&MilestoneRow) -> f64| rows.iter().map(|m| f(m)).collect::<Vec<_>>();
            Some(AggregateRow {
                label,
                runs: rows.len(),
                connected_runs: rows.iter().filter(|m| m.all_connected).count(),
                router_count: Summary::of(&col(|m| m.router_count as f64))?,
                required_pct: Summary::of(&col(|m| m.required_pct))?,
                optional_pct: Summary::of(&col(|m| m.optional_pct))?,
            })
        })
        .collect()
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

/// Plain-text tables: one section per run, then the aggregate section.
pub fn format_report(report: &BenchReport) -> String {
    let cfg = &report.config.optimizer;
    let mut out = String::new();
    let _ = writeln!(out, "instance: {}", report.instance);
    let _ = writeln!(
        out,
        "radius {}  T {}  iters {}  stop {}  init factor {}  strategy {}  base seed {}  rng {}",
        cfg.radius,
        cfg.temperature,
        cfg.num_iter,
        cfg.stop,
        cfg.init_factor,
        cfg.removal_strategy,
        report.base_seed,
        report.config.rng
    );

    for run in &report.runs {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "== Run {} (seed {}, nr_min {}) ==",
            run.run, run.seed, run.nr_min
        );
        let _ = writeln!(
            out,
            "{:<4} {:<9} {:>16}  {:<22} {:>17} {:>17}",
            "Run",
            "Label",
            "Number of Router",
            "All routers Connected?",
            "Required Coverage",
            "Optional Coverage"
        );
        for m in &run.milestones {
            let _ = writeln!(
                out,
                "{:<4} {:<9} {:>16}  {:<22} {:>16.2}% {:>16.2}%",
                run.run,
                m.label,
                m.router_count,
                yes_no(m.all_connected),
                m.required_pct,
                m.optional_pct
            );
        }
    }

    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "== Aggregate over {} runs (min / median / max) ==",
        report.runs.len()
    );
    let _ = writeln!(
        out,
        "{:<9} {:>22} {:>26} {:>26} {:>10}",
        "Label", "Number of Router", "Required Coverage %", "Optional Coverage %", "Connected"
    );
    for a in &report.aggregate {
        let _ = writeln!(
            out,
            "{:<9} {:>22} {:>26} {:>26} {:>10}",
            a.label,
            format!(
                "{:.0} / {:.1} / {:.0}",
                a.router_count.min, a.router_count.median, a.router_count.max
            ),
            format!(
                "{:.2} / {:.2} / {:.2}",
                a.required_pct.min, a.required_pct.median, a.required_pct.max
            ),
            format!(
                "{:.2} / {:.2} / {:.2}",
                a.optional_pct.min, a.optional_pct.median, a.optional_pct.max
            ),
            format!("{}/{}", a.connected_runs, a.runs)
        );
    }
    out
}
