//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::bench::{format_report, run_bench, BenchSpec};
use crate::coverage::{CoverDepthMap, Placement};
use crate::error::Error;
use crate::metropolis::{default_hops, OptimizerConfig, RemovalStrategy};
use crate::reduction::{plan, MilestoneLabel, RunReport};
use crate::region::{generate_region, parse_region, serialize_region, GeneratorParams, RegionGrid};
use crate::render::render_coverage;

#[derive(Debug, Parser)]
#[command(name = "meshplan", version, about = "Mesh router placement planner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random EA-REGION v1 instance.
    Gen(GenArgs),
    /// Run one full reduction and write its JSON report.
    Solve(SolveArgs),
    /// Run several seeded reductions and tabulate the milestones.
    Bench(BenchArgs),
    /// Render a milestone placement from a report as a PPM image.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
    pub width: u32,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
    pub height: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.3)]
    pub required_frac: f64,
    #[arg(long, default_value_t = 0.05)]
    pub prohibited_frac: f64,
    #[arg(long, default_value_t = 3)]
    pub blobs_min: usize,
    #[arg(long, default_value_t = 6)]
    pub blobs_max: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Router radius in cells.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    pub radius: u32,
    #[arg(long = "temp", default_value_t = 0.1)]
    pub temperature: f64,
    #[arg(long, default_value_t = 4000, value_parser = clap::value_parser!(u32).range(1..))]
    pub iters: u32,
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u32).range(1..))]
    pub stop: u32,
    #[arg(long, default_value_t = 1.5)]
    pub init_factor: f64,
    /// min-single, max-optional or max-over.
    #[arg(long, default_value = "min-single")]
    pub strategy: RemovalStrategy,
    /// Required coverage percentage to keep; defaults to two points under the initial maximum.
    #[arg(long)]
    pub threshold: Option<f64>,
}

impl PlanArgs {
    fn config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            temperature: self.temperature,
            num_iter: self.iters,
            stop: self.stop,
            radius: self.radius,
            init_factor: self.init_factor,
            coverage_threshold: self.threshold,
            seed,
            removal_strategy: self.strategy,
            hop_distances: default_hops(self.radius),
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub region: PathBuf,
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON report path.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional PPM rendering of the nr_max_2 placement.
    #[arg(long)]
    pub render: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub region: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub runs: usize,
    /// Base seed; run i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Text report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional JSON report path.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub region: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value = "nr_max_2")]
    pub milestone: MilestoneLabel,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn runtime(context: &str, e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(format!("{context}: {e}"))
}

/// Parses `std::env::args` and runs the selected command.
pub fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            ExitCode::from(code)
        }
    }
}

pub fn run(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Render(a) => cmd_render(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| runtime(&format!("cannot write {}", path.display()), e))
}

fn load_region(path: &Path) -> Result<RegionGrid, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| runtime(&format!("cannot read {}", path.display()), e))?;
    parse_region(&text).map_err(|e| runtime(&path.display().to_string(), e))
}

fn instance_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_gen(a: &GenArgs) -> Result<(), Failure> {
    let params = GeneratorParams {
        width: a.width as usize,
        height: a.height as usize,
        seed: a.seed,
        required_fraction: a.required_frac,
        prohibited_fraction: a.prohibited_frac,
        blob_count: (a.blobs_min, a.blobs_max),
    };
    let grid = generate_region(&params)?;
    write_file(&a.out, serialize_region(&grid).as_bytes())?;
    println!(
        "wrote {} ({}x{}, {} required, {} prohibited)",
        a.out.display(),
        grid.width(),
        grid.height(),
        grid.required_area(),
        grid.prohibited_area()
    );
    Ok(())
}

fn milestone_state(
    grid: &RegionGrid,
    report: &RunReport,
    label: MilestoneLabel,
) -> Result<(CoverDepthMap, Placement), Failure> {
    let row = report
        .milestone(label)
        .ok_or_else(|| Failure::Runtime(format!("report has no {label} milestone")))?;
    let placement = Placement::new(report.config.optimizer.radius, row.centers.clone());
    placement
        .validate(grid)
        .map_err(|e| runtime("report does not match region", e))?;
    Ok((CoverDepthMap::from_placement(grid, &placement), placement))
}

fn print_milestones(report: &RunReport) {
    println!(
        "{:<9} {:>8} {:>10} {:>10} {:>10}",
        "label", "routers", "connected", "required%", "optional%"
    );
    for m in &report.milestones {
        println!(
            "{:<9} {:>8} {:>10} {:>10.2} {:>10.2}",
            m.label,
            m.router_count,
            if m.all_connected { "yes" } else { "no" },
            m.required_pct,
            m.optional_pct
        );
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<(), Failure> {
    let config = a.plan.config(a.seed);
    config.validate()?;
    let grid = load_region(&a.region)?;
    let report = plan(&grid, &config, &instance_name(&a.region))?;
    write_file(&a.out, report.to_json()?.as_bytes())?;

    print_milestones(&report);
    match report.threshold_count() {
        Some(n) => println!("threshold stop: {n} routers"),
        None => println!("threshold stop: initial placement already below threshold"),
    }
    println!(
        "nr_min {}  time {:.2}s",
        report.nr_min, report.duration_secs
    );

    if let Some(path) = &a.render {
        let (map, placement) = milestone_state(&grid, &report, MilestoneLabel::NrMax2)?;
        write_file(path, &render_coverage(&grid, &map, &placement))?;
    }
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> Result<(), Failure> {
    let config = a.plan.config(a.seed);
    config.validate()?;
    if a.runs == 0 || a.jobs == 0 {
        return Err(Failure::Usage("--runs and --jobs must be >= 1".into()));
    }
    let grid = load_region(&a.region)?;
    let spec = BenchSpec {
        instance: instance_name(&a.region),
        runs: a.runs,
        base_seed: a.seed,
        config,
        jobs: a.jobs,
    };
    let report = run_bench(&grid, &spec)?;
    let text = format_report(&report);
    match &a.out {
        Some(path) => write_file(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    if let Some(path) = &a.json {
        let json = serde_json::to_string_pretty(&report).map_err(Error::from)?;
        write_file(path, json.as_bytes())?;
    }
    Ok(())
}

fn cmd_render(a: &RenderArgs) -> Result<(), Failure> {
    let grid = load_region(&a.region)?;
    let text = fs::read_to_string(&a.report)
        .map_err(|e| runtime(&format!("cannot read {}", a.report.display()), e))?;
    let report = RunReport::from_json(&text)?;
    let (map, placement) = milestone_state(&grid, &report, a.milestone)?;
    write_file(&a.out, &render_coverage(&grid, &map, &placement))
}
