//! Placement planner for rural wireless mesh router networks.
//!
//! A region is a grid of cells that are required or optional for coverage and
//! placeable or prohibited for routers. The planner places routers with a
//! fixed-temperature Metropolis search, then removes them one by one while
//! tracking coverage and connectivity.

pub mod bench;
pub mod cli;
pub mod connectivity;
pub mod coverage;
pub mod error;
pub mod metropolis;
pub mod reduction;
pub mod region;
pub mod render;

pub use connectivity::{are_linked, is_connected, AdjacencyList};
pub use coverage::{
    coverage_metrics, disk_cells, fitness, nr_min, router_stats, CoverDepthMap, CoverageMetrics,
    Disk, Placement, RouterStats,
};
pub use error::{Error, Result};
pub use metropolis::{
    accept, initial_router_count, initialize_placement, optimize, propose_move, MoveProposal,
    OptimizerConfig, RemovalStrategy,
};
pub use reduction::{
    plan, reduce, select_router_to_remove, MilestoneLabel, MilestoneRow, RunReport, TraceRow,
};
pub use region::{
    generate_region, parse_region, required_area, serialize_region, Cell, GeneratorParams,
    RegionGrid,
};
pub use render::render_coverage;
