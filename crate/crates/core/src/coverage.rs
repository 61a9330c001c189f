//! Disk coverage over the grid and the incremental fitness bookkeeping.
//!
//! A router at cell `(x, y)` with radius `r` covers every in-bounds cell
//! `(a, b)` with `(x - a)^2 + (y - b)^2 < r^2`. The strict inequality is kept
//! literally, so a radius-2 router covers only the 3×3 block around it.
//!
//! [`CoverDepthMap`] counts, for each cell, how many routers cover it. Fitness
//! is the number of required cells with depth >= 1. Adding a router gains the
//! required cells whose depth goes 0 -> 1; removing one loses the required
//! cells whose depth goes 1 -> 0. With those deltas the running fitness
//! `f + gained - lost` is exactly the full recount after any sequence of
//! operations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::{Cell, RegionGrid};

/// Router positions sharing one coverage radius (in cell units).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub radius: u32,
    pub centers: Vec<Cell>,
}

impl Placement {
    pub fn new(radius: u32, centers: Vec<Cell>) -> Self {
        Self { radius, centers }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Checks that every center sits on a required, placeable cell.
    pub fn validate(&self, grid: &RegionGrid) -> Result<()> {
        if self.radius == 0 {
            return Err(Error::InvalidParameter("radius must be >= 1".into()));
        }
        for &c in &self.centers {
            if !grid.contains(c) || !grid.is_legal(c) {
                return Err(Error::IllegalCenter { x: c.x, y: c.y });
            }
        }
        Ok(())
    }
}

/// Offsets of a radius-`r` disk relative to its center, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disk {
    radius: u32,
    offsets: Vec<(i64, i64)>,
}

impl Disk {
    pub fn new(radius: u32) -> Self {
        let r = radius as i64;
        let r2 = r * r;
        let mut offsets = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy < r2 {
                    offsets.push((dx, dy));
                }
            }
        }
        Self { radius, offsets }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Cell count of the unclipped disk.
    pub fn area(&self) -> usize {
        self.offsets.len()
    }

    pub fn offsets(&self) -> &[(i64, i64)] {
        &self.offsets
    }

    /// Whether `cell` lies in the disk centred at `center`.
    #[inline]
    pub fn contains(&self, center: Cell, cell: Cell) -> bool {
        let r = self.radius as u64;
        center.dist2(cell) < r * r
    }

    /// In-bounds cells of the disk at `center`, row-major.
    pub fn cells(
        &self,
        center: Cell,
        width: usize,
        height: usize,
    ) -> impl Iterator<Item = Cell> + '_ {
        self.offsets
            .iter()
            .filter_map(move |&(dx, dy)| center.offset(dx, dy, width, height))
    }
}

/// In-bounds cells covered by a router at `center`, in row-major order.
pub fn disk_cells(center: Cell, radius: u32, width: usize, height: usize) -> Vec<Cell> {
    Disk::new(radius).cells(center, width, height).collect()
}

/// Per-cell count of covering routers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverDepthMap {
    width: usize,
    height: usize,
    depth: Vec<u32>,
}

impl CoverDepthMap {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            depth: vec![0; width * height],
        }
    }

    pub fn for_grid(grid: &RegionGrid) -> Self {
        Self::new(grid.width(), grid.height())
    }

    /// Full rebuild from a placement.
    pub fn from_placement(grid: &RegionGrid, placement: &Placement) -> Self {
        let disk = Disk::new(placement.radius);
        let mut map = Self::for_grid(grid);
        for &c in &placement.centers {
            map.add_router(grid, c, &disk);
        }
        map
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn depth(&self, cell: Cell) -> u32 {
        self.depth[cell.y * self.width + cell.x]
    }

    pub fn depths(&self) -> &[u32] {
        &self.depth
    }

    /// Sum of all depths; equals the total clipped disk size of all routers.
    pub fn total_depth(&self) -> u64 {
        self.depth.iter().map(|&d| d as u64).sum()
    }

    /// Adds a router and returns the number of required cells it newly covers.
    pub fn add_router(&mut self, grid: &RegionGrid, center: Cell, disk: &Disk) -> u32 {
        let cover = grid.cover_bits();
        let mut gained = 0;
        for c in disk.cells(center, self.width, self.height) {
            let i = c.y * self.width + c.x;
            if self.depth[i] == 0 && cover[i] {
                gained += 1;
            }
            self.depth[i] += 1;
        }
        gained
    }

    /// Removes a router and returns the number of required cells left
    /// uncovered. Fails without touching the map if any disk cell is already
    /// at depth 0.
    pub fn remove_router(&mut self, grid: &RegionGrid, center: Cell, disk: &Disk) -> Result<u32> {
        if let Some(c) = disk
            .cells(center, self.width, self.height)
            .find(|&c| self.depth(c) == 0)
        {
            return Err(Error::DepthUnderflow { x: c.x, y: c.y });
        }
        let cover = grid.cover_bits();
        let mut lost = 0;
        for c in disk.cells(center, self.width, self.height) {
            let i = c.y * self.width + c.x;
            self.depth[i] -= 1;
            if self.depth[i] == 0 && cover[i] {
                lost += 1;
            }
        }
        Ok(lost)
    }

    /// Fitness change of moving the router at `from` to `to`, without
    /// modifying the map. Equals `add(to) - remove(from)` applied in either
    /// order.
    pub fn move_delta(&self, grid: &RegionGrid, from: Cell, to: Cell, disk: &Disk) -> i64 {
        let cover = grid.cover_bits();
        let mut lost = 0i64;
        for c in disk.cells(from, self.width, self.height) {
            let i = c.y * self.width + c.x;
            if cover[i] && self.depth[i] == 1 && !disk.contains(to, c) {
                lost += 1;
            }
        }
        let mut gained = 0i64;
        for c in disk.cells(to, self.width, self.height) {
            let i = c.y * self.width + c.x;
            if cover[i] && self.depth[i] == 0 {
                gained += 1;
            }
        }
        gained - lost
    }
}

/// Number of required cells with depth >= 1.
pub fn fitness(grid: &RegionGrid, map: &CoverDepthMap) -> u32 {
    grid.cover_bits()
        .iter()
        .zip(map.depths())
        .filter(|(&c, &d)| c && d > 0)
        .count() as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageMetrics {
    pub required_covered: usize,
    pub required_total: usize,
    pub optional_covered: usize,
    pub optional_total: usize,
    pub required_pct: f64,
    pub optional_pct: f64,
}

fn pct(part: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * part as f64 / total as f64
    }
}

pub fn coverage_metrics(grid: &RegionGrid, map: &CoverDepthMap) -> CoverageMetrics {
    let mut m = CoverageMetrics {
        required_covered: 0,
        required_total: 0,
        optional_covered: 0,
        optional_total: 0,
        required_pct: 0.0,
        optional_pct: 0.0,
    };
    for (&cover, &depth) in grid.cover_bits().iter().zip(map.depths()) {
        match (cover, depth > 0) {
            (true, covered) => {
                m.required_total += 1;
                m.required_covered += covered as usize;
            }
            (false, covered) => {
                m.optional_total += 1;
                m.optional_covered += covered as usize;
            }
        }
    }
    m.required_pct = pct(m.required_covered, m.required_total);
    m.optional_pct = pct(m.optional_covered, m.optional_total);
    m
}

/// Per-router counts used by the removal strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouterStats {
    /// Required cells covered by this router alone.
    pub single_coverage: usize,
    /// Optional cells inside this router's disk.
    pub optional_coverage: usize,
    /// Required cells inside the disk covered by at least one other router.
    pub over_coverage: usize,
}

pub fn router_stats(
    grid: &RegionGrid,
    map: &CoverDepthMap,
    placement: &Placement,
    index: usize,
) -> Result<RouterStats> {
    let center = *placement.centers.get(index).ok_or(Error::RouterIndex {
        index,
        len: placement.len(),
    })?;
    Ok(stats_with(grid, map, center, &Disk::new(placement.radius)))
}

pub(crate) fn stats_with(
    grid: &RegionGrid,
    map: &CoverDepthMap,
    center: Cell,
    disk: &Disk,
) -> RouterStats {
    let mut s = RouterStats {
        single_coverage: 0,
        optional_coverage: 0,
        over_coverage: 0,
    };
    for c in disk.cells(center, grid.width(), grid.height()) {
        let depth = map.depth(c);
        if grid.cover(c) {
            match depth {
                0 => {}
                1 => s.single_coverage += 1,
                _ => s.over_coverage += 1,
            }
        } else if depth > 0 {
            s.optional_coverage += 1;
        }
    }
    s
}

/// Area-ratio lower bound on the router count:
/// `ceil(required_area / (radius^2 * 3.14))`.
///
/// Evaluated in integers as `ceil(100 * area / (314 * radius^2))` so boundary
/// cases such as 452 / 452.16 are exact.
pub fn nr_min_for_area(required_area: usize, radius: u32) -> Result<usize> {
    if required_area == 0 {
        return Err(Error::ZeroRequiredArea);
    }
    if radius == 0 {
        return Err(Error::InvalidParameter("radius must be >= 1".into()));
    }
    let num = 100 * required_area as u128;
    let den = 314 * (radius as u128) * (radius as u128);
    Ok(num.div_ceil(den) as usize)
}

pub fn nr_min(grid: &RegionGrid, radius: u32) -> Result<usize> {
    nr_min_for_area(grid.required_area(), radius)
}
