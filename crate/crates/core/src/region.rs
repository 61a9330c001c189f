//! Grid region model: elementary areas (cells) with a coverage requirement
//! and a placement permission each.
//!
//! Cells are addressed as `(x, y)` with `x` the column and `y` the row, origin
//! at the top-left corner. Storage and the text format are both row-major.
//!
//! # EA-REGION v1
//!
//! ```text
//! EA-REGION v1 <width> <height>
//! <height lines of exactly <width> characters>
//! ```
//!
//! | char | cover | place |
//! |------|-------|-------|
//! | `#`  | 1     | 1     |
//! | `r`  | 1     | 0     |
//! | `.`  | 0     | 1     |
//! | `X`  | 0     | 0     |

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAGIC: &str = "EA-REGION";
const VERSION: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    /// Squared Euclidean distance between two cell positions.
    pub fn dist2(self, other: Cell) -> u64 {
        let dx = self.x.abs_diff(other.x) as u64;
        let dy = self.y.abs_diff(other.y) as u64;
        dx * dx + dy * dy
    }

    /// Shifts the cell by a signed offset, returning `None` when the result
    /// falls outside `width × height`.
    pub fn offset(self, dx: i64, dy: i64, width: usize, height: usize) -> Option<Cell> {
        let x = self.x as i64 + dx;
        let y = self.y as i64 + dy;
        if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
            return None;
        }
        Some(Cell::new(x as usize, y as usize))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionGrid {
    width: usize,
    height: usize,
    cover: Vec<bool>,
    place: Vec<bool>,
}

impl RegionGrid {
    /// Builds a grid from row-major coverage and placement bitmaps.
    pub fn new(width: usize, height: usize, cover: Vec<bool>, place: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid dimensions must be positive, got {width}x{height}"
            )));
        }
        let n = width * height;
        if cover.len() != n || place.len() != n {
            return Err(Error::InvalidParameter(format!(
                "bitmap sizes ({}, {}) do not match {width}x{height}",
                cover.len(),
                place.len()
            )));
        }
        let grid = Self {
            width,
            height,
            cover,
            place,
        };
        if !grid.cells().any(|c| grid.is_legal(c)) {
            return Err(Error::NoPlaceableRequired);
        }
        Ok(grid)
    }

    /// Builds a grid by evaluating `f(cell) -> (cover, place)` on every cell.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(Cell) -> (bool, bool),
    ) -> Result<Self> {
        let mut cover = Vec::with_capacity(width * height);
        let mut place = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let (c, p) = f(Cell::new(x, y));
                cover.push(c);
                place.push(p);
            }
        }
        Self::new(width, height, cover, place)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, cell: Cell) -> usize {
        debug_assert!(self.contains(cell));
        cell.y * self.width + cell.x
    }

    #[inline]
    pub fn contains(&self, cell: Cell) -> bool {
        cell.x < self.width && cell.y < self.height
    }

    #[inline]
    pub fn cover(&self, cell: Cell) -> bool {
        self.cover[self.index(cell)]
    }

    #[inline]
    pub fn place(&self, cell: Cell) -> bool {
        self.place[self.index(cell)]
    }

    pub(crate) fn cover_bits(&self) -> &[bool] {
        &self.cover
    }

    /// A router may stand on a cell only if the cell is required and placeable.
    #[inline]
    pub fn is_legal(&self, cell: Cell) -> bool {
        let i = self.index(cell);
        self.cover[i] && self.place[i]
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Cell::new(x, y)))
    }

    /// Cells where a router may be placed, row-major.
    pub fn legal_cells(&self) -> Vec<Cell> {
        self.cells().filter(|&c| self.is_legal(c)).collect()
    }

    pub fn required_area(&self) -> usize {
        self.cover.iter().filter(|&&c| c).count()
    }

    pub fn optional_area(&self) -> usize {
        self.len() - self.required_area()
    }

    pub fn prohibited_area(&self) -> usize {
        self.place.iter().filter(|&&p| !p).count()
    }
}

/// Number of cells whose coverage is required.
pub fn required_area(grid: &RegionGrid) -> usize {
    grid.required_area()
}

fn cell_char(cover: bool, place: bool) -> char {
    match (cover, place) {
        (true, true) => '#',
        (true, false) => 'r',
        (false, true) => '.',
        (false, false) => 'X',
    }
}

fn char_cell(ch: char) -> Option<(bool, bool)> {
    match ch {
        '#' => Some((true, true)),
        'r' => Some((true, false)),
        '.' => Some((false, true)),
        'X' => Some((false, false)),
        _ => None,
    }
}

/// Parses an EA-REGION v1 document.
pub fn parse_region(text: &str) -> Result<RegionGrid> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedHeader("empty input".into()))?;
    let (width, height) = parse_header(header)?;

    let rows: Vec<&str> = lines.collect();
    if rows.len() != height {
        return Err(Error::RowCount {
            expected: height,
            found: rows.len(),
        });
    }

    let mut cover = Vec::with_capacity(width * height);
    let mut place = Vec::with_capacity(width * height);
    for (i, row) in rows.iter().enumerate() {
        let line = i + 2;
        let found = row.chars().count();
        if found != width {
            return Err(Error::RowLength {
                line,
                expected: width,
                found,
            });
        }
        for (column, ch) in row.chars().enumerate() {
            let (c, p) = char_cell(ch).ok_or(Error::UnknownCell {
                line,
                column: column + 1,
                ch,
            })?;
            cover.push(c);
            place.push(p);
        }
    }
    RegionGrid::new(width, height, cover, place)
}

fn parse_header(header: &str) -> Result<(usize, usize)> {
    let malformed = || Error::MalformedHeader(header.to_string());
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 4 || fields[0] != MAGIC || fields[1] != VERSION {
        return Err(malformed());
    }
    let dim = |s: &str| -> Result<usize> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        s.parse::<usize>().map_err(|_| malformed())
    };
    let width = dim(fields[2])?;
    let height = dim(fields[3])?;
    if width == 0 || height == 0 {
        return Err(malformed());
    }
    Ok((width, height))
}

/// Writes the canonical EA-REGION v1 text for `grid`.
pub fn serialize_region(grid: &RegionGrid) -> String {
    let mut out = String::with_capacity(24 + (grid.width + 1) * grid.height);
    out.push_str(&format!(
        "{MAGIC} {VERSION} {} {}\n",
        grid.width, grid.height
    ));
    for y in 0..grid.height {
        for x in 0..grid.width {
            let c = Cell::new(x, y);
            out.push(cell_char(grid.cover(c), grid.place(c)));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub required_fraction: f64,
    pub prohibited_fraction: f64,
    /// Inclusive range of blob counts.
    pub blob_count: (usize, usize),
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            width: 200,
            height: 200,
            seed: 0,
            required_fraction: 0.3,
            prohibited_fraction: 0.05,
            blob_count: (3, 6),
        }
    }
}

impl GeneratorParams {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.width == 0 || self.height == 0 {
            return bad(format!(
                "width and height must be >= 1, got {}x{}",
                self.width, self.height
            ));
        }
        if !(0.0..=1.0).contains(&self.required_fraction) {
            return bad(format!(
                "required fraction {} not in [0, 1]",
                self.required_fraction
            ));
        }
        if !(0.0..=1.0).contains(&self.prohibited_fraction) {
            return bad(format!(
                "prohibited fraction {} not in [0, 1]",
                self.prohibited_fraction
            ));
        }
        if self.prohibited_fraction >= 1.0 {
            return bad("prohibited fraction 1 leaves no placeable cell".into());
        }
        if self.required_target() == 0 {
            return bad(format!(
                "required fraction {} yields no required cell on a {}x{} grid",
                self.required_fraction, self.width, self.height
            ));
        }
        let (lo, hi) = self.blob_count;
        if lo == 0 || lo > hi {
            return bad(format!("blob count range {lo}..={hi} is empty or zero"));
        }
        Ok(())
    }

    fn required_target(&self) -> usize {
        (self.required_fraction * (self.width * self.height) as f64).round() as usize
    }
}

/// Mutable canvas used by the generator.
struct Canvas {
    width: usize,
    height: usize,
    cover: Vec<bool>,
    required: Vec<Cell>,
}

impl Canvas {
    fn set(&mut self, cell: Cell) {
        let i = cell.y * self.width + cell.x;
        if !self.cover[i] {
            self.cover[i] = true;
            self.required.push(cell);
        }
    }

    fn stamp_rect(&mut self, center: Cell, w: usize, h: usize) {
        let x0 = center.x as i64 - (w / 2) as i64;
        let y0 = center.y as i64 - (h / 2) as i64;
        for y in y0..y0 + h as i64 {
            for x in x0..x0 + w as i64 {
                if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
                    self.set(Cell::new(x as usize, y as usize));
                }
            }
        }
    }

    fn stamp_disk(&mut self, center: Cell, radius: f64) {
        let reach = radius.ceil() as i64;
        let r2 = radius * radius;
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                if ((dx * dx + dy * dy) as f64) < r2 {
                    if let Some(c) = center.offset(dx, dy, self.width, self.height) {
                        self.set(c);
                    }
                }
            }
        }
    }

    /// Stamps a rectangle or a disk of roughly `area` cells around `center`.
    fn stamp_shape(&mut self, rng: &mut ChaCha8Rng, center: Cell, area: f64) {
        let area = area.max(1.0);
        if rng.gen_bool(0.5) {
            let aspect: f64 = rng.gen_range(0.5..2.0);
            let w = (area * aspect).sqrt().round().max(1.0) as usize;
            let h = (area / w as f64).round().max(1.0) as usize;
            self.stamp_rect(center, w, h);
        } else {
            // a discrete disk of radius rho holds about pi * rho^2 cells
            let rho = (area / std::f64::consts::PI).sqrt().max(0.6);
            self.stamp_disk(center, rho);
        }
    }
}

/// Generates a random region whose required cells form one irregular area
/// built from overlapping rectangles and disks.
///
/// The first blob is centred at a uniformly random cell; every later shape is
/// anchored on an already-required cell, so the area of interest is a single
/// 4-connected component. Prohibited cells are sprinkled independently over
/// the whole grid.
pub fn generate_region(params: &GeneratorParams) -> Result<RegionGrid> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (w, h) = (params.width, params.height);
    let target = params.required_target();

    let mut canvas = Canvas {
        width: w,
        height: h,
        cover: vec![false; w * h],
        required: Vec::with_capacity(target),
    };

    let blobs = rng.gen_range(params.blob_count.0..=params.blob_count.1);
    for blob in 0..blobs {
        let remaining = target.saturating_sub(canvas.required.len());
        if remaining == 0 {
            break;
        }
        let budget = remaining as f64 / (blobs - blob) as f64;
        let anchor = if canvas.required.is_empty() {
            Cell::new(rng.gen_range(0..w), rng.gen_range(0..h))
        } else {
            canvas.required[rng.gen_range(0..canvas.required.len())]
        };
        // one core shape plus a few satellites hung on its cells
        let satellites = rng.gen_range(1..=3usize);
        let core_share: f64 = rng.gen_range(0.4..0.7);
        canvas.stamp_shape(&mut rng, anchor, budget * core_share);
        let start = canvas.required.len();
        let per_satellite = budget * (1.0 - core_share) / satellites as f64;
        for _ in 0..satellites {
            let pool = &canvas.required;
            let anchor = if start > 0 && rng.gen_bool(0.7) {
                pool[rng.gen_range(0..start)]
            } else {
                pool[rng.gen_range(0..pool.len())]
            };
            canvas.stamp_shape(&mut rng, anchor, per_satellite);
        }
    }

    // Overlaps and clipping leave a shortfall; top it up with smaller shapes.
    let mut guard = 0;
    while canvas.required.len() < target && guard < 100_000 {
        let remaining = (target - canvas.required.len()) as f64;
        let anchor = canvas.required[rng.gen_range(0..canvas.required.len())];
        let area = remaining.min((target as f64 / (4 * blobs) as f64).max(1.0));
        canvas.stamp_shape(&mut rng, anchor, area);
        guard += 1;
    }

    let cover = canvas.cover;
    let mut place: Vec<bool> = (0..w * h)
        .map(|_| !rng.gen_bool(params.prohibited_fraction))
        .collect();
    if !cover.iter().zip(&place).any(|(&c, &p)| c && p) {
        let cell = canvas.required[rng.gen_range(0..canvas.required.len())];
        place[cell.y * w + cell.x] = true;
    }
    RegionGrid::new(w, h, cover, place)
}
