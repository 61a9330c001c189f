//! Binary PPM (P6) rendering of a coverage state, one pixel per cell.

use crate::coverage::{CoverDepthMap, Placement};
use crate::region::RegionGrid;

pub const UNCOVERED_REQUIRED: [u8; 3] = [64, 64, 64];
pub const UNCOVERED_OPTIONAL: [u8; 3] = [0, 0, 0];
pub const DEPTH_ONE: [u8; 3] = [0, 0, 255];
pub const DEPTH_TWO: [u8; 3] = [255, 0, 0];
pub const DEPTH_MORE: [u8; 3] = [255, 255, 255];
pub const ROUTER: [u8; 3] = [0, 255, 0];

/// Colours: uncovered required cells dark gray, uncovered optional cells
/// black, depth 1 blue, depth 2 red, depth 3+ white, router centres green.
pub fn render_coverage(grid: &RegionGrid, map: &CoverDepthMap, placement: &Placement) -> Vec<u8> {
    let (w, h) = (grid.width(), grid.height());
    let header = format!("P6\n{w} {h}\n255\n");
    let mut pixels = Vec::with_capacity(3 * w * h);
    for cell in grid.cells() {
        let rgb = match map.depth(cell) {
            0 if grid.cover(cell) => UNCOVERED_REQUIRED,
            0 => UNCOVERED_OPTIONAL,
            1 => DEPTH_ONE,
            2 => DEPTH_TWO,
            _ => DEPTH_MORE,
        };
        pixels.extend_from_slice(&rgb);
    }
    for c in &placement.centers {
        let i = 3 * grid.index(*c);
        pixels[i..i + 3].copy_from_slice(&ROUTER);
    }
    let mut out = header.into_bytes();
    out.extend_from_slice(&pixels);
    out
}
