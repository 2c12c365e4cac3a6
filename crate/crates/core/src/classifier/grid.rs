use serde::{Deserialize, Serialize};

use crate::gaze::Region;
use crate::geom::{Point2, Rect};

pub const ROWS: usize = 3;
pub const COLS: usize = 3;
pub const BLOCKS: usize = ROWS * COLS;

/// The display split into a 3×3 grid of equal blocks, indexed row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenGrid {
    pub display_w: f64,
    pub display_h: f64,
}

impl ScreenGrid {
    pub fn new(display_w: f64, display_h: f64) -> Self {
        Self { display_w, display_h }
    }

    pub fn block(&self, i: usize) -> Rect {
        assert!(i < BLOCKS, "block index {i} out of range");
        let (w, h) = (self.display_w / COLS as f64, self.display_h / ROWS as f64);
        let (row, col) = (i / COLS, i % COLS);
        Rect::new(col as f64 * w, row as f64 * h, w, h)
    }

    pub fn center(&self, i: usize) -> Point2 {
        self.block(i).center()
    }

    pub fn block_at(&self, p: Point2) -> Option<usize> {
        (0..BLOCKS).find(|&i| self.block(i).contains(p))
    }

    pub fn regions(&self) -> Vec<Region> {
        (0..BLOCKS).map(|i| Region::new(Self::region_id(i), self.block(i))).collect()
    }

    pub fn region_id(i: usize) -> String {
        format!("block-{i}")
    }

    pub fn parse_region_id(id: &str) -> Option<usize> {
        id.strip_prefix("block-")?.parse().ok().filter(|&i| i < BLOCKS)
    }
}
