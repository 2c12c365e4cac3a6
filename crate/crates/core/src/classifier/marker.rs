use serde::{Deserialize, Serialize};

use super::{ScreenGrid, BLOCKS, COLS, ROWS};
use crate::geom::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t_ms: f64,
    pub x_px: f64,
    pub y_px: f64,
    pub block: usize,
}

/// Marker schedule for smooth-pursuit calibration: the marker rests on each
/// block centre for `dwell_ms`, then glides linearly to the next centre over
/// `transition_ms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerPath {
    pub grid: ScreenGrid,
    /// Two waypoints per block: start and end of its dwell.
    pub waypoints: Vec<Waypoint>,
    pub dwell_ms: f64,
    pub transition_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkerPhase {
    Dwell { block: usize, since_ms: f64 },
    Transition { from: usize, to: usize },
    Done,
}

/// Serpentine visiting order: left to right on even rows, right to left on odd rows.
fn serpentine() -> Vec<usize> {
    (0..ROWS)
        .flat_map(|r| {
            let row: Vec<usize> = (0..COLS).map(|c| r * COLS + c).collect();
            if r % 2 == 0 { row } else { row.into_iter().rev().collect() }
        })
        .collect()
}

pub fn make_marker_path(grid: ScreenGrid, dwell_ms: f64, transition_ms: f64) -> MarkerPath {
    assert!(dwell_ms > 0.0, "dwell must be positive");
    let transition_ms = transition_ms.max(0.0);
    let mut waypoints = Vec::with_capacity(2 * BLOCKS);
    for (k, block) in serpentine().into_iter().enumerate() {
        let c = grid.center(block);
        let t0 = k as f64 * (dwell_ms + transition_ms);
        waypoints.push(Waypoint { t_ms: t0, x_px: c.x, y_px: c.y, block });
        waypoints.push(Waypoint { t_ms: t0 + dwell_ms, x_px: c.x, y_px: c.y, block });
    }
    MarkerPath { grid, waypoints, dwell_ms, transition_ms }
}

impl MarkerPath {
    pub fn duration_ms(&self) -> f64 {
        self.waypoints.last().map_or(0.0, |w| w.t_ms)
    }

    pub fn order(&self) -> Vec<usize> {
        self.waypoints.iter().step_by(2).map(|w| w.block).collect()
    }

    pub fn phase_at(&self, t_ms: f64) -> MarkerPhase {
        if t_ms < 0.0 {
            return MarkerPhase::Transition { from: self.waypoints[0].block, to: self.waypoints[0].block };
        }
        for pair in self.waypoints.chunks(2) {
            let (start, end) = (pair[0], pair[1]);
            if t_ms >= start.t_ms && t_ms < end.t_ms {
                return MarkerPhase::Dwell { block: start.block, since_ms: start.t_ms };
            }
        }
        for w in self.waypoints.windows(2).skip(1).step_by(2) {
            if t_ms >= w[0].t_ms && t_ms < w[1].t_ms {
                return MarkerPhase::Transition { from: w[0].block, to: w[1].block };
            }
        }
        MarkerPhase::Done
    }

    /// Marker position at time `t_ms`, held at the ends.
    pub fn position_at(&self, t_ms: f64) -> Point2 {
        let first = self.waypoints[0];
        if t_ms <= first.t_ms {
            return Point2::new(first.x_px, first.y_px);
        }
        for w in self.waypoints.windows(2) {
            if t_ms < w[1].t_ms {
                let span = w[1].t_ms - w[0].t_ms;
                let s = if span > 0.0 { (t_ms - w[0].t_ms) / span } else { 1.0 };
                return Point2::new(w[0].x_px, w[0].y_px).lerp(Point2::new(w[1].x_px, w[1].y_px), s);
            }
        }
        let last = self.waypoints[self.waypoints.len() - 1];
        Point2::new(last.x_px, last.y_px)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> MarkerPath {
        make_marker_path(ScreenGrid::new(1920.0, 1080.0), 2000.0, 500.0)
    }

    #[test]
    fn duration_and_segments() {
        let p = path();
        assert_eq!(p.duration_ms(), 22000.0);
        assert_eq!(p.waypoints.len(), 18);
    }

    #[test]
    fn visits_every_block_once() {
        let mut order = path().order();
        assert_eq!(order, vec![0, 1, 2, 5, 4, 3, 6, 7, 8]);
        order.sort();
        assert_eq!(order, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn dwell_positions_inside_block() {
        let p = path();
        for w in &p.waypoints {
            assert!(p.grid.block(w.block).contains(Point2::new(w.x_px, w.y_px)));
        }
        // block 4 is visited fifth: dwell over [10000, 12000)
        assert_eq!(p.phase_at(11000.0), MarkerPhase::Dwell { block: 4, since_ms: 10000.0 });
        assert_eq!(p.position_at(11000.0), Point2::new(960.0, 540.0));
        assert_eq!(p.position_at(0.0), p.grid.center(0));
    }

    #[test]
    fn transitions_are_linear() {
        let p = path();
        assert_eq!(p.phase_at(2250.0), MarkerPhase::Transition { from: 0, to: 1 });
        let mid = p.position_at(2250.0);
        assert_eq!(mid, p.grid.center(0).midpoint(p.grid.center(1)));
        assert_eq!(p.phase_at(22000.0), MarkerPhase::Done);
    }
}
