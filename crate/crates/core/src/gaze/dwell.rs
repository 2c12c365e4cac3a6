use serde::{Deserialize, Serialize};

use crate::geom::{Point2, Rect};

/// Default dwell threshold in milliseconds.
pub const DEFAULT_DWELL_MS: f64 = 500.0;

/// A named selectable rectangle on the display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: String,
    pub rect: Rect,
}

impl Region {
    pub fn new(id: impl Into<String>, rect: Rect) -> Self {
        Self { id: id.into(), rect }
    }
}

/// Emitted once per continuous stay of at least the threshold inside one region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionEvent {
    pub region: String,
    pub t_ms: f64,
    /// Cursor position when the dwell completed.
    pub at: Point2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DwellState {
    pub region_id: Option<String>,
    pub enter_t: f64,
    pub threshold: f64,
    pub fired: bool,
    pub last_t: Option<f64>,
}

impl Default for DwellState {
    fn default() -> Self {
        Self::new(DEFAULT_DWELL_MS)
    }
}

impl DwellState {
    pub fn new(threshold_ms: f64) -> Self {
        Self { region_id: None, enter_t: 0.0, threshold: threshold_ms, fired: false, last_t: None }
    }

    /// Fraction of the threshold accumulated in the current region, in `[0, 1]`.
    pub fn progress(&self) -> f64 {
        match (&self.region_id, self.last_t) {
            (Some(_), Some(t)) if self.threshold > 0.0 => ((t - self.enter_t) / self.threshold).clamp(0.0, 1.0),
            (Some(_), Some(_)) => 1.0,
            _ => 0.0,
        }
    }
}

/// Advance the dwell timer with one cursor sample.
///
/// Leaving a region, or entering a different one, restarts the timer.
pub fn update_dwell(
    state: &DwellState,
    cursor: Point2,
    regions: &[Region],
    t_ms: f64,
) -> (DwellState, Option<SelectionEvent>) {
    let hit = regions.iter().find(|r| r.rect.contains(cursor)).map(|r| r.id.as_str());
    let mut next = state.clone();
    next.last_t = Some(t_ms);
    if hit != state.region_id.as_deref() {
        next.region_id = hit.map(str::to_owned);
        next.enter_t = t_ms;
        next.fired = false;
    }
    let event = match &next.region_id {
        Some(id) if !next.fired && t_ms - next.enter_t >= next.threshold => {
            next.fired = true;
            Some(SelectionEvent { region: id.clone(), t_ms, at: cursor })
        }
        _ => None,
    };
    (next, event)
}
