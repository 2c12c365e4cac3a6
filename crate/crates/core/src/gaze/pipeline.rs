use std::collections::VecDeque;

use super::{median_filter, smooth_cursor, update_dwell, CursorState, DwellState, GazeSample, Region, SelectionEvent};
use crate::geom::{Point2, Rect};

/// Median window length in samples (about 83 ms at 60 Hz).
pub const MEDIAN_WINDOW: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub display: Rect,
    pub median_window: usize,
    pub dwell_ms: f64,
    pub bezier_param: f64,
}

impl PipelineConfig {
    pub fn for_display(w: f64, h: f64) -> Self {
        Self {
            display: Rect::new(0.0, 0.0, w, h),
            median_window: MEDIAN_WINDOW,
            dwell_ms: super::DEFAULT_DWELL_MS,
            bezier_param: super::DEFAULT_BEZIER_PARAM,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub t_ms: f64,
    pub cursor: Point2,
    pub event: Option<SelectionEvent>,
}

/// Median filter, Bezier cursor and dwell timer chained over one sample stream.
///
/// Invalid samples, samples without a screen point and out-of-order samples
/// are dropped.
#[derive(Debug, Clone)]
pub struct GazePipeline {
    cfg: PipelineConfig,
    window: VecDeque<Point2>,
    cursor: CursorState,
    dwell: DwellState,
    last_t: Option<f64>,
    dropped: usize,
}

impl GazePipeline {
    pub fn new(cfg: PipelineConfig) -> Self {
        let mut cursor = CursorState::new(cfg.display);
        cursor.bezier_param = cfg.bezier_param;
        let dwell = DwellState::new(cfg.dwell_ms);
        Self { window: VecDeque::with_capacity(cfg.median_window), cfg, cursor, dwell, last_t: None, dropped: 0 }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn cursor(&self) -> &CursorState {
        &self.cursor
    }

    pub fn dwell(&self) -> &DwellState {
        &self.dwell
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// Forget the current dwell, e.g. after the active screen changed.
    pub fn reset_dwell(&mut self) {
        self.dwell = DwellState::new(self.cfg.dwell_ms);
    }

    pub fn push(&mut self, sample: &GazeSample, regions: &[Region]) -> Option<PipelineOutput> {
        match (sample.valid, sample.screen_pt) {
            (true, Some(p)) => self.push_point(sample.t_ms, p, regions),
            _ => {
                self.dropped += 1;
                None
            }
        }
    }

    pub fn push_point(&mut self, t_ms: f64, p: Point2, regions: &[Region]) -> Option<PipelineOutput> {
        if !p.is_finite() || !t_ms.is_finite() || self.last_t.is_some_and(|last| t_ms <= last) {
            self.dropped += 1;
            return None;
        }
        self.last_t = Some(t_ms);
        self.window.push_back(p);
        while self.window.len() > self.cfg.median_window.max(1) {
            self.window.pop_front();
        }
        let filtered = median_filter(self.window.make_contiguous()).ok()?;
        self.cursor = smooth_cursor(&self.cursor, filtered, t_ms);
        let (dwell, event) = update_dwell(&self.dwell, self.cursor.pos, regions, t_ms);
        self.dwell = dwell;
        Some(PipelineOutput { t_ms, cursor: self.cursor.pos, event })
    }
}
