use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{EventKind, HriError, SessionLog};
use crate::classifier::{ScreenGrid, BLOCKS};
use crate::gaze::synthetic::SyntheticGaze;
use crate::gaze::{GazePipeline, GazeSample, PipelineConfig, Region};
use crate::geom::Point2;

pub const POINTING_TIMEOUT_MS: f64 = 10_000.0;

/// Highlight-and-select task over the nine screen blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct PointingTask {
    pub grid: ScreenGrid,
    pub current_target: usize,
    pub highlight_t_ms: f64,
    pub timeout_ms: f64,
    pub seed: u64,
    rng: ChaCha8Rng,
}

impl PointingTask {
    pub fn new(grid: ScreenGrid, seed: u64, start_ms: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let current_target = rng.gen_range(0..BLOCKS);
        Self { grid, current_target, highlight_t_ms: start_ms, timeout_ms: POINTING_TIMEOUT_MS, seed, rng }
    }

    pub fn deadline_ms(&self) -> f64 {
        self.highlight_t_ms + self.timeout_ms
    }

    /// Uniform over the other eight blocks.
    fn rehighlight(&mut self, t_ms: f64) {
        let k = self.rng.gen_range(0..BLOCKS - 1);
        self.current_target = if k >= self.current_target { k + 1 } else { k };
        self.highlight_t_ms = t_ms;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PointingInput {
    Select { block: usize, t_ms: f64 },
    Clock { t_ms: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointingRecord {
    Hit { t_ms: f64, block: usize, response_ms: f64 },
    Miss { t_ms: f64, block: usize, target: usize },
    /// Recorded at the deadline itself, not at the observing clock tick.
    Timeout { t_ms: f64, target: usize },
}

impl PointingRecord {
    pub fn response_ms(&self) -> Option<f64> {
        match self {
            PointingRecord::Hit { response_ms, .. } => Some(*response_ms),
            _ => None,
        }
    }
}

/// Advance the task by one input.
///
/// A selection arriving at or after the deadline counts as a timeout and is
/// otherwise ignored.
pub fn pointing_step(task: &PointingTask, input: PointingInput) -> (PointingTask, Option<PointingRecord>) {
    let mut next = task.clone();
    let t = match input {
        PointingInput::Select { t_ms, .. } | PointingInput::Clock { t_ms } => t_ms,
    };
    if t >= task.deadline_ms() {
        let deadline = task.deadline_ms();
        next.rehighlight(deadline);
        return (next, Some(PointingRecord::Timeout { t_ms: deadline, target: task.current_target }));
    }
    match input {
        PointingInput::Clock { .. } => (next, None),
        PointingInput::Select { block, t_ms } if block == task.current_target => {
            next.rehighlight(t_ms);
            (next, Some(PointingRecord::Hit { t_ms, block, response_ms: t_ms - task.highlight_t_ms }))
        }
        PointingInput::Select { block, t_ms } => (next, Some(PointingRecord::Miss { t_ms, block, target: task.current_target })),
    }
}

/// Something that selects blocks as the virtual clock advances.
pub trait Selector {
    fn poll(&mut self, t_ms: f64, task: &PointingTask) -> Option<usize>;
}

/// Selects the highlighted block on the first clock sample at least
/// `latency_ms` after it was highlighted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencySelector {
    pub latency_ms: f64,
}

impl Selector for LatencySelector {
    fn poll(&mut self, t_ms: f64, task: &PointingTask) -> Option<usize> {
        // sub-microsecond slack absorbs clock rounding on the sample grid
        (t_ms - task.highlight_t_ms >= self.latency_ms - 1e-6).then_some(task.current_target)
    }
}

fn block_regions(grid: &ScreenGrid) -> Vec<Region> {
    grid.regions()
}

fn selected_block(pipeline: &mut GazePipeline, sample: &GazeSample, regions: &[Region]) -> Option<usize> {
    let out = pipeline.push(sample, regions)?;
    ScreenGrid::parse_region_id(&out.event?.region)
}

/// A simulated user: keeps looking where they last looked, then
/// `reaction_ms` after a new highlight moves their gaze onto it. Selections
/// come out of the full gaze pipeline.
#[derive(Debug, Clone)]
pub struct GazeSelector {
    pub reaction_ms: f64,
    gaze: SyntheticGaze,
    pipeline: GazePipeline,
    regions: Vec<Region>,
    looking_at: Option<Point2>,
}

impl GazeSelector {
    pub fn new(grid: ScreenGrid, gaze: SyntheticGaze, reaction_ms: f64) -> Self {
        let pipeline = GazePipeline::new(PipelineConfig::for_display(grid.display_w, grid.display_h));
        let regions = block_regions(&grid);
        Self { reaction_ms, gaze, pipeline, regions, looking_at: None }
    }
}

impl Selector for GazeSelector {
    fn poll(&mut self, t_ms: f64, task: &PointingTask) -> Option<usize> {
        if t_ms - task.highlight_t_ms >= self.reaction_ms {
            self.looking_at = Some(task.grid.center(task.current_target));
        }
        // no samples until the user first looks at the screen
        let s = self.gaze.sample(t_ms, self.looking_at?);
        selected_block(&mut self.pipeline, &s, &self.regions)
    }
}

/// Feeds a recorded gaze stream through the pipeline, ignoring the task.
#[derive(Debug, Clone)]
pub struct ReplaySelector {
    samples: std::vec::IntoIter<GazeSample>,
    pending: Option<GazeSample>,
    pipeline: GazePipeline,
    regions: Vec<Region>,
}

impl ReplaySelector {
    pub fn new(grid: ScreenGrid, samples: Vec<GazeSample>) -> Self {
        let pipeline = GazePipeline::new(PipelineConfig::for_display(grid.display_w, grid.display_h));
        Self { samples: samples.into_iter(), pending: None, pipeline, regions: block_regions(&grid) }
    }

    pub fn end_ms(&self) -> Option<f64> {
        self.samples.as_slice().last().or(self.pending.as_ref()).map(|s| s.t_ms)
    }
}

impl Selector for ReplaySelector {
    fn poll(&mut self, t_ms: f64, _task: &PointingTask) -> Option<usize> {
        let mut hit = None;
        loop {
            let s = match self.pending.take().or_else(|| self.samples.next()) {
                Some(s) => s,
                None => return hit,
            };
            if s.t_ms > t_ms {
                self.pending = Some(s);
                return hit;
            }
            if let Some(b) = selected_block(&mut self.pipeline, &s, &self.regions) {
                hit = Some(b);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingRunConfig {
    /// Stop after this many hits plus timeouts.
    pub trials: usize,
    pub period_ms: f64,
    /// Hard stop on the virtual clock.
    pub max_ms: f64,
}

impl Default for PointingRunConfig {
    fn default() -> Self {
        Self { trials: 20, period_ms: 1000.0 / 60.0, max_ms: f64::INFINITY }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointingRun {
    pub records: Vec<PointingRecord>,
    pub log: SessionLog,
    pub task: PointingTask,
}

/// Drive `task` with `selector` on a fixed-period virtual clock.
pub fn run_pointing(mut task: PointingTask, selector: &mut dyn Selector, cfg: &PointingRunConfig) -> Result<PointingRun, HriError> {
    if !(cfg.period_ms > 0.0) {
        return Err(HriError::Config("sample period must be positive".into()));
    }
    let mut log = SessionLog::new();
    let mut records = Vec::new();
    log.push(task.highlight_t_ms, EventKind::Highlight, json!({"block": task.current_target}))?;
    let start = task.highlight_t_ms;
    let mut done = 0;
    let mut i = 0u64;
    while done < cfg.trials {
        i += 1;
        let t = start + i as f64 * cfg.period_ms;
        if t > cfg.max_ms {
            break;
        }
        let input = match selector.poll(t, &task) {
            Some(block) => PointingInput::Select { block, t_ms: t },
            None => PointingInput::Clock { t_ms: t },
        };
        let (next, rec) = pointing_step(&task, input);
        task = next;
        let Some(rec) = rec else { continue };
        match rec {
            PointingRecord::Hit { t_ms, block, response_ms } => {
                log.push(t_ms, EventKind::Select, json!({"block": block, "target": block, "response_ms": response_ms}))?;
            }
            PointingRecord::Miss { t_ms, block, target } => {
                log.push(t_ms, EventKind::Select, json!({"block": block, "target": target}))?;
            }
            PointingRecord::Timeout { t_ms, target } => {
                log.push(t_ms, EventKind::Timeout, json!({"target": target}))?;
            }
        }
        if !matches!(rec, PointingRecord::Miss { .. }) {
            done += 1;
            log.push(task.highlight_t_ms, EventKind::Highlight, json!({"block": task.current_target}))?;
        }
        records.push(rec);
    }
    Ok(PointingRun { records, log, task })
}
