//! HRI layer: the screen state machine for pick-and-drop, point-to-point and
//! four-way jog, the session log with its metrics, and the experiment
//! harnesses.

mod harness;
mod log;
mod metrics;
mod pointing;
mod reach;
mod session;
mod state;

pub use harness::{run_reachability, JogUser, ReachabilityConfig, ReachabilityRun};
pub use log::{EventKind, LogEvent, SessionLog};
pub use metrics::{session_metrics, SessionSummary};
pub use pointing::{
    pointing_step, run_pointing, GazeSelector, LatencySelector, PointingInput, PointingRecord, PointingRun, PointingRunConfig,
    PointingTask, ReplaySelector, Selector, POINTING_TIMEOUT_MS,
};
pub use reach::{reachability_check, ReachabilityTask, DEFAULT_DONE_RADIUS_CM, MIN_TARGET_OFFSET_CM};
pub use session::Session;
pub use state::{layout, transition, Action, LayoutConfig, Phase, RegionAction, Screen, SystemEvent, UiEvent, UiRegion, UiState};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HriError {
    #[error("event at {t_ms} ms precedes last logged event at {last_ms} ms")]
    OutOfOrder { t_ms: f64, last_ms: f64 },
    #[error("non-finite timestamp")]
    NonFinite,
    #[error("session log line {line}: {msg}")]
    Log { line: usize, msg: String },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Runtime(#[from] crate::runtime::RuntimeError),
}
