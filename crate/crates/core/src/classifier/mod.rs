//! Nine-block gaze classifier: screen grid, smooth-pursuit calibration and a
//! small feed-forward network trained with Adam on cross-entropy.

mod dataset;
mod grid;
mod marker;
mod mlp;
pub mod synthetic;
mod train;

pub use dataset::{collect_calibration, CalibrationSet, Example, Partition, DEFAULT_SETTLE_MS};
pub use grid::{ScreenGrid, BLOCKS, COLS, ROWS};
pub use marker::{make_marker_path, MarkerPath, MarkerPhase, Waypoint};
pub use mlp::{predict, BlockModel, Dense, Gradient, ModelMetrics, HIDDEN_SIZES, INPUT_DIM, MODEL_VERSION};
pub use train::{accuracy, loss_and_gradient, mean_loss, train, EpochStats, TrainConfig, TrainOutcome};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("insufficient calibration data")]
    InsufficientData,
    #[error("empty calibration set")]
    EmptySet,
    #[error("malformed calibration set: {0}")]
    Malformed(String),
    #[error("non-finite input")]
    NonFinite,
    #[error("model file: {0}")]
    ModelFormat(String),
    #[error("calibration csv: {0}")]
    Csv(String),
}
