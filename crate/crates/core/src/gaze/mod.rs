//! Gaze signal conditioning: samples in, smoothed cursor and dwell selections out.

mod dwell;
mod ear;
mod filter;
mod pipeline;
pub mod replay;
mod sample;
pub mod synthetic;

pub use dwell::{update_dwell, DwellState, Region, SelectionEvent, DEFAULT_DWELL_MS};
pub use ear::{eye_aspect_ratio, modified_ear, EyeLandmarks};
pub use filter::{median_filter, smooth_cursor, CursorState, BEZIER_HISTORY, DEFAULT_BEZIER_PARAM};
pub use pipeline::{GazePipeline, PipelineConfig, PipelineOutput, MEDIAN_WINDOW};
pub use sample::{validate_stream, GazeSample, GazeVector};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GazeError {
    #[error("no samples")]
    NoSamples,
    #[error("non-finite sample")]
    NonFinite,
    #[error("degenerate landmarks")]
    DegenerateLandmarks,
    #[error("gaze vector half {half} has norm {norm:.5}, expected 1")]
    NotUnit { half: usize, norm: f64 },
    #[error("timestamps not strictly increasing at {t_ms} ms")]
    NonMonotonic { t_ms: f64 },
    #[error("valid sample at {t_ms} ms carries neither a screen point nor a gaze vector")]
    EmptySample { t_ms: f64 },
    #[error("replay line {line}: {msg}")]
    Replay { line: usize, msg: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for GazeError {
    fn from(e: std::io::Error) -> Self {
        GazeError::Io(e.to_string())
    }
}
