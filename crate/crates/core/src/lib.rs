//! Gaze-driven teleoperation for a low-cost 4-DoF desk arm.
//!
//! The crate is organised along the data flow of a session:
//!
//! - [`gaze`]: median filter, Bezier cursor smoothing, dwell selection and the
//!   eye-aspect-ratio feature.
//! - [`classifier`]: nine-block screen grid, smooth-pursuit calibration and the
//!   feed-forward block classifier.
//! - [`arm`]: planar vertical-motion kinematics and the servo handover law.
//! - [`mapping`]: least-squares display-to-workspace affine calibration.
//! - [`planner`]: delay-split joint motions, jog arithmetic and point-to-point
//!   planning.
//! - [`hri`]: the UI state machine, session log, metrics and experiment
//!   harnesses.
//! - [`runtime`]: simulated servo arm, serial line protocol, plan execution and
//!   the gateway used by browser front-ends.

pub mod arm;
pub mod classifier;
pub mod gaze;
pub mod geom;
pub mod hri;
pub mod mapping;
pub mod planner;
pub mod runtime;

pub use arm::{ArmGeometry, Gripper, JointState, TipPose};
pub use classifier::{BlockModel, CalibrationSet, MarkerPath, ScreenGrid};
pub use gaze::{CursorState, DwellState, GazeSample, SelectionEvent};
pub use geom::{Point2, Rect};
pub use hri::{SessionLog, UiState};
pub use mapping::AffineMap;
pub use planner::{JogCommand, JointId, MotionSegment};
pub use runtime::SimArm;
