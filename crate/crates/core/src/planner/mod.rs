//! Motion planning: delay-split joint moves, jog arithmetic and planning
//! display or workspace targets into servo segments.

mod jog;
mod point;
mod solve;
mod split;

pub use jog::{adjust_amplitude, jog_target, AmplitudeConfig, AmplitudeSign, Direction, JogCommand};
pub use point::{plan_gripper, plan_point_to_point, plan_to_arm_point, plan_to_pose, PlannerConfig, PointPlan, Workspace};
pub use solve::{solve_arm_pose, StepConfig};
pub use split::{plan_joint_motion, segment_count, JointId, MotionSegment, DEFAULT_DELAY_MS, MAX_SEGMENT_DEG};

use thiserror::Error;

use crate::arm::ArmError;

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("out of reach")]
    OutOfReach,
    #[error("amplitude {0} cm outside [{1}, {2}] cm")]
    InvalidAmplitude(f64, f64, f64),
    #[error("non-finite target")]
    NonFinite,
    #[error(transparent)]
    Arm(#[from] ArmError),
}
