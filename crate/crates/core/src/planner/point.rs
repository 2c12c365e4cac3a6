use serde::{Deserialize, Serialize};

use super::{plan_joint_motion, solve_arm_pose, JointId, MotionSegment, PlanError, StepConfig, DEFAULT_DELAY_MS};
use crate::arm::{forward_tip, ArmGeometry, Gripper, JointState};
use crate::geom::{Point2, Rect};
use crate::mapping::{map_point, AffineMap};

/// The work sheet in the arm frame and the tip height (`d`) at which the
/// pen touches it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub sheet: Rect,
    pub work_height_cm: f64,
}

impl Default for Workspace {
    /// A half-A4 sheet (21 × 14.9 cm) centred 11.5 cm in front of the base.
    fn default() -> Self {
        Self { sheet: Rect::new(-10.5, 11.5 - 7.45, 21.0, 14.9), work_height_cm: 0.0 }
    }
}

impl Workspace {
    pub fn center(&self) -> Point2 {
        self.sheet.center()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    pub delay_ms: f64,
    pub step: StepConfig,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { delay_ms: DEFAULT_DELAY_MS, step: StepConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointPlan {
    /// Joint state after the plan has run.
    pub goal: JointState,
    /// Per-joint segments, base first, then shoulder, then elbow.
    pub segments: Vec<MotionSegment>,
}

const MOVE_EPS_DEG: f64 = 1e-9;

fn push_joint(out: &mut Vec<MotionSegment>, joint: JointId, from: f64, to: f64, delay_ms: f64) {
    if (to - from).abs() > MOVE_EPS_DEG {
        out.extend(plan_joint_motion(joint, from, to, delay_ms));
    }
}

/// Segments taking every joint from `current` to `goal`.
pub fn plan_to_pose(g: &ArmGeometry, current: &JointState, goal: &JointState, delay_ms: f64) -> Vec<MotionSegment> {
    let mut out = Vec::new();
    push_joint(&mut out, JointId::Base, current.base_deg, goal.base_deg, delay_ms);
    push_joint(&mut out, JointId::Shoulder, current.beta_deg, goal.beta_deg, delay_ms);
    push_joint(&mut out, JointId::Elbow, current.alpha_deg, goal.alpha_deg, delay_ms);
    if current.gripper != goal.gripper {
        out.extend(plan_gripper(g, current.gripper, goal.gripper, delay_ms));
    }
    out
}

pub fn plan_gripper(g: &ArmGeometry, from: Gripper, to: Gripper, delay_ms: f64) -> Vec<MotionSegment> {
    let angle = |s: Gripper| match s {
        Gripper::Open => g.gripper.open_deg,
        Gripper::Closed => g.gripper.closed_deg,
    };
    let mut out = Vec::new();
    push_joint(&mut out, JointId::Gripper, angle(from), angle(to), delay_ms);
    out
}

/// Plan a move of the tip to arm-frame point `target` at height `height_cm`.
pub fn plan_to_arm_point(
    g: &ArmGeometry,
    current: &JointState,
    target: Point2,
    height_cm: f64,
    cfg: &PlannerConfig,
) -> Result<PointPlan, PlanError> {
    if !target.is_finite() || !height_cm.is_finite() {
        return Err(PlanError::NonFinite);
    }
    let r = target.x.hypot(target.y);
    if r > g.max_reach() {
        return Err(PlanError::OutOfReach);
    }
    let base = if r < 1e-9 { current.base_deg } else { target.y.atan2(target.x).to_degrees() };
    if !g.limits.base.contains(base) {
        return Err(PlanError::OutOfReach);
    }
    let (alpha, beta) = solve_arm_pose(g, current.alpha_deg, current.beta_deg, r, height_cm, &cfg.step)?;
    let goal = JointState { base_deg: base, alpha_deg: alpha, beta_deg: beta, gripper: current.gripper };
    let segments = plan_to_pose(g, current, &goal, cfg.delay_ms);
    Ok(PointPlan { goal, segments })
}

/// Plan a move to the arm-frame image of display point `target_display`,
/// keeping the current tip height.
///
/// A target that maps onto the current tip yields an empty plan.
pub fn plan_point_to_point(
    g: &ArmGeometry,
    current: &JointState,
    target_display: Point2,
    map: &AffineMap,
    cfg: &PlannerConfig,
) -> Result<PointPlan, PlanError> {
    let target = map_point(map, target_display);
    let tip = forward_tip(g, current);
    plan_to_arm_point(g, current, target, tip.d, cfg)
}
