use serde::{Deserialize, Serialize};

use super::RuntimeError;
use crate::arm::{forward_tip, ArmGeometry, Gripper, JointState, Limit, TipPose};
use crate::geom::Point2;
use crate::planner::JointId;

pub const DEFAULT_MAX_RATE_DEG_S: f64 = 120.0;
pub const SIM_TICK_MS: f64 = 10.0;

/// A pen held by the gripper: it marks the sheet while the tip is within
/// `tolerance_cm` above `plane_cm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pen {
    pub plane_cm: f64,
    pub tolerance_cm: f64,
    pub trace: Vec<Point2>,
}

impl Pen {
    pub fn on_plane(plane_cm: f64) -> Self {
        Self { plane_cm, tolerance_cm: 0.05, trace: Vec::new() }
    }

    /// Total drawn length, ignoring lifts.
    pub fn trace_length(&self) -> f64 {
        self.trace.windows(2).map(|w| w[0].distance(w[1])).sum()
    }
}

/// Slew-limited servo arm on a virtual clock. Joints are indexed by
/// [`JointId::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimArm {
    pub geometry: ArmGeometry,
    pub commanded: [f64; 4],
    pub actual: [f64; 4],
    pub max_rate_deg_s: f64,
    pub pen: Option<Pen>,
    pub t_ms: f64,
}

fn gripper_angle(g: &ArmGeometry, s: Gripper) -> f64 {
    match s {
        Gripper::Open => g.gripper.open_deg,
        Gripper::Closed => g.gripper.closed_deg,
    }
}

impl SimArm {
    pub fn new(geometry: ArmGeometry, pose: &JointState) -> Self {
        let angles = [pose.base_deg, pose.beta_deg, pose.alpha_deg, gripper_angle(&geometry, pose.gripper)];
        Self { geometry, commanded: angles, actual: angles, max_rate_deg_s: DEFAULT_MAX_RATE_DEG_S, pen: None, t_ms: 0.0 }
    }

    pub fn with_pen(mut self, pen: Pen) -> Self {
        self.pen = Some(pen);
        self
    }

    pub fn limit(&self, joint: JointId) -> Limit {
        let l = &self.geometry.limits;
        match joint {
            JointId::Base => l.base,
            JointId::Shoulder => l.beta,
            JointId::Elbow => l.alpha,
            JointId::Gripper => Limit::SERVO,
        }
    }

    pub fn command(&mut self, joint: JointId, angle_deg: f64) -> Result<(), RuntimeError> {
        let lim = self.limit(joint);
        if !angle_deg.is_finite() || !lim.contains(angle_deg) {
            return Err(RuntimeError::OutOfRange { joint: joint.index(), angle_deg });
        }
        self.commanded[joint.index() as usize] = angle_deg;
        Ok(())
    }

    pub fn angle(&self, joint: JointId) -> f64 {
        self.actual[joint.index() as usize]
    }

    pub fn at_rest(&self, joint: JointId) -> bool {
        let i = joint.index() as usize;
        self.actual[i] == self.commanded[i]
    }

    pub fn joint_state(&self) -> JointState {
        let g = &self.geometry.gripper;
        let grip = self.actual[3];
        let gripper = if (grip - g.closed_deg).abs() < (grip - g.open_deg).abs() { Gripper::Closed } else { Gripper::Open };
        JointState { base_deg: self.actual[0], alpha_deg: self.actual[2], beta_deg: self.actual[1], gripper }
    }

    pub fn tip(&self) -> TipPose {
        forward_tip(&self.geometry, &self.joint_state())
    }

    /// Advance the virtual clock by `dt_ms`.
    pub fn tick(&self, dt_ms: f64) -> SimArm {
        let mut next = self.clone();
        next.step(dt_ms);
        next
    }

    pub fn step(&mut self, dt_ms: f64) {
        if !(dt_ms > 0.0) {
            return;
        }
        let max = self.max_rate_deg_s * dt_ms / 1000.0;
        for (a, c) in self.actual.iter_mut().zip(self.commanded) {
            let gap = c - *a;
            *a = if gap.abs() <= max { c } else { *a + max * gap.signum() };
        }
        self.t_ms += dt_ms;
        let tip = self.tip();
        if let Some(pen) = &mut self.pen {
            if tip.d <= pen.plane_cm + pen.tolerance_cm {
                let p = Point2::new(tip.x, tip.y);
                if pen.trace.last() != Some(&p) {
                    pen.trace.push(p);
                }
            }
        }
    }
}
