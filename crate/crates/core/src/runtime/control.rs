use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{ExecutionReport, Executor, RuntimeError, ServoLink, SimArm, SIM_TICK_MS};
use crate::arm::{forward_tip, ArmGeometry, Gripper, JointState};
use crate::geom::{Point2, Rect};
use crate::hri::{Action, SystemEvent};
use crate::mapping::{map_point, AffineMap};
use crate::planner::{jog_target, plan_gripper, plan_to_arm_point, MotionSegment, PlannerConfig, Workspace};

/// Tip heights for scripted pick and drop sequences, relative to the sheet plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PickConfig {
    pub hover_cm: f64,
    pub grasp_cm: f64,
}

impl Default for PickConfig {
    fn default() -> Self {
        Self { hover_cm: 4.0, grasp_cm: 0.5 }
    }
}

/// Affine map taking the full display onto `sheet`, screen top to the far edge.
pub fn display_to_sheet(display: &Rect, sheet: &Rect) -> AffineMap {
    let sx = sheet.w / display.w;
    let sy = -sheet.h / display.h;
    AffineMap::from_parts([[sx, 0.0], [0.0, sy]], [sheet.x - sx * display.x, sheet.y + sheet.h - sy * display.y])
}

/// Turns UI actions into queued plans and reports when pick sequences finish.
pub struct ArmRuntime {
    pub sim: SimArm,
    pub executor: Executor,
    pub workspace: Workspace,
    pub map: AffineMap,
    pub planner: PlannerConfig,
    pub pick: PickConfig,
    link: Option<Box<dyn ServoLink + Send>>,
    /// Pose the arm will hold once every queued plan has run.
    planned: JointState,
    picks: HashSet<u64>,
}

impl std::fmt::Debug for ArmRuntime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ArmRuntime").field("sim", &self.sim).field("planned", &self.planned).field("serial", &self.link.is_some()).finish()
    }
}

impl ArmRuntime {
    pub fn new(sim: SimArm, workspace: Workspace, map: AffineMap) -> Self {
        let planned = sim.joint_state();
        Self {
            sim,
            executor: Executor::new(),
            workspace,
            map,
            planner: PlannerConfig::default(),
            pick: PickConfig::default(),
            link: None,
            planned,
            picks: HashSet::new(),
        }
    }

    pub fn with_link(mut self, link: Box<dyn ServoLink + Send>) -> Self {
        self.link = Some(link);
        self
    }

    pub fn geometry(&self) -> &ArmGeometry {
        &self.sim.geometry
    }

    pub fn planned(&self) -> &JointState {
        &self.planned
    }

    pub fn is_idle(&self) -> bool {
        self.executor.is_idle()
    }

    fn plan_point(&self, from: &JointState, p: Point2, height: f64) -> Result<(JointState, Vec<MotionSegment>), RuntimeError> {
        let plan = plan_to_arm_point(self.geometry(), from, p, height, &self.planner)?;
        Ok((plan.goal, plan.segments))
    }

    fn sequence(&self, at: Point2, grip: Gripper) -> Result<(JointState, Vec<Vec<MotionSegment>>), RuntimeError> {
        let h0 = self.workspace.work_height_cm;
        let (above, s1) = self.plan_point(&self.planned, at, h0 + self.pick.hover_cm)?;
        let (down, s2) = self.plan_point(&above, at, h0 + self.pick.grasp_cm)?;
        let s3 = plan_gripper(self.geometry(), down.gripper, grip, self.planner.delay_ms);
        let gripped = JointState { gripper: grip, ..down };
        let (up, s4) = self.plan_point(&gripped, at, h0 + self.pick.hover_cm)?;
        Ok((up, vec![s1, s2, s3, s4]))
    }

    /// Plans for `action`, in execution order. Nothing is queued.
    pub fn plan_action(&self, action: &Action) -> Result<(JointState, Vec<Vec<MotionSegment>>), RuntimeError> {
        match action {
            Action::ShowScreen { .. } | Action::SetAmplitude { .. } => Ok((self.planned, Vec::new())),
            Action::Jog { command } => {
                let tip = forward_tip(self.geometry(), &self.planned);
                let target = jog_target(Point2::new(tip.x, tip.y), command, &self.workspace.sheet);
                let (goal, segs) = self.plan_point(&self.planned, target, self.workspace.work_height_cm)?;
                Ok((goal, vec![segs]))
            }
            Action::MoveTo { at } => {
                let tip = forward_tip(self.geometry(), &self.planned);
                let (goal, segs) = self.plan_point(&self.planned, map_point(&self.map, *at), tip.d)?;
                Ok((goal, vec![segs]))
            }
            Action::PickSequence { at, .. } => self.sequence(map_point(&self.map, *at), Gripper::Closed),
            Action::DropSequence { at } => self.sequence(map_point(&self.map, *at), Gripper::Open),
        }
    }

    /// Plan and queue `action`. A plan that cannot be made leaves the queue untouched.
    pub fn apply(&mut self, action: &Action) -> Result<(), RuntimeError> {
        let (goal, plans) = self.plan_action(action)?;
        let mut last = None;
        for p in &plans {
            last = Some(self.executor.enqueue(p));
        }
        self.planned = goal;
        if let (Action::PickSequence { .. }, Some(id)) = (action, last) {
            self.picks.insert(id);
        }
        Ok(())
    }

    /// Advance by `dt_ms` in 10 ms ticks, reporting finished pick sequences.
    pub fn advance(&mut self, dt_ms: f64) -> Result<Vec<SystemEvent>, RuntimeError> {
        let mut events = Vec::new();
        let t_end = self.sim.t_ms + dt_ms;
        while self.sim.t_ms < t_end - 1e-9 {
            let dt = SIM_TICK_MS.min(t_end - self.sim.t_ms);
            let link = self.link.as_deref_mut().map(|l| l as &mut dyn ServoLink);
            let finished = match self.executor.step(&mut self.sim, link, dt) {
                Ok(f) => f,
                Err(e) => {
                    self.planned = self.sim.joint_state();
                    self.picks.clear();
                    return Err(e);
                }
            };
            for id in finished {
                if self.picks.remove(&id) {
                    events.push(SystemEvent::PickDone);
                }
            }
        }
        Ok(events)
    }

    /// Run until every queued plan is done (or `max_ms` of virtual time passes).
    pub fn settle(&mut self, max_ms: f64) -> Result<Vec<SystemEvent>, RuntimeError> {
        let mut events = Vec::new();
        let t_end = self.sim.t_ms + max_ms;
        while !self.executor.is_idle() && self.sim.t_ms < t_end {
            events.extend(self.advance(SIM_TICK_MS)?);
        }
        Ok(events)
    }

    pub fn take_report(&mut self) -> ExecutionReport {
        std::mem::take(&mut self.executor.report)
    }
}

/// Cartesian front-end over the simulator, in the style of arms whose SDK
/// accepts tip positions directly.
#[derive(Debug)]
pub struct CartesianArm {
    pub runtime: ArmRuntime,
}

impl CartesianArm {
    pub fn new(runtime: ArmRuntime) -> Self {
        Self { runtime }
    }

    /// Move the tip to arm-frame `(x, y)` at height `z` above the shoulder
    /// pivot plane, blocking on the virtual clock.
    pub fn move_to(&mut self, x: f64, y: f64, z: f64) -> Result<ExecutionReport, RuntimeError> {
        let rt = &mut self.runtime;
        let (goal, segs) = rt.plan_point(&rt.planned, Point2::new(x, y), z)?;
        rt.executor.enqueue(&segs);
        rt.planned = goal;
        rt.settle(600_000.0)?;
        Ok(rt.take_report())
    }

    pub fn tip(&self) -> [f64; 3] {
        let t = self.runtime.sim.tip();
        [t.x, t.y, t.d]
    }
}
