use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{reachability_check, EventKind, HriError, ReachabilityTask, Screen, Session, SessionLog, UiEvent, UiState};
use crate::arm::{ArmGeometry, JointState};
use crate::gaze::synthetic::{StreamConfig, SyntheticGaze, ViewingGeometry};
use crate::gaze::{GazePipeline, PipelineConfig};
use crate::geom::Point2;
use crate::planner::{plan_to_arm_point, AmplitudeConfig, Direction, PlannerConfig, Workspace};
use crate::runtime::{display_to_sheet, ArmRuntime, Pen, SimArm};

#[derive(Debug, Clone, PartialEq)]
pub struct ReachabilityConfig {
    pub seed: u64,
    pub geometry: ArmGeometry,
    pub workspace: Workspace,
    pub done_radius_cm: f64,
    /// Admissible target distance from the arm base.
    pub reach_cm: (f64, f64),
    pub gaze: StreamConfig,
    /// Pause after the arm stops before the user looks at the next control.
    pub think_ms: f64,
    pub max_ms: f64,
}

impl Default for ReachabilityConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            geometry: ArmGeometry::default(),
            workspace: Workspace::default(),
            done_radius_cm: super::DEFAULT_DONE_RADIUS_CM,
            reach_cm: (5.0, 19.5),
            gaze: StreamConfig::default(),
            think_ms: 300.0,
            max_ms: 600_000.0,
        }
    }
}

/// Scripted four-way user: closes the larger axis error first, never
/// overshooting, and tunes the amplitude to the remaining distance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JogUser {
    /// Direction whose last jog could not be planned; avoided once.
    pub blocked: Option<Direction>,
}

impl JogUser {
    /// Region the user wants to select next, or `None` when already done.
    pub fn intent(&self, pen: Point2, task: &ReachabilityTask, amplitude_cm: f64, amp: &AmplitudeConfig) -> Option<&'static str> {
        if reachability_check(task, pen) {
            return None;
        }
        let (ex, ey) = (task.target.x - pen.x, task.target.y - pen.y);
        let horizontal = (ex.abs(), if ex > 0.0 { Direction::Right } else { Direction::Left });
        let vertical = (ey.abs(), if ey > 0.0 { Direction::Up } else { Direction::Down });
        let (first, second) = if horizontal.0 >= vertical.0 { (horizontal, vertical) } else { (vertical, horizontal) };
        let (err, dir) = if Some(first.1) == self.blocked && second.0 >= amp.min_cm { second } else { first };
        if err >= amplitude_cm + amp.step_cm && amplitude_cm < amp.max_cm {
            Some("amp-plus")
        } else if err >= amplitude_cm {
            Some(dir.name())
        } else if amplitude_cm > amp.min_cm {
            Some("amp-minus")
        } else {
            // both errors below the minimum step: nudge along the larger one
            Some(dir.name())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReachabilityRun {
    pub task: ReachabilityTask,
    pub reached: bool,
    pub completion_ms: Option<f64>,
    pub final_pen: Point2,
    pub log: SessionLog,
    pub plan_failures: usize,
    pub trace_length_cm: f64,
}

fn home_pose(g: &ArmGeometry, ws: &Workspace) -> Result<JointState, HriError> {
    let seed = JointState::new(90.0, 120.0, 60.0);
    let plan = plan_to_arm_point(g, &seed, ws.center(), ws.work_height_cm, &PlannerConfig::default()).map_err(crate::runtime::RuntimeError::from)?;
    Ok(plan.goal)
}

/// One closed-loop reachability trial: a scripted user steers the pen from
/// the sheet centre to a random target by dwelling on four-way controls,
/// with every selection passing through the gaze pipeline.
pub fn run_reachability(cfg: &ReachabilityConfig) -> Result<ReachabilityRun, HriError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ws = cfg.workspace;
    let task = ReachabilityTask::random(&ws, cfg.reach_cm, cfg.done_radius_cm, &mut rng)?;

    let view = ViewingGeometry::default();
    let (w, h) = view.display_px;
    let mut session = Session::new(UiState::default());
    let display = session.state.layout.display;
    let sim = SimArm::new(cfg.geometry.clone(), &home_pose(&cfg.geometry, &ws)?).with_pen(Pen::on_plane(ws.work_height_cm));
    let mut rt = ArmRuntime::new(sim, ws, display_to_sheet(&display, &ws.sheet));
    let mut pipeline = GazePipeline::new(PipelineConfig::for_display(w, h));
    let mut gaze = SyntheticGaze::new(view, cfg.gaze.clone(), cfg.seed.wrapping_add(0x9e37_79b9));
    let neutral = Point2::new(0.5 * w, 0.5 * h);
    let period = cfg.gaze.period_ms();

    let mut user = JogUser::default();
    let mut plan_failures = 0;
    session.log.push(0.0, EventKind::Highlight, json!({"target": [task.target.x, task.target.y], "radius_cm": task.done_radius_cm}))?;

    let mut looking: Option<&'static str> = None;
    let mut ready_at = cfg.think_ms;
    let mut completion = None;
    let mut t = 0.0;
    while t < cfg.max_ms {
        t += period;
        rt.advance(period)?;
        let tip = rt.sim.tip();
        let pen = Point2::new(tip.x, tip.y);
        let touching = rt.sim.pen.as_ref().is_some_and(|p| tip.d <= p.plane_cm + p.tolerance_cm);
        if touching && reachability_check(&task, pen) {
            session.log.push(t, EventKind::TaskDone, json!({"pen": [pen.x, pen.y]}))?;
            completion = Some(t);
            break;
        }

        if looking.is_none() && rt.is_idle() && t >= ready_at {
            looking = match session.screen() {
                Screen::FourWay => user.intent(pen, &task, session.state.amplitude_cm, &session.state.amplitude),
                _ => Some("four-way"),
            };
        }
        let target_px = looking.and_then(|id| session.state.region(id)).map_or(neutral, |r| r.rect.center());
        let sample = gaze.sample(t, target_px);
        let Some(out) = pipeline.push(&sample, &session.state.dwell_regions()) else { continue };
        let Some(sel) = out.event else { continue };
        let before = session.screen();
        let chosen = sel.region.clone();
        for action in session.handle(&UiEvent::Select(sel), t)? {
            match rt.apply(&action) {
                Ok(()) => user.blocked = None,
                Err(_) => {
                    plan_failures += 1;
                    user.blocked = Direction::ALL.into_iter().find(|d| d.name() == chosen);
                }
            }
        }
        if session.screen() != before {
            pipeline.reset_dwell();
        }
        if looking == Some(chosen.as_str()) || looking.is_none() {
            looking = None;
            ready_at = t + cfg.think_ms;
        }
    }
    let tip = rt.sim.tip();
    let trace_length_cm = rt.sim.pen.as_ref().map_or(0.0, Pen::trace_length);
    Ok(ReachabilityRun {
        task,
        reached: completion.is_some(),
        completion_ms: completion,
        final_pen: Point2::new(tip.x, tip.y),
        log: session.log,
        plan_failures,
        trace_length_cm,
    })
}
