use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{RuntimeError, ServoLink, SimArm, SIM_TICK_MS};
use crate::planner::{JointId, MotionSegment};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub joint: JointId,
    pub start_deg: f64,
    pub end_deg: f64,
    pub dispatched_ms: f64,
    pub arrived_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub segments: Vec<SegmentRecord>,
    /// Set when the backend refused a command; later segments were dropped.
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum JointRun {
    Idle,
    Moving { record: usize, delay_ms: f64 },
    Waiting { until_ms: f64 },
}

#[derive(Debug, Clone)]
struct Batch {
    id: u64,
    queues: [VecDeque<MotionSegment>; 4],
}

/// Runs plans on a [`SimArm`], optionally mirroring every dispatch to a servo link.
///
/// Plans are executed one after another. Within a plan each joint works
/// through its own segments in order and waits `delay_after_ms` after
/// arriving before starting its next one; other joints are not held up.
#[derive(Debug, Clone)]
pub struct Executor {
    batches: VecDeque<Batch>,
    joints: [JointRun; 4],
    next_id: u64,
    pub report: ExecutionReport,
}

impl Default for Executor {
    fn default() -> Self {
        Self { batches: VecDeque::new(), joints: [JointRun::Idle; 4], next_id: 0, report: ExecutionReport::default() }
    }
}

impl Executor {
    pub fn new() -> Self {
        Self::default()
    }

    /// Queue a plan, returning its id. Empty plans complete on the next step.
    pub fn enqueue(&mut self, plan: &[MotionSegment]) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        let mut queues: [VecDeque<MotionSegment>; 4] = Default::default();
        for s in plan {
            queues[s.joint.index() as usize].push_back(*s);
        }
        self.batches.push_back(Batch { id, queues });
        id
    }

    pub fn is_idle(&self) -> bool {
        self.batches.is_empty()
    }

    pub fn pending_plans(&self) -> usize {
        self.batches.len()
    }

    fn abort(&mut self, err: &RuntimeError) {
        self.batches.clear();
        self.joints = [JointRun::Idle; 4];
        self.report.aborted = Some(err.to_string());
    }

    /// Dispatch what is due, advance the simulator by `dt_ms`, and return
    /// the ids of plans that finished.
    pub fn step<'l>(&mut self, sim: &mut SimArm, mut link: Option<&mut (dyn ServoLink + 'l)>, dt_ms: f64) -> Result<Vec<u64>, RuntimeError> {
        let mut done = Vec::new();
        if let Some(batch) = self.batches.front_mut() {
            for (j, run) in self.joints.iter_mut().enumerate() {
                if let JointRun::Waiting { until_ms } = *run {
                    if sim.t_ms >= until_ms {
                        *run = JointRun::Idle;
                    }
                }
                if *run != JointRun::Idle {
                    continue;
                }
                let Some(seg) = batch.queues[j].pop_front() else { continue };
                let dispatch = link.as_deref_mut().map_or(Ok(()), |l| l.send(seg.joint, seg.end_deg)).and_then(|_| sim.command(seg.joint, seg.end_deg));
                if let Err(e) = dispatch {
                    self.abort(&e);
                    return Err(e);
                }
                self.report.segments.push(SegmentRecord {
                    joint: seg.joint,
                    start_deg: seg.start_deg,
                    end_deg: seg.end_deg,
                    dispatched_ms: sim.t_ms,
                    arrived_ms: None,
                });
                *run = JointRun::Moving { record: self.report.segments.len() - 1, delay_ms: seg.delay_after_ms };
            }
        }
        sim.step(dt_ms);
        for (j, run) in self.joints.iter_mut().enumerate() {
            if let JointRun::Moving { record, delay_ms } = *run {
                let joint = JointId::from_index(j as u8).expect("four joints");
                if sim.at_rest(joint) {
                    self.report.segments[record].arrived_ms = Some(sim.t_ms);
                    *run = if delay_ms > 0.0 { JointRun::Waiting { until_ms: sim.t_ms + delay_ms } } else { JointRun::Idle };
                }
            }
        }
        if let Some(batch) = self.batches.front() {
            let drained = batch.queues.iter().all(VecDeque::is_empty);
            let settled = self.joints.iter().all(|r| !matches!(r, JointRun::Moving { .. }));
            if drained && settled {
                done.push(batch.id);
                self.batches.pop_front();
                // trailing delays do not hold up the next plan
                self.joints = [JointRun::Idle; 4];
            }
        }
        Ok(done)
    }
}

/// Run `plan` to completion on the simulator with fixed 10 ms ticks.
///
/// With a link, every dispatch is also sent over it; a refused command ends
/// execution and the partial report is returned with `aborted` set.
pub fn execute<'l>(plan: &[MotionSegment], sim: &mut SimArm, mut link: Option<&mut (dyn ServoLink + 'l)>) -> ExecutionReport {
    let mut ex = Executor::new();
    if plan.is_empty() {
        return ex.report;
    }
    ex.enqueue(plan);
    // generous bound: every segment at full span plus its delay
    let budget: f64 = plan.iter().map(|s| 1000.0 * 180.0 / sim.max_rate_deg_s + s.delay_after_ms).sum::<f64>() + 1000.0;
    let t_end = sim.t_ms + budget;
    while !ex.is_idle() && sim.t_ms < t_end {
        if ex.step(sim, link.as_deref_mut(), SIM_TICK_MS).is_err() {
            break;
        }
    }
    ex.report
}
