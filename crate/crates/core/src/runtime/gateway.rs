use std::collections::VecDeque;

use serde::Deserialize;
use serde_json::{json, Value};

use super::ArmRuntime;
use crate::classifier::{predict, BlockModel, ScreenGrid};
use crate::gaze::{GazePipeline, GazeVector, PipelineConfig, SelectionEvent};
use crate::geom::Point2;
use crate::hri::{Screen, Session, SystemEvent, UiEvent};

/// Outbound state messages are spaced at least this far apart (30 Hz).
pub const BROADCAST_INTERVAL_MS: f64 = 1000.0 / 30.0;
pub const DEFAULT_QUEUE_CAPACITY: usize = 256;
/// Trailing pen-trace points carried in each state message.
pub const TRACE_TAIL: usize = 500;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Inbound {
    Gaze {
        t: f64,
        #[serde(default)]
        x: Option<f64>,
        #[serde(default)]
        y: Option<f64>,
        /// Raw gaze vector; used with a block model when no screen point is given.
        #[serde(default)]
        vec: Option<[f64; 6]>,
    },
    Select {
        region: String,
    },
    SetScreen {
        screen: String,
    },
}

pub fn error_message(msg: &str) -> String {
    json!({"type": "error", "message": msg}).to_string()
}

/// Sans-IO message hub between UI clients, the state machine and the arm.
///
/// `submit` validates and queues inbound text; `tick` drains the queue,
/// advances the arm and returns outbound messages. Every accepted message is
/// answered by a state broadcast from the tick that processes it, provided
/// ticks are at least [`BROADCAST_INTERVAL_MS`] apart; rejected messages are
/// answered by an error from `submit`.
#[derive(Debug)]
pub struct Gateway {
    pub session: Session,
    pub runtime: ArmRuntime,
    pipeline: GazePipeline,
    grid: ScreenGrid,
    model: Option<BlockModel>,
    queue: VecDeque<Inbound>,
    capacity: usize,
    t_ms: f64,
    last_broadcast: Option<f64>,
    logged: usize,
    cursor: Option<Point2>,
}

impl Gateway {
    pub fn new(session: Session, runtime: ArmRuntime) -> Self {
        let d = session.state.layout.display;
        Self {
            pipeline: GazePipeline::new(PipelineConfig::for_display(d.w, d.h)),
            grid: ScreenGrid::new(d.w, d.h),
            session,
            runtime,
            model: None,
            queue: VecDeque::new(),
            capacity: DEFAULT_QUEUE_CAPACITY,
            t_ms: 0.0,
            last_broadcast: None,
            logged: 0,
            cursor: None,
        }
    }

    pub fn with_model(mut self, model: BlockModel) -> Self {
        self.model = Some(model);
        self
    }

    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity.max(1);
        self
    }

    pub fn now_ms(&self) -> f64 {
        self.t_ms
    }

    pub fn queued(&self) -> usize {
        self.queue.len()
    }

    /// Parse and queue one inbound message. The error is the JSON reply for the sender.
    pub fn submit(&mut self, text: &str) -> Result<(), String> {
        let msg: Inbound = serde_json::from_str(text).map_err(|e| error_message(&format!("bad message: {e}")))?;
        match &msg {
            Inbound::Gaze { t, x, y, vec } => {
                if !t.is_finite() {
                    return Err(error_message("non-finite gaze time"));
                }
                match (x, y, vec) {
                    (Some(x), Some(y), _) if x.is_finite() && y.is_finite() => {}
                    (None, None, Some(v)) if self.model.is_some() && v.iter().all(|c| c.is_finite()) => {}
                    (None, None, Some(_)) if self.model.is_none() => return Err(error_message("gaze vector given but no block model loaded")),
                    _ => return Err(error_message("gaze needs finite x and y")),
                }
            }
            Inbound::SetScreen { screen } => {
                if Screen::from_name(screen).is_none() {
                    return Err(error_message(&format!("unknown screen {screen:?}")));
                }
            }
            Inbound::Select { .. } => {}
        }
        if self.queue.len() >= self.capacity {
            return Err(error_message("inbound queue full"));
        }
        self.queue.push_back(msg);
        Ok(())
    }

    fn handle(&mut self, event: UiEvent, out: &mut Vec<String>) {
        let before = self.session.screen();
        match self.session.handle(&event, self.t_ms) {
            Ok(actions) => {
                for a in actions {
                    if let Err(e) = self.runtime.apply(&a) {
                        out.push(error_message(&e.to_string()));
                    }
                }
            }
            Err(e) => out.push(error_message(&e.to_string())),
        }
        if self.session.screen() != before {
            self.pipeline.reset_dwell();
        }
    }

    fn process(&mut self, msg: Inbound, out: &mut Vec<String>) {
        match msg {
            Inbound::Gaze { t, x, y, vec } => {
                let p = match (x, y, vec, &self.model) {
                    (Some(x), Some(y), _, _) => Point2::new(x, y),
                    (_, _, Some(v), Some(m)) => match predict(m, &GazeVector(v)) {
                        Ok(block) => self.grid.center(block),
                        Err(e) => return out.push(error_message(&e.to_string())),
                    },
                    _ => return,
                };
                let regions = self.session.state.dwell_regions();
                if let Some(o) = self.pipeline.push_point(t, p, &regions) {
                    self.cursor = Some(o.cursor);
                    if let Some(ev) = o.event {
                        self.handle(UiEvent::Select(ev), out);
                    }
                }
            }
            Inbound::Select { region } => {
                let at = self.session.state.region(&region).map(|r| r.rect.center()).unwrap_or_default();
                self.handle(UiEvent::Select(SelectionEvent { region, t_ms: self.t_ms, at }), out);
            }
            Inbound::SetScreen { screen } => {
                if let Some(screen) = Screen::from_name(&screen) {
                    self.handle(UiEvent::System(SystemEvent::SetScreen { screen }), out);
                }
            }
        }
    }

    /// Advance the gateway clock by `dt_ms`.
    pub fn tick(&mut self, dt_ms: f64) -> Vec<String> {
        let mut out = Vec::new();
        self.t_ms += dt_ms.max(0.0);
        let processed = !self.queue.is_empty();
        while let Some(msg) = self.queue.pop_front() {
            self.process(msg, &mut out);
        }
        let moving = !self.runtime.is_idle();
        match self.runtime.advance(dt_ms.max(0.0)) {
            Ok(events) => {
                for ev in events {
                    self.handle(UiEvent::System(ev), &mut out);
                }
            }
            Err(e) => out.push(error_message(&e.to_string())),
        }
        for e in &self.session.log.events()[self.logged..] {
            out.push(json!({"type": "event", "t_ms": e.t_ms, "kind": e.kind, "payload": e.payload}).to_string());
        }
        self.logged = self.session.log.len();
        let due = self.last_broadcast.map_or(true, |t| self.t_ms - t >= BROADCAST_INTERVAL_MS - 1e-6);
        let heartbeat = self.last_broadcast.map_or(true, |t| self.t_ms - t >= 1000.0);
        if due && (processed || moving || heartbeat) {
            out.push(self.snapshot().to_string());
            self.last_broadcast = Some(self.t_ms);
        }
        out
    }

    pub fn snapshot(&self) -> Value {
        let sim = &self.runtime.sim;
        let tip = sim.tip();
        let st = &self.session.state;
        let regions: Vec<Value> = st.regions.iter().map(|r| json!({"id": r.id, "rect": [r.rect.x, r.rect.y, r.rect.w, r.rect.h]})).collect();
        let dwell = self.pipeline.dwell();
        let trace: Vec<[f64; 2]> = match &sim.pen {
            Some(pen) => pen.trace[pen.trace.len().saturating_sub(TRACE_TAIL)..].iter().map(|p| [p.x, p.y]).collect(),
            None => Vec::new(),
        };
        json!({
            "type": "state",
            "t": self.t_ms,
            "joints": {"base": sim.actual[0], "shoulder": sim.actual[1], "elbow": sim.actual[2], "gripper": sim.actual[3]},
            "tip": [tip.x, tip.y, tip.z],
            "screen": st.screen.name(),
            "phase": st.phase,
            "amplitude_cm": st.amplitude_cm,
            "regions": regions,
            "dwell": {"region": dwell.region_id, "progress": dwell.progress()},
            "cursor": self.cursor.map(|c| [c.x, c.y]),
            "trace": trace,
        })
    }
}
