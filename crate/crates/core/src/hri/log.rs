use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::HriError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Highlight,
    Select,
    Pick,
    Drop,
    Jog,
    AmpChange,
    DirectionChange,
    Timeout,
    TaskDone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    pub t_ms: f64,
    pub kind: EventKind,
    #[serde(default)]
    pub payload: Value,
}

/// Append-only, time-ordered session record.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    events: Vec<LogEvent>,
}

impl SessionLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &[LogEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn last_t(&self) -> Option<f64> {
        self.events.last().map(|e| e.t_ms)
    }

    pub fn push(&mut self, t_ms: f64, kind: EventKind, payload: Value) -> Result<&LogEvent, HriError> {
        if !t_ms.is_finite() {
            return Err(HriError::NonFinite);
        }
        if let Some(last) = self.last_t() {
            if t_ms < last {
                return Err(HriError::OutOfOrder { t_ms, last_ms: last });
            }
        }
        self.events.push(LogEvent { t_ms, kind, payload });
        Ok(self.events.last().expect("just pushed"))
    }

    pub fn of_kind(&self, kind: EventKind) -> impl Iterator<Item = &LogEvent> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    /// One JSON object per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<(), HriError> {
        for e in &self.events {
            let line = serde_json::to_string(e).map_err(|e| HriError::Log { line: 0, msg: e.to_string() })?;
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self, HriError> {
        let mut log = SessionLog::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e: LogEvent = serde_json::from_str(&line).map_err(|e| HriError::Log { line: i + 1, msg: e.to_string() })?;
            log.push(e.t_ms, e.kind, e.payload).map_err(|e| HriError::Log { line: i + 1, msg: e.to_string() })?;
        }
        Ok(log)
    }
}
