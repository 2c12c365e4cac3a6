use serde_json::json;

use super::{transition, Action, EventKind, HriError, Phase, Screen, SessionLog, UiEvent, UiState};
use crate::planner::Direction;

/// UI state machine paired with its session log.
#[derive(Debug, Clone, Default)]
pub struct Session {
    pub state: UiState,
    pub log: SessionLog,
    last_jog: Option<Direction>,
}

impl Session {
    pub fn new(state: UiState) -> Self {
        Self { state, log: SessionLog::new(), last_jog: None }
    }

    /// Feed one event at time `t_ms`, logging the selection and every action it emits.
    pub fn handle(&mut self, event: &UiEvent, t_ms: f64) -> Result<Vec<Action>, HriError> {
        let (next, actions) = transition(&self.state, event);
        if let UiEvent::Select(sel) = event {
            let accepted = !actions.is_empty() || next.pending.len() != self.state.pending.len();
            if accepted {
                self.log.push(t_ms, EventKind::Select, json!({"region": sel.region, "screen": self.state.screen.name()}))?;
            }
        }
        self.state = next;
        for a in &actions {
            self.log_action(a, t_ms)?;
        }
        Ok(actions)
    }

    fn log_action(&mut self, a: &Action, t_ms: f64) -> Result<(), HriError> {
        match a {
            Action::PickSequence { source, at } => {
                self.log.push(t_ms, EventKind::Pick, json!({"source": source, "at": [at.x, at.y]}))?;
            }
            Action::DropSequence { at } => {
                self.log.push(t_ms, EventKind::Drop, json!({"at": [at.x, at.y]}))?;
            }
            Action::Jog { command } => {
                self.log.push(t_ms, EventKind::Jog, json!({"direction": command.direction.name(), "amplitude_cm": command.amplitude_cm}))?;
                if let Some(prev) = self.last_jog.filter(|d| *d != command.direction) {
                    self.log.push(t_ms, EventKind::DirectionChange, json!({"from": prev.name(), "to": command.direction.name()}))?;
                }
                self.last_jog = Some(command.direction);
            }
            Action::SetAmplitude { amplitude_cm } => {
                self.log.push(t_ms, EventKind::AmpChange, json!({"amplitude_cm": amplitude_cm}))?;
            }
            Action::ShowScreen { .. } | Action::MoveTo { .. } => {}
        }
        Ok(())
    }

    pub fn screen(&self) -> Screen {
        self.state.screen
    }

    pub fn phase(&self) -> Phase {
        self.state.phase
    }
}
