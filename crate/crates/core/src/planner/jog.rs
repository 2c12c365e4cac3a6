use serde::{Deserialize, Serialize};

use super::PlanError;
use crate::geom::{Point2, Rect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    /// Unit displacement in the arm frame: up/down along ±y, left/right along ∓x.
    pub fn unit(self) -> (f64, f64) {
        match self {
            Direction::Up => (0.0, 1.0),
            Direction::Down => (0.0, -1.0),
            Direction::Left => (-1.0, 0.0),
            Direction::Right => (1.0, 0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeConfig {
    pub initial_cm: f64,
    pub step_cm: f64,
    pub min_cm: f64,
    pub max_cm: f64,
}

impl Default for AmplitudeConfig {
    fn default() -> Self {
        Self { initial_cm: 1.0, step_cm: 0.5, min_cm: 0.25, max_cm: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JogCommand {
    pub direction: Direction,
    pub amplitude_cm: f64,
}

impl JogCommand {
    pub fn new(direction: Direction, amplitude_cm: f64, cfg: &AmplitudeConfig) -> Result<Self, PlanError> {
        if !(amplitude_cm >= cfg.min_cm && amplitude_cm <= cfg.max_cm) {
            return Err(PlanError::InvalidAmplitude(amplitude_cm, cfg.min_cm, cfg.max_cm));
        }
        Ok(Self { direction, amplitude_cm })
    }
}

/// Displace `current` by the command's amplitude, clamped to `bounds`.
pub fn jog_target(current: Point2, cmd: &JogCommand, bounds: &Rect) -> Point2 {
    let (ux, uy) = cmd.direction.unit();
    bounds.clamp(Point2::new(current.x + ux * cmd.amplitude_cm, current.y + uy * cmd.amplitude_cm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmplitudeSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

pub fn adjust_amplitude(current_cm: f64, sign: AmplitudeSign, cfg: &AmplitudeConfig) -> f64 {
    let next = match sign {
        AmplitudeSign::Plus => current_cm + cfg.step_cm,
        AmplitudeSign::Minus => current_cm - cfg.step_cm,
    };
    next.clamp(cfg.min_cm, cfg.max_cm)
}
