use serde::{Deserialize, Serialize};

use crate::gaze::{Region, SelectionEvent};
use crate::geom::{Point2, Rect};
use crate::planner::{adjust_amplitude, AmplitudeConfig, AmplitudeSign, Direction, JogCommand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Screen {
    Start,
    PickAndDrop,
    PointToPoint,
    FourWay,
}

impl Screen {
    pub const ALL: [Screen; 4] = [Screen::Start, Screen::PickAndDrop, Screen::PointToPoint, Screen::FourWay];

    pub fn name(self) -> &'static str {
        match self {
            Screen::Start => "start",
            Screen::PickAndDrop => "pick-and-drop",
            Screen::PointToPoint => "point-to-point",
            Screen::FourWay => "four-way",
        }
    }

    pub fn from_name(s: &str) -> Option<Screen> {
        Screen::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    AwaitPick,
    Executing,
    AwaitDrop,
}

/// What selecting a region does.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionAction {
    Goto { screen: Screen },
    Back,
    Pick { source: usize },
    Drop,
    Point,
    Jog { direction: Direction },
    Amplitude { sign: AmplitudeSign },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UiRegion {
    pub id: String,
    pub rect: Rect,
    pub action: RegionAction,
}

/// Commands leaving the state machine for the runtime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    ShowScreen { screen: Screen },
    PickSequence { source: usize, at: Point2 },
    DropSequence { at: Point2 },
    MoveTo { at: Point2 },
    Jog { command: JogCommand },
    SetAmplitude { amplitude_cm: f64 },
}

/// Inputs that do not come from the user's gaze.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SystemEvent {
    /// The runtime finished a pick sequence.
    PickDone,
    SetScreen { screen: Screen },
}

#[derive(Debug, Clone, PartialEq)]
pub enum UiEvent {
    Select(SelectionEvent),
    System(SystemEvent),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutConfig {
    pub display: Rect,
    /// Objects that can be picked on the pick-and-drop screen.
    pub sources: usize,
    /// Point-to-point canvas tiling, columns × rows.
    pub canvas_cells: (usize, usize),
}

impl LayoutConfig {
    pub fn for_display(w: f64, h: f64) -> Self {
        Self { display: Rect::new(0.0, 0.0, w, h), sources: 3, canvas_cells: (12, 6) }
    }

    /// Display-fraction rectangle snapped to whole pixels, so shared edges coincide.
    fn rect(&self, nx: f64, ny: f64, nw: f64, nh: f64) -> Rect {
        let d = &self.display;
        let (x0, x1) = ((nx * d.w).round(), ((nx + nw) * d.w).round());
        let (y0, y1) = ((ny * d.h).round(), ((ny + nh) * d.h).round());
        Rect::new(d.x + x0, d.y + y0, x1 - x0, y1 - y0)
    }
}

/// Height of the control strip above the point-to-point canvas, as a display fraction.
const STRIP: f64 = 1.0 / 9.0;

fn region(id: &str, rect: Rect, action: RegionAction) -> UiRegion {
    UiRegion { id: id.to_string(), rect, action }
}

/// Regions of `screen` in `phase`.
pub fn layout(cfg: &LayoutConfig, screen: Screen, phase: Phase) -> Vec<UiRegion> {
    let back = || region("back", cfg.rect(0.0, 0.0, 0.15, STRIP * 1.5), RegionAction::Back);
    match screen {
        Screen::Start => vec![
            region("pick-and-drop", cfg.rect(0.05, 0.3, 0.25, 0.4), RegionAction::Goto { screen: Screen::PickAndDrop }),
            region("point-to-point", cfg.rect(0.375, 0.3, 0.25, 0.4), RegionAction::Goto { screen: Screen::PointToPoint }),
            region("four-way", cfg.rect(0.7, 0.3, 0.25, 0.4), RegionAction::Goto { screen: Screen::FourWay }),
        ],
        Screen::PickAndDrop => {
            let mut out = vec![back()];
            match phase {
                Phase::AwaitPick => {
                    let n = cfg.sources.max(1);
                    let h = 0.7 / n as f64;
                    for i in 0..n {
                        let r = cfg.rect(0.2, 0.2 + h * i as f64 + 0.1 * h, 0.15, 0.8 * h);
                        out.push(region(&format!("object-{i}"), r, RegionAction::Pick { source: i }));
                    }
                }
                // while the pick runs, the drop target is already shown
                Phase::Executing | Phase::AwaitDrop => out.push(region("drop", cfg.rect(0.6, 0.35, 0.2, 0.3), RegionAction::Drop)),
            }
            out
        }
        Screen::PointToPoint => {
            let mut out = vec![back(), region("four-way", cfg.rect(0.85, 0.0, 0.15, STRIP * 1.5), RegionAction::Goto { screen: Screen::FourWay })];
            let (cols, rows) = cfg.canvas_cells;
            let top = STRIP * 1.5;
            let (cw, ch) = (1.0 / cols as f64, (1.0 - top) / rows as f64);
            for r in 0..rows {
                for c in 0..cols {
                    let (x, y) = (c as f64 * cw, top + r as f64 * ch);
                    // edges from neighbouring indices so adjacent cells share them exactly
                    let rect = cfg.rect(x, y, (c + 1) as f64 * cw - x, top + (r + 1) as f64 * ch - y);
                    out.push(region(&format!("cell-{r}-{c}"), rect, RegionAction::Point));
                }
            }
            out
        }
        Screen::FourWay => vec![
            region("up", cfg.rect(0.375, 0.0, 0.25, 0.25), RegionAction::Jog { direction: Direction::Up }),
            region("down", cfg.rect(0.375, 0.75, 0.25, 0.25), RegionAction::Jog { direction: Direction::Down }),
            region("left", cfg.rect(0.0, 0.3, 0.25, 0.4), RegionAction::Jog { direction: Direction::Left }),
            region("right", cfg.rect(0.75, 0.3, 0.25, 0.4), RegionAction::Jog { direction: Direction::Right }),
            region("amp-plus", cfg.rect(0.8, 0.8, 0.2, 0.2), RegionAction::Amplitude { sign: AmplitudeSign::Plus }),
            region("amp-minus", cfg.rect(0.0, 0.8, 0.2, 0.2), RegionAction::Amplitude { sign: AmplitudeSign::Minus }),
            back(),
        ],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UiState {
    pub screen: Screen,
    pub phase: Phase,
    pub amplitude_cm: f64,
    pub regions: Vec<UiRegion>,
    /// Selections made while a pick is executing, applied once it completes.
    pub pending: Vec<SelectionEvent>,
    pub layout: LayoutConfig,
    pub amplitude: AmplitudeConfig,
}

impl UiState {
    pub fn new(layout: LayoutConfig, amplitude: AmplitudeConfig) -> Self {
        let regions = self::layout(&layout, Screen::Start, Phase::AwaitPick);
        Self { screen: Screen::Start, phase: Phase::AwaitPick, amplitude_cm: amplitude.initial_cm, regions, pending: Vec::new(), layout, amplitude }
    }

    pub fn region(&self, id: &str) -> Option<&UiRegion> {
        self.regions.iter().find(|r| r.id == id)
    }

    /// Plain regions for the dwell timer.
    pub fn dwell_regions(&self) -> Vec<Region> {
        self.regions.iter().map(|r| Region::new(r.id.clone(), r.rect)).collect()
    }

    fn enter(&mut self, screen: Screen, phase: Phase) {
        self.screen = screen;
        self.phase = phase;
        self.regions = layout(&self.layout, screen, phase);
        self.pending.clear();
    }
}

impl Default for UiState {
    fn default() -> Self {
        Self::new(LayoutConfig::for_display(1920.0, 1080.0), AmplitudeConfig::default())
    }
}

/// Apply one event to the state machine.
///
/// Selections of regions that are not active are ignored. While a pick is
/// executing, selections are queued (a repeat of an already queued region is
/// discarded) and replayed once the runtime reports `PickDone`.
pub fn transition(state: &UiState, event: &UiEvent) -> (UiState, Vec<Action>) {
    let mut s = state.clone();
    let mut actions = Vec::new();
    match event {
        UiEvent::System(SystemEvent::SetScreen { screen }) => {
            if *screen != s.screen {
                s.enter(*screen, Phase::AwaitPick);
                actions.push(Action::ShowScreen { screen: *screen });
            }
        }
        UiEvent::System(SystemEvent::PickDone) => {
            if s.screen == Screen::PickAndDrop && s.phase == Phase::Executing {
                let queued = std::mem::take(&mut s.pending);
                s.enter(Screen::PickAndDrop, Phase::AwaitDrop);
                for ev in queued {
                    let (next, mut more) = transition(&s, &UiEvent::Select(ev));
                    s = next;
                    actions.append(&mut more);
                }
            }
        }
        UiEvent::Select(ev) => {
            let Some(r) = s.region(&ev.region).cloned() else { return (s, actions) };
            if s.screen == Screen::PickAndDrop && s.phase == Phase::Executing && r.action != RegionAction::Back {
                if !s.pending.iter().any(|p| p.region == ev.region) {
                    s.pending.push(ev.clone());
                }
                return (s, actions);
            }
            match r.action {
                RegionAction::Goto { screen } => {
                    s.enter(screen, Phase::AwaitPick);
                    actions.push(Action::ShowScreen { screen });
                }
                RegionAction::Back => {
                    s.enter(Screen::Start, Phase::AwaitPick);
                    actions.push(Action::ShowScreen { screen: Screen::Start });
                }
                RegionAction::Pick { source } => {
                    actions.push(Action::PickSequence { source, at: r.rect.center() });
                    s.enter(Screen::PickAndDrop, Phase::Executing);
                }
                RegionAction::Drop => {
                    actions.push(Action::DropSequence { at: r.rect.center() });
                    s.enter(Screen::PickAndDrop, Phase::AwaitPick);
                }
                RegionAction::Point => actions.push(Action::MoveTo { at: r.rect.center() }),
                RegionAction::Jog { direction } => {
                    let command = JogCommand { direction, amplitude_cm: s.amplitude_cm };
                    actions.push(Action::Jog { command });
                }
                RegionAction::Amplitude { sign } => {
                    let next = adjust_amplitude(s.amplitude_cm, sign, &s.amplitude);
                    if next != s.amplitude_cm {
                        s.amplitude_cm = next;
                        actions.push(Action::SetAmplitude { amplitude_cm: next });
                    }
                }
            }
        }
    }
    (s, actions)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn select(s: &UiState, id: &str) -> (UiState, Vec<Action>) {
        let at = s.region(id).map(|r| r.rect.center()).unwrap_or_default();
        transition(s, &UiEvent::Select(SelectionEvent { region: id.into(), t_ms: 0.0, at }))
    }

    fn overlapping(regions: &[UiRegion]) -> bool {
        regions.iter().enumerate().any(|(i, a)| regions[i + 1..].iter().any(|b| a.rect.overlaps(&b.rect)))
    }

    #[test]
    fn layouts_are_disjoint_and_on_screen() {
        let cfg = LayoutConfig::for_display(1920.0, 1080.0);
        for screen in Screen::ALL {
            for phase in [Phase::AwaitPick, Phase::Executing, Phase::AwaitDrop] {
                let regions = layout(&cfg, screen, phase);
                assert!(!overlapping(&regions), "{screen:?} {phase:?}");
                for r in &regions {
                    assert!(r.rect.x >= 0.0 && r.rect.y >= 0.0 && r.rect.x + r.rect.w <= 1920.0 + 1e-9 && r.rect.y + r.rect.h <= 1080.0 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn start_to_four_way_has_seven_regions() {
        let (s, actions) = select(&UiState::default(), "four-way");
        assert_eq!(s.screen, Screen::FourWay);
        assert_eq!(s.regions.len(), 7);
        assert_eq!(actions, vec![Action::ShowScreen { screen: Screen::FourWay }]);
    }

    #[test]
    fn pick_executes_then_awaits_drop() {
        let (s, _) = select(&UiState::default(), "pick-and-drop");
        let (s, actions) = select(&s, "object-0");
        assert!(matches!(actions[..], [Action::PickSequence { source: 0, .. }]));
        assert_eq!(s.phase, Phase::Executing);
        let (s, actions) = transition(&s, &UiEvent::System(SystemEvent::PickDone));
        assert!(actions.is_empty());
        assert_eq!(s.phase, Phase::AwaitDrop);
        let (s, actions) = select(&s, "drop");
        assert!(matches!(actions[..], [Action::DropSequence { .. }]));
        assert_eq!(s.phase, Phase::AwaitPick);
    }

    #[test]
    fn drop_during_pick_is_queued_once() {
        let (s, _) = select(&UiState::default(), "pick-and-drop");
        let (s, _) = select(&s, "object-1");
        let (s, a1) = select(&s, "drop");
        let (s, a2) = select(&s, "drop");
        assert!(a1.is_empty() && a2.is_empty());
        assert_eq!(s.pending.len(), 1);
        let (s, actions) = transition(&s, &UiEvent::System(SystemEvent::PickDone));
        assert!(matches!(actions[..], [Action::DropSequence { .. }]));
        assert_eq!(s.phase, Phase::AwaitPick);
    }

    #[test]
    fn amplitude_plus_twice() {
        let (s, _) = select(&UiState::default(), "four-way");
        let (s, _) = select(&s, "amp-plus");
        let (s, actions) = select(&s, "amp-plus");
        assert_eq!(s.amplitude_cm, 2.0);
        assert_eq!(actions, vec![Action::SetAmplitude { amplitude_cm: 2.0 }]);
    }

    #[test]
    fn jog_uses_current_amplitude() {
        let (s, _) = select(&UiState::default(), "four-way");
        let (_, actions) = select(&s, "left");
        assert_eq!(actions, vec![Action::Jog { command: JogCommand { direction: Direction::Left, amplitude_cm: 1.0 } }]);
    }

    #[test]
    fn inactive_region_is_ignored() {
        let s = UiState::default();
        let (next, actions) = select(&s, "up");
        assert_eq!(next, s);
        assert!(actions.is_empty());
    }

    #[test]
    fn point_to_point_toggles_to_four_way() {
        let (s, _) = select(&UiState::default(), "point-to-point");
        let (s2, actions) = select(&s, "cell-2-3");
        assert_eq!(s2.screen, Screen::PointToPoint);
        assert!(matches!(actions[..], [Action::MoveTo { .. }]));
        let (s3, _) = select(&s2, "four-way");
        assert_eq!(s3.screen, Screen::FourWay);
    }
}
