use rand::Rng;
use serde::{Deserialize, Serialize};

use super::HriError;
use crate::geom::{Point2, Rect};
use crate::planner::Workspace;

pub const MIN_TARGET_OFFSET_CM: f64 = 5.0;
pub const DEFAULT_DONE_RADIUS_CM: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReachabilityTask {
    pub sheet: Rect,
    pub target: Point2,
    pub done_radius_cm: f64,
}

impl ReachabilityTask {
    pub fn new(sheet: Rect, target: Point2, done_radius_cm: f64) -> Result<Self, HriError> {
        if !target.is_finite() || !(done_radius_cm > 0.0) {
            return Err(HriError::Config("target and radius must be finite, radius positive".into()));
        }
        if !sheet.contains(target) {
            return Err(HriError::Config(format!("target ({}, {}) off the sheet", target.x, target.y)));
        }
        if target.distance(sheet.center()) < MIN_TARGET_OFFSET_CM {
            return Err(HriError::Config(format!("target closer than {MIN_TARGET_OFFSET_CM} cm to the sheet centre")));
        }
        Ok(Self { sheet, target, done_radius_cm })
    }

    /// Rejection-sample a target on the sheet, at least 5 cm from its centre,
    /// whose distance from the arm base lies in `reach_cm`.
    pub fn random<R: Rng>(ws: &Workspace, reach_cm: (f64, f64), done_radius_cm: f64, rng: &mut R) -> Result<Self, HriError> {
        let s = ws.sheet;
        for _ in 0..10_000 {
            let p = Point2::new(rng.gen_range(s.x..s.x + s.w), rng.gen_range(s.y..s.y + s.h));
            let r = p.x.hypot(p.y);
            if p.distance(s.center()) >= MIN_TARGET_OFFSET_CM && r >= reach_cm.0 && r <= reach_cm.1 {
                return Self::new(s, p, done_radius_cm);
            }
        }
        Err(HriError::Config("no admissible target on this sheet".into()))
    }
}

pub fn reachability_check(task: &ReachabilityTask, pen: Point2) -> bool {
    pen.distance(task.target) <= task.done_radius_cm
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn task() -> ReachabilityTask {
        let ws = Workspace::default();
        ReachabilityTask::new(ws.sheet, Point2::new(6.0, 12.0), DEFAULT_DONE_RADIUS_CM).unwrap()
    }

    #[test]
    fn done_boundary() {
        let t = task();
        assert!(reachability_check(&t, t.target));
        assert!(reachability_check(&t, Point2::new(6.5, 12.0)));
        assert!(!reachability_check(&t, Point2::new(6.51, 12.0)));
    }

    #[test]
    fn rejects_targets_near_centre_or_off_sheet() {
        let ws = Workspace::default();
        assert!(ReachabilityTask::new(ws.sheet, Point2::new(3.0, 12.0), 0.5).is_err());
        assert!(ReachabilityTask::new(ws.sheet, Point2::new(12.0, 12.0), 0.5).is_err());
    }

    #[test]
    fn random_targets_are_admissible() {
        let ws = Workspace::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let t = ReachabilityTask::random(&ws, (5.0, 19.5), 0.5, &mut rng).unwrap();
            assert!(ws.sheet.contains(t.target));
            assert!(t.target.distance(ws.center()) >= 5.0);
            let r = t.target.x.hypot(t.target.y);
            assert!((5.0..=19.5).contains(&r));
        }
    }
}
