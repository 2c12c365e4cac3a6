use std::collections::VecDeque;

use super::GazeError;
use crate::geom::{Point2, Rect};

/// Control points used by the cursor curve (cubic).
pub const BEZIER_HISTORY: usize = 4;

/// Curve parameter at which the cursor is placed. Values below 1 lag the newest
/// point slightly and keep the cursor inside the convex hull of recent points.
pub const DEFAULT_BEZIER_PARAM: f64 = 0.8;

/// Component-wise median of a window of screen points.
pub fn median_filter(window: &[Point2]) -> Result<Point2, GazeError> {
    if window.is_empty() {
        return Err(GazeError::NoSamples);
    }
    if window.iter().any(|p| !p.is_finite()) {
        return Err(GazeError::NonFinite);
    }
    let mut xs: Vec<f64> = window.iter().map(|p| p.x).collect();
    let mut ys: Vec<f64> = window.iter().map(|p| p.y).collect();
    Ok(Point2::new(median_in_place(&mut xs), median_in_place(&mut ys)))
}

fn median_in_place(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// The red-dot cursor: current position plus the last few filtered points.
#[derive(Debug, Clone, PartialEq)]
pub struct CursorState {
    pub pos: Point2,
    pub history: VecDeque<(f64, Point2)>,
    /// Maximum history length.
    pub k: usize,
    pub bounds: Rect,
    pub bezier_param: f64,
}

impl CursorState {
    pub fn new(bounds: Rect) -> Self {
        Self {
            pos: bounds.center(),
            history: VecDeque::with_capacity(BEZIER_HISTORY),
            k: BEZIER_HISTORY,
            bounds,
            bezier_param: DEFAULT_BEZIER_PARAM,
        }
    }
}

/// Append a median-filtered point and place the cursor on the Bezier curve whose
/// control points are the last (up to four) filtered points.
///
/// Shorter histories use a curve of correspondingly lower degree, so a single
/// point passes straight through.
pub fn smooth_cursor(prev: &CursorState, filtered: Point2, t_ms: f64) -> CursorState {
    let mut next = prev.clone();
    if !filtered.is_finite() {
        return next;
    }
    let k = next.k.max(1);
    next.history.push_back((t_ms, filtered));
    while next.history.len() > k {
        next.history.pop_front();
    }
    let take = next.history.len().min(BEZIER_HISTORY);
    let ctrl: Vec<Point2> = next.history.iter().skip(next.history.len() - take).map(|&(_, p)| p).collect();
    let p = de_casteljau(&ctrl, next.bezier_param);
    next.pos = next.bounds.clamp(p);
    next
}

fn de_casteljau(ctrl: &[Point2], u: f64) -> Point2 {
    let mut pts = ctrl.to_vec();
    for level in (1..pts.len()).rev() {
        for i in 0..level {
            pts[i] = pts[i].lerp(pts[i + 1], u);
        }
    }
    pts[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn display() -> Rect {
        Rect::new(0.0, 0.0, 1920.0, 1080.0)
    }

    fn with_history(points: &[(f64, f64)]) -> CursorState {
        let mut c = CursorState::new(display());
        for (i, &(x, y)) in points.iter().enumerate() {
            c.history.push_back((i as f64, Point2::new(x, y)));
        }
        c
    }

    #[test]
    fn median_constant() {
        let w = [Point2::new(10.0, 10.0); 5];
        assert_eq!(median_filter(&w).unwrap(), Point2::new(10.0, 10.0));
    }

    #[test]
    fn median_rejects_outlier() {
        let w: Vec<Point2> = [(1.0, 1.0), (2.0, 2.0), (100.0, 100.0), (3.0, 3.0), (4.0, 4.0)]
            .iter()
            .map(|&p| p.into())
            .collect();
        assert_eq!(median_filter(&w).unwrap(), Point2::new(3.0, 3.0));
    }

    #[test]
    fn median_singleton_and_empty() {
        assert_eq!(median_filter(&[Point2::new(5.0, 9.0)]).unwrap(), Point2::new(5.0, 9.0));
        assert_eq!(median_filter(&[]), Err(GazeError::NoSamples));
        assert_eq!(median_filter(&[Point2::new(f64::NAN, 0.0)]), Err(GazeError::NonFinite));
    }

    #[test]
    fn cursor_fixed_point() {
        let c = with_history(&[(100.0, 100.0); 4]);
        let n = smooth_cursor(&c, Point2::new(100.0, 100.0), 10.0);
        assert_eq!(n.pos, Point2::new(100.0, 100.0));
        assert_eq!(n.history.len(), 4);
    }

    #[test]
    fn cursor_pass_through_on_empty_history() {
        let c = CursorState::new(display());
        let n = smooth_cursor(&c, Point2::new(50.0, 60.0), 0.0);
        assert_eq!(n.pos, Point2::new(50.0, 60.0));
    }

    // Bernstein-form evaluation, independent of the de Casteljau recursion.
    fn bernstein_cubic(p: [f64; 4], u: f64) -> f64 {
        let v = 1.0 - u;
        v * v * v * p[0] + 3.0 * u * v * v * p[1] + 3.0 * u * u * v * p[2] + u * u * u * p[3]
    }

    #[test]
    fn cursor_collinear_history() {
        let c = with_history(&[(0.0, 0.0), (10.0, 0.0), (20.0, 0.0)]);
        let n = smooth_cursor(&c, Point2::new(30.0, 0.0), 3.0);
        let want = bernstein_cubic([0.0, 10.0, 20.0, 30.0], DEFAULT_BEZIER_PARAM);
        assert!((n.pos.x - want).abs() < 1e-12);
        assert_eq!(n.pos.y, 0.0);
        assert!((20.0..=40.0).contains(&n.pos.x));

        let full = with_history(&[(0.0, 0.0), (10.0, 0.0), (20.0, 0.0), (30.0, 0.0)]);
        let n = smooth_cursor(&full, Point2::new(40.0, 0.0), 4.0);
        assert!((n.pos.x - bernstein_cubic([10.0, 20.0, 30.0, 40.0], DEFAULT_BEZIER_PARAM)).abs() < 1e-12);
        assert!((20.0..=40.0).contains(&n.pos.x));
    }

    #[test]
    fn cursor_clamped_to_display() {
        let c = CursorState::new(display());
        let n = smooth_cursor(&c, Point2::new(-40.0, 5000.0), 0.0);
        assert_eq!(n.pos, Point2::new(0.0, 1080.0));
    }

    #[test]
    fn non_finite_input_is_ignored() {
        let c = with_history(&[(1.0, 2.0)]);
        let n = smooth_cursor(&c, Point2::new(f64::NAN, 0.0), 1.0);
        assert_eq!(n, c);
    }
}
