use serde::{Deserialize, Serialize};

use super::GazeError;
use crate::geom::Point2;

const UNIT_TOL: f64 = 1e-3;

/// Concatenated left/right eye gaze directions `[lx, ly, lz, rx, ry, rz]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeVector(pub [f64; 6]);

impl GazeVector {
    pub fn from_eyes(left: [f64; 3], right: [f64; 3]) -> Self {
        Self([left[0], left[1], left[2], right[0], right[1], right[2]])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    fn half_norm(&self, half: usize) -> f64 {
        let h = &self.0[3 * half..3 * half + 3];
        (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt()
    }

    /// Checks both halves are unit length within 1e-3.
    pub fn validate(&self) -> Result<(), GazeError> {
        if !self.is_finite() {
            return Err(GazeError::NonFinite);
        }
        for half in 0..2 {
            let norm = self.half_norm(half);
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(GazeError::NotUnit { half, norm });
            }
        }
        Ok(())
    }

    /// Rescale each eye's direction to unit length. Zero halves are left untouched.
    pub fn normalized(&self) -> Self {
        let mut out = self.0;
        for half in 0..2 {
            let norm = self.half_norm(half);
            if norm > 0.0 {
                for v in &mut out[3 * half..3 * half + 3] {
                    *v /= norm;
                }
            }
        }
        Self(out)
    }
}

/// One timestamped gaze observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    /// Milliseconds since session start.
    pub t_ms: f64,
    pub screen_pt: Option<Point2>,
    pub gaze_vec: Option<GazeVector>,
    pub valid: bool,
}

impl GazeSample {
    pub fn screen(t_ms: f64, p: Point2) -> Self {
        Self { t_ms, screen_pt: Some(p), gaze_vec: None, valid: true }
    }

    pub fn invalid(t_ms: f64) -> Self {
        Self { t_ms, screen_pt: None, gaze_vec: None, valid: false }
    }

    pub fn validate(&self) -> Result<(), GazeError> {
        if !self.t_ms.is_finite() {
            return Err(GazeError::NonFinite);
        }
        if !self.valid {
            return Ok(());
        }
        if self.screen_pt.is_none() && self.gaze_vec.is_none() {
            return Err(GazeError::EmptySample { t_ms: self.t_ms });
        }
        if let Some(p) = self.screen_pt {
            if !p.is_finite() {
                return Err(GazeError::NonFinite);
            }
        }
        if let Some(g) = &self.gaze_vec {
            g.validate()?;
        }
        Ok(())
    }
}

/// Checks per-sample invariants and strictly increasing timestamps.
pub fn validate_stream(samples: &[GazeSample]) -> Result<(), GazeError> {
    let mut last: Option<f64> = None;
    for s in samples {
        s.validate()?;
        if let Some(prev) = last {
            if s.t_ms <= prev {
                return Err(GazeError::NonMonotonic { t_ms: s.t_ms });
            }
        }
        last = Some(s.t_ms);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_check_flags_long_half() {
        let g = GazeVector([0.0, 0.0, -1.0, 0.0, 0.0, -1.1]);
        assert!(matches!(g.validate(), Err(GazeError::NotUnit { half: 1, .. })));
        assert!(g.normalized().validate().is_ok());
    }

    #[test]
    fn stream_rejects_repeated_timestamp() {
        let p = Point2::new(1.0, 1.0);
        let s = [GazeSample::screen(0.0, p), GazeSample::screen(0.0, p)];
        assert_eq!(validate_stream(&s), Err(GazeError::NonMonotonic { t_ms: 0.0 }));
    }

    #[test]
    fn valid_sample_needs_a_channel() {
        let s = GazeSample { t_ms: 5.0, screen_pt: None, gaze_vec: None, valid: true };
        assert!(s.validate().is_err());
        assert!(GazeSample::invalid(5.0).validate().is_ok());
    }
}
