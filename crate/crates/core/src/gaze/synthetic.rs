//! Seeded synthetic gaze streams standing in for a live tracker.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{GazeSample, GazeVector};
use crate::geom::Point2;

/// Where the viewer's eyes sit relative to the display.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewingGeometry {
    pub display_px: (f64, f64),
    pub display_cm: (f64, f64),
    pub distance_cm: f64,
    pub eye_separation_cm: f64,
}

impl Default for ViewingGeometry {
    /// A 14.5" 1920×1080 panel viewed from 60 cm.
    fn default() -> Self {
        Self { display_px: (1920.0, 1080.0), display_cm: (32.1, 18.05), distance_cm: 60.0, eye_separation_cm: 6.3 }
    }
}

impl ViewingGeometry {
    fn to_cm(&self, p: Point2) -> (f64, f64) {
        let sx = self.display_cm.0 / self.display_px.0;
        let sy = self.display_cm.1 / self.display_px.1;
        ((p.x - 0.5 * self.display_px.0) * sx, (p.y - 0.5 * self.display_px.1) * sy)
    }

    /// Unit gaze directions of both eyes fixating display point `p`.
    pub fn gaze_vector(&self, p: Point2) -> GazeVector {
        let (x, y) = self.to_cm(p);
        let half = 0.5 * self.eye_separation_cm;
        let dir = |ex: f64| {
            let v = [x - ex, y, -self.distance_cm];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        };
        GazeVector::from_eyes(dir(-half), dir(half))
    }

    /// Gaze vector with independent angular noise (degrees, per component) on each eye.
    pub fn noisy_gaze_vector<R: Rng>(&self, p: Point2, sigma_deg: f64, rng: &mut R) -> GazeVector {
        let clean = self.gaze_vector(p);
        if sigma_deg <= 0.0 {
            return clean;
        }
        let normal = Normal::new(0.0, sigma_deg.to_radians()).expect("finite sigma");
        let mut g = clean.0;
        for v in &mut g {
            *v += normal.sample(rng);
        }
        GazeVector(g).normalized()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamConfig {
    pub rate_hz: f64,
    /// Gaussian fixation jitter on the screen point, pixels.
    pub jitter_px: f64,
    /// Probability that a sample is flagged invalid (blink, tracking loss).
    pub dropout_prob: f64,
    /// Probability of a wild screen point anywhere on the display.
    pub outlier_prob: f64,
    pub gaze_noise_deg: f64,
}

impl Default for StreamConfig {
    fn default() -> Self {
        Self { rate_hz: 60.0, jitter_px: 12.0, dropout_prob: 0.01, outlier_prob: 0.005, gaze_noise_deg: 0.5 }
    }
}

impl StreamConfig {
    pub fn clean() -> Self {
        Self { jitter_px: 0.0, dropout_prob: 0.0, outlier_prob: 0.0, gaze_noise_deg: 0.0, ..Self::default() }
    }

    pub fn period_ms(&self) -> f64 {
        1000.0 / self.rate_hz
    }
}

/// Generates samples of a viewer looking at a moving or fixed target.
#[derive(Debug, Clone)]
pub struct SyntheticGaze {
    pub view: ViewingGeometry,
    pub cfg: StreamConfig,
    rng: ChaCha8Rng,
}

impl SyntheticGaze {
    pub fn new(view: ViewingGeometry, cfg: StreamConfig, seed: u64) -> Self {
        Self { view, cfg, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// One sample of a viewer looking at `target` at time `t_ms`.
    pub fn sample(&mut self, t_ms: f64, target: Point2) -> GazeSample {
        if self.cfg.dropout_prob > 0.0 && self.rng.gen_bool(self.cfg.dropout_prob) {
            return GazeSample::invalid(t_ms);
        }
        let (w, h) = self.view.display_px;
        let screen = if self.cfg.outlier_prob > 0.0 && self.rng.gen_bool(self.cfg.outlier_prob) {
            Point2::new(self.rng.gen_range(0.0..w), self.rng.gen_range(0.0..h))
        } else if self.cfg.jitter_px > 0.0 {
            let n = Normal::new(0.0, self.cfg.jitter_px).expect("finite jitter");
            Point2::new(target.x + n.sample(&mut self.rng), target.y + n.sample(&mut self.rng))
        } else {
            target
        };
        let gaze = self.view.noisy_gaze_vector(target, self.cfg.gaze_noise_deg, &mut self.rng);
        GazeSample { t_ms, screen_pt: Some(screen), gaze_vec: Some(gaze), valid: true }
    }

    /// Samples at the configured rate over `[0, duration_ms)` following `target_at`.
    pub fn follow(&mut self, duration_ms: f64, mut target_at: impl FnMut(f64) -> Point2) -> Vec<GazeSample> {
        let period = self.cfg.period_ms();
        let n = (duration_ms / period).ceil() as usize;
        (0..n)
            .map(|i| {
                let t = i as f64 * period;
                let p = target_at(t);
                self.sample(t, p)
            })
            .collect()
    }
}
