use super::GazeError;
use crate::geom::Point2;

/// Six landmarks per eye in the usual p1..p6 order (p1 and p4 are the
/// horizontal corners, p2/p3 the upper lid, p6/p5 the lower lid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeLandmarks {
    pub left: [Point2; 6],
    pub right: [Point2; 6],
    /// Distance between the two eye centers.
    pub inter_eye_dist: f64,
}

impl EyeLandmarks {
    /// Builds landmarks with `inter_eye_dist` measured between the landmark centroids.
    pub fn from_points(left: [Point2; 6], right: [Point2; 6]) -> Self {
        let inter_eye_dist = centroid(&left).distance(centroid(&right));
        Self { left, right, inter_eye_dist }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let sc = |e: [Point2; 6]| e.map(|p| Point2::new(p.x * s, p.y * s));
        Self { left: sc(self.left), right: sc(self.right), inter_eye_dist: self.inter_eye_dist * s }
    }
}

fn centroid(eye: &[Point2; 6]) -> Point2 {
    let (sx, sy) = eye.iter().fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
    Point2::new(sx / 6.0, sy / 6.0)
}

fn lid_opening(eye: &[Point2; 6]) -> f64 {
    eye[1].distance(eye[5]) + eye[2].distance(eye[4])
}

/// Classic eye aspect ratio of one eye: lid opening over twice the corner distance.
pub fn eye_aspect_ratio(eye: &[Point2; 6]) -> Result<f64, GazeError> {
    let width = eye[0].distance(eye[3]);
    if !(width > 0.0) {
        return Err(GazeError::DegenerateLandmarks);
    }
    Ok(lid_opening(eye) / (2.0 * width))
}

/// Eye aspect ratio normalised by the inter-eye distance instead of the eye
/// width, averaged over both eyes.
pub fn modified_ear(lm: &EyeLandmarks) -> Result<f64, GazeError> {
    if !(lm.inter_eye_dist > 0.0) || !lm.inter_eye_dist.is_finite() {
        return Err(GazeError::DegenerateLandmarks);
    }
    let denom = 2.0 * lm.inter_eye_dist;
    Ok(0.5 * (lid_opening(&lm.left) + lid_opening(&lm.right)) / denom)
}
