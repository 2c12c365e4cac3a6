//! Geometry and vertical-motion kinematics of the desk arm.
//!
//! The arm is a base turntable carrying a two-link planar chain. `beta` drives
//! the upper link (length `a`) and `alpha` the fore link (length `b`); the link
//! angles measured from vertical are `phi = 180° - beta` and
//! `theta = 180° - alpha`. All interfaces use degrees.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// `|sin beta|` at or below this is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum ArmError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("singular configuration")]
    Singular,
    #[error("{joint} angle {angle_deg}° outside limits [{lo}°, {hi}°]")]
    OutOfLimits { joint: &'static str, angle_deg: f64, lo: f64, hi: f64 },
    #[error("geometry file: {0}")]
    Parse(String),
}

/// Inclusive angle range in degrees, serialised as `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Limit {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for Limit {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Self { lo, hi }
    }
}

impl From<Limit> for [f64; 2] {
    fn from(l: Limit) -> Self {
        [l.lo, l.hi]
    }
}

impl Limit {
    pub const SERVO: Limit = Limit { lo: 0.0, hi: 180.0 };

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointLimits {
    pub base: Limit,
    pub alpha: Limit,
    pub beta: Limit,
}

impl Default for JointLimits {
    fn default() -> Self {
        Self { base: Limit::SERVO, alpha: Limit::SERVO, beta: Limit::SERVO }
    }
}

/// Empirical law `alpha = c0 - c1 * beta`, active once `beta >= beta_on_deg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Handover {
    pub c0: f64,
    pub c1: f64,
    pub beta_on_deg: f64,
}

impl Default for Handover {
    fn default() -> Self {
        Self { c0: 184.275, c1: 0.438, beta_on_deg: 90.0 }
    }
}

/// Servo angles for the two gripper states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GripperAngles {
    pub open_deg: f64,
    pub closed_deg: f64,
}

impl Default for GripperAngles {
    fn default() -> Self {
        Self { open_deg: 90.0, closed_deg: 20.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmGeometry {
    /// Upper-link length.
    pub a_cm: f64,
    /// Fore-link length.
    pub b_cm: f64,
    pub base_height_cm: f64,
    #[serde(default)]
    pub limits: JointLimits,
    #[serde(default)]
    pub handover: Handover,
    #[serde(default)]
    pub gripper: GripperAngles,
}

impl Default for ArmGeometry {
    fn default() -> Self {
        Self {
            a_cm: 10.5,
            b_cm: 10.0,
            base_height_cm: 6.0,
            limits: JointLimits::default(),
            handover: Handover::default(),
            gripper: GripperAngles::default(),
        }
    }
}

impl ArmGeometry {
    pub fn new(a_cm: f64, b_cm: f64, base_height_cm: f64) -> Result<Self, ArmError> {
        let g = Self { a_cm, b_cm, base_height_cm, ..Self::default() };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ArmError> {
        if !(self.a_cm > 0.0 && self.b_cm > 0.0) || !self.a_cm.is_finite() || !self.b_cm.is_finite() {
            return Err(ArmError::InvalidGeometry("link lengths must be positive".into()));
        }
        if !self.base_height_cm.is_finite() {
            return Err(ArmError::InvalidGeometry("base height must be finite".into()));
        }
        for (name, l) in [("base", self.limits.base), ("alpha", self.limits.alpha), ("beta", self.limits.beta)] {
            if !(l.lo >= 0.0 && l.hi <= 180.0 && l.lo <= l.hi) {
                return Err(ArmError::InvalidGeometry(format!("{name} limits must lie within [0, 180]")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ArmError> {
        let g: Self = serde_json::from_str(text).map_err(|e| ArmError::Parse(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("geometry serialises")
    }

    pub fn max_reach(&self) -> f64 {
        self.a_cm + self.b_cm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gripper {
    #[default]
    Open,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    pub base_deg: f64,
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub gripper: Gripper,
}

impl JointState {
    pub fn new(base_deg: f64, alpha_deg: f64, beta_deg: f64) -> Self {
        Self { base_deg, alpha_deg, beta_deg, gripper: Gripper::Open }
    }

    pub fn phi_deg(&self) -> f64 {
        180.0 - self.beta_deg
    }

    pub fn theta_deg(&self) -> f64 {
        180.0 - self.alpha_deg
    }

    pub fn check_limits(&self, g: &ArmGeometry) -> Result<(), ArmError> {
        for (joint, angle_deg, l) in [
            ("base", self.base_deg, g.limits.base),
            ("alpha", self.alpha_deg, g.limits.alpha),
            ("beta", self.beta_deg, g.limits.beta),
        ] {
            if !l.contains(angle_deg) {
                return Err(ArmError::OutOfLimits { joint, angle_deg, lo: l.lo, hi: l.hi });
            }
        }
        Ok(())
    }
}

/// Tip position in the arm frame (cm) with its vertical reach component `d`
/// measured from the shoulder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipPose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub d: f64,
}

/// `d = a cos(phi) + b cos(theta)`.
pub fn tip_height(g: &ArmGeometry, alpha_deg: f64, beta_deg: f64) -> f64 {
    let phi = (180.0 - beta_deg).to_radians();
    let theta = (180.0 - alpha_deg).to_radians();
    g.a_cm * phi.cos() + g.b_cm * theta.cos()
}

/// Horizontal distance of the tip from the base axis, `a sin(phi) + b sin(theta)`.
pub fn planar_reach(g: &ArmGeometry, alpha_deg: f64, beta_deg: f64) -> f64 {
    let phi = (180.0 - beta_deg).to_radians();
    let theta = (180.0 - alpha_deg).to_radians();
    g.a_cm * phi.sin() + g.b_cm * theta.sin()
}

/// Change of `beta` that keeps the tip height fixed for a change `d_alpha_deg`
/// of `alpha`: `d_beta / d_alpha = -(b sin alpha) / (a sin beta)`.
pub fn constant_height_delta(g: &ArmGeometry, alpha_deg: f64, beta_deg: f64, d_alpha_deg: f64) -> Result<f64, ArmError> {
    let sin_beta = beta_deg.to_radians().sin();
    if sin_beta.abs() <= SINGULAR_TOL {
        return Err(ArmError::Singular);
    }
    let ratio = -(g.b_cm * alpha_deg.to_radians().sin()) / (g.a_cm * sin_beta);
    Ok(d_alpha_deg * ratio)
}

/// The `alpha` servo angle dictated by the handover law, clamped to limits.
pub fn handover_alpha(g: &ArmGeometry, beta_deg: f64) -> f64 {
    g.limits.alpha.clamp(g.handover.c0 - g.handover.c1 * beta_deg)
}

pub fn forward_tip(g: &ArmGeometry, s: &JointState) -> TipPose {
    let d = tip_height(g, s.alpha_deg, s.beta_deg);
    let r = planar_reach(g, s.alpha_deg, s.beta_deg);
    let base = s.base_deg.to_radians();
    TipPose { x: r * base.cos(), y: r * base.sin(), z: g.base_height_cm + d, d }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g10() -> ArmGeometry {
        ArmGeometry::new(10.0, 10.0, 6.0).unwrap()
    }

    #[test]
    fn height_examples() {
        let g = g10();
        assert!((tip_height(&g, 180.0, 180.0) - 20.0).abs() < 1e-12);
        assert!(tip_height(&g, 90.0, 90.0).abs() < 1e-12);
        let want = 10.0 * 30f64.to_radians().cos() + 10.0 * 60f64.to_radians().cos();
        assert!((tip_height(&g, 120.0, 150.0) - want).abs() < 1e-12);
        assert!((tip_height(&g, 120.0, 150.0) - 13.660).abs() < 5e-4);
    }

    #[test]
    fn delta_examples() {
        let g = g10();
        for a in [20.0, 45.0, 100.0, 150.0] {
            assert!((constant_height_delta(&g, a, a, 1.0).unwrap() + 1.0).abs() < 1e-12);
        }
        let g = ArmGeometry::new(10.0, 5.0, 0.0).unwrap();
        assert!((constant_height_delta(&g, 60.0, 120.0, 1.0).unwrap() + 0.5).abs() < 1e-12);
        assert_eq!(constant_height_delta(&g, 60.0, 180.0, 1.0), Err(ArmError::Singular));
        assert_eq!(constant_height_delta(&g, 60.0, 0.0, 1.0), Err(ArmError::Singular));
    }

    #[test]
    fn handover_examples() {
        let g = ArmGeometry::default();
        assert!((handover_alpha(&g, 90.0) - 144.855).abs() < 1e-9);
        assert!((handover_alpha(&g, 120.0) - 131.715).abs() < 1e-9);
        assert!((handover_alpha(&g, 100.0) - 140.475).abs() < 1e-9);
    }

    #[test]
    fn handover_clamps() {
        let mut g = ArmGeometry::default();
        g.limits.alpha = Limit { lo: 0.0, hi: 140.0 };
        assert_eq!(handover_alpha(&g, 90.0), 140.0);
    }

    #[test]
    fn forward_examples() {
        let g = g10();
        let up = forward_tip(&g, &JointState::new(37.0, 180.0, 180.0));
        assert!(up.x.abs() < 1e-12 && up.y.abs() < 1e-12);
        assert!((up.z - 26.0).abs() < 1e-12);

        let out = forward_tip(&g, &JointState::new(0.0, 90.0, 90.0));
        assert!((out.x - 20.0).abs() < 1e-12 && out.y.abs() < 1e-12 && (out.z - 6.0).abs() < 1e-12);

        let a = forward_tip(&g, &JointState::new(0.0, 120.0, 70.0));
        let b = forward_tip(&g, &JointState::new(90.0, 120.0, 70.0));
        assert!((a.x - b.y).abs() < 1e-12 && b.x.abs() < 1e-12 && (a.z - b.z).abs() < 1e-12);
    }

    #[test]
    fn geometry_validation_and_json() {
        assert!(ArmGeometry::new(0.0, 1.0, 0.0).is_err());
        let mut g = ArmGeometry::default();
        g.limits.beta = Limit { lo: -5.0, hi: 180.0 };
        assert!(g.validate().is_err());
        let g = ArmGeometry::default();
        assert_eq!(ArmGeometry::from_json(&g.to_json()).unwrap(), g);
        let minimal = r#"{"a_cm": 9, "b_cm": 8, "base_height_cm": 5,
            "limits": {"base": [0, 180], "alpha": [10, 170], "beta": [0, 180]},
            "handover": {"c0": 184.275, "c1": 0.438, "beta_on_deg": 90}}"#;
        let g = ArmGeometry::from_json(minimal).unwrap();
        assert_eq!(g.limits.alpha, Limit { lo: 10.0, hi: 170.0 });
        assert_eq!(g.gripper, GripperAngles::default());
    }

    #[test]
    fn limits_check() {
        let g = ArmGeometry::default();
        assert!(JointState::new(10.0, 90.0, 90.0).check_limits(&g).is_ok());
        assert!(matches!(JointState::new(10.0, 190.0, 90.0).check_limits(&g), Err(ArmError::OutOfLimits { joint: "alpha", .. })));
    }
}
