//! Differential stepping of the two vertical-plane joints toward a target
//! reach `r` and height `d`.

use super::PlanError;
use crate::arm::{constant_height_delta, handover_alpha, planar_reach, tip_height, ArmGeometry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    /// Largest per-joint change in one iteration, degrees.
    pub step_deg: f64,
    /// Convergence tolerance on both reach and height, cm.
    pub tol_cm: f64,
    pub max_iters: usize,
    /// Follow the handover law while `beta` is at or above its activation angle.
    pub use_handover: bool,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self { step_deg: 0.5, tol_cm: 1e-4, max_iters: 20_000, use_handover: true }
    }
}

const DEG: f64 = std::f64::consts::PI / 180.0;
const DAMPING: f64 = 1e-3;

/// Partial derivatives of (r, d) with respect to (alpha, beta), per degree.
fn jacobian(g: &ArmGeometry, alpha: f64, beta: f64) -> [[f64; 2]; 2] {
    let (sa, ca) = alpha.to_radians().sin_cos();
    let (sb, cb) = beta.to_radians().sin_cos();
    [[g.b_cm * ca * DEG, g.a_cm * cb * DEG], [g.b_cm * sa * DEG, g.a_cm * sb * DEG]]
}

fn cap(step: (f64, f64), max: f64) -> (f64, f64) {
    let m = step.0.abs().max(step.1.abs());
    if m > max {
        (step.0 * max / m, step.1 * max / m)
    } else {
        step
    }
}

/// Damped least-squares step for the full 2×2 problem.
fn dls_step(j: [[f64; 2]; 2], er: f64, ed: f64) -> (f64, f64) {
    // Δ = Jᵀ (J Jᵀ + λ² I)⁻¹ e
    let a = j[0][0] * j[0][0] + j[0][1] * j[0][1] + DAMPING * DAMPING;
    let b = j[0][0] * j[1][0] + j[0][1] * j[1][1];
    let d = j[1][0] * j[1][0] + j[1][1] * j[1][1] + DAMPING * DAMPING;
    let det = a * d - b * b;
    let y0 = (d * er - b * ed) / det;
    let y1 = (-b * er + a * ed) / det;
    (j[0][0] * y0 + j[1][0] * y1, j[0][1] * y0 + j[1][1] * y1)
}

/// Drive (alpha, beta) from a start pose to the configuration whose tip sits at
/// reach `target_r` and height `target_d`.
///
/// Once the height is on target the joints move along the constant-height
/// direction, changing only the reach. While `beta` is at or above the
/// handover angle, `alpha` follows the handover law and only `beta` is
/// stepped; the solver leaves that regime for good once `beta` drops below it.
pub fn solve_arm_pose(
    g: &ArmGeometry,
    start_alpha: f64,
    start_beta: f64,
    target_r: f64,
    target_d: f64,
    cfg: &StepConfig,
) -> Result<(f64, f64), PlanError> {
    if !(target_r.is_finite() && target_d.is_finite() && start_alpha.is_finite() && start_beta.is_finite()) {
        return Err(PlanError::NonFinite);
    }
    if target_r.hypot(target_d) > g.max_reach() {
        return Err(PlanError::OutOfReach);
    }
    let lim = g.limits;
    let beta_on = g.handover.beta_on_deg;
    let mut alpha = lim.alpha.clamp(start_alpha);
    let mut beta = lim.beta.clamp(start_beta);
    let mut handover = cfg.use_handover && beta >= beta_on;
    if handover {
        alpha = handover_alpha(g, beta);
    }

    for _ in 0..cfg.max_iters {
        let er = target_r - planar_reach(g, alpha, beta);
        let ed = target_d - tip_height(g, alpha, beta);
        if er.abs() <= cfg.tol_cm && ed.abs() <= cfg.tol_cm {
            return Ok((alpha, beta));
        }
        let j = jacobian(g, alpha, beta);

        if handover {
            // alpha = c0 - c1 beta, so d/dbeta picks up -c1 times the alpha column.
            let c1 = g.handover.c1;
            let jr = j[0][1] - c1 * j[0][0];
            let jd = j[1][1] - c1 * j[1][0];
            let norm = jr * jr + jd * jd;
            let db = if norm > 0.0 { (jr * er + jd * ed) / norm } else { 0.0 };
            let db = db.clamp(-cfg.step_deg, cfg.step_deg);
            let nb = lim.beta.clamp(beta + db);
            if (nb - beta).abs() < 1e-12 {
                return Err(PlanError::OutOfReach);
            }
            beta = nb;
            if beta < beta_on {
                handover = false;
            } else {
                alpha = handover_alpha(g, beta);
            }
            continue;
        }

        let mut step = None;
        if ed.abs() <= cfg.tol_cm {
            if let Ok(ratio) = constant_height_delta(g, alpha, beta, 1.0) {
                let dr = j[0][0] + j[0][1] * ratio;
                if dr.abs() > 1e-9 {
                    let da = er / dr;
                    step = Some(cap((da, da * ratio), cfg.step_deg));
                }
            }
        }
        let (da, db) = step.unwrap_or_else(|| cap(dls_step(j, er, ed), cfg.step_deg));

        let beta_hi = if cfg.use_handover { lim.beta.hi.min(beta_on - 1e-9) } else { lim.beta.hi };
        let na = lim.alpha.clamp(alpha + da);
        let nb = (beta + db).clamp(lim.beta.lo, beta_hi);
        if (na - alpha).abs() < 1e-13 && (nb - beta).abs() < 1e-13 {
            return Err(PlanError::OutOfReach);
        }
        alpha = na;
        beta = nb;
    }
    Err(PlanError::OutOfReach)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(g: &ArmGeometry, a: f64, b: f64, r: f64, d: f64) {
        assert!((planar_reach(g, a, b) - r).abs() <= 1e-4, "reach {} vs {r}", planar_reach(g, a, b));
        assert!((tip_height(g, a, b) - d).abs() <= 1e-4);
        assert!(g.limits.alpha.contains(a) && g.limits.beta.contains(b));
    }

    #[test]
    fn reaches_points_on_the_sheet_plane() {
        let g = ArmGeometry::default();
        for r in [4.0, 8.0, 12.0, 16.0, 19.5] {
            let (a, b) = solve_arm_pose(&g, 120.0, 60.0, r, 0.0, &StepConfig::default()).unwrap();
            check(&g, a, b, r, 0.0);
        }
    }

    #[test]
    fn already_there_is_a_no_op() {
        let g = ArmGeometry::default();
        let (r, d) = (planar_reach(&g, 110.0, 50.0), tip_height(&g, 110.0, 50.0));
        assert_eq!(solve_arm_pose(&g, 110.0, 50.0, r, d, &StepConfig::default()).unwrap(), (110.0, 50.0));
    }

    #[test]
    fn rejects_beyond_reach() {
        let g = ArmGeometry::default();
        assert_eq!(solve_arm_pose(&g, 120.0, 60.0, g.max_reach() + 1.0, 0.0, &StepConfig::default()), Err(PlanError::OutOfReach));
    }

    #[test]
    fn follows_the_handover_curve() {
        let g = ArmGeometry::default();
        let target_beta: f64 = 100.0;
        let ta = handover_alpha(&g, target_beta);
        let (r, d) = (planar_reach(&g, ta, target_beta), tip_height(&g, ta, target_beta));
        let start_beta = 130.0;
        let (a, b) = solve_arm_pose(&g, handover_alpha(&g, start_beta), start_beta, r, d, &StepConfig::default()).unwrap();
        check(&g, a, b, r, d);
        assert!((a - handover_alpha(&g, b)).abs() < 1e-9);
        assert!((b - target_beta).abs() < 0.01);
    }

    #[test]
    fn leaves_handover_for_targets_off_the_curve() {
        let g = ArmGeometry::default();
        let (a, b) = solve_arm_pose(&g, handover_alpha(&g, 120.0), 120.0, 12.0, 0.0, &StepConfig::default()).unwrap();
        check(&g, a, b, 12.0, 0.0);
        assert!(b < g.handover.beta_on_deg);
    }
}
