use serde::{Deserialize, Serialize};

/// Largest angle traversed before a pause.
pub const MAX_SEGMENT_DEG: f64 = 30.0;

/// Pause between split segments when none is configured.
pub const DEFAULT_DELAY_MS: f64 = 200.0;

/// Servo channels, numbered as on the controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointId {
    Base,
    /// Drives `beta`, the upper link.
    Shoulder,
    /// Drives `alpha`, the fore link.
    Elbow,
    Gripper,
}

impl JointId {
    pub const ALL: [JointId; 4] = [JointId::Base, JointId::Shoulder, JointId::Elbow, JointId::Gripper];

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(i: u8) -> Option<JointId> {
        Self::ALL.get(i as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            JointId::Base => "base",
            JointId::Shoulder => "shoulder",
            JointId::Elbow => "elbow",
            JointId::Gripper => "gripper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionSegment {
    pub joint: JointId,
    #[serde(rename = "start")]
    pub start_deg: f64,
    #[serde(rename = "end")]
    pub end_deg: f64,
    pub delay_after_ms: f64,
}

impl MotionSegment {
    pub fn span(&self) -> f64 {
        (self.end_deg - self.start_deg).abs()
    }
}

/// Number of motions a move of `span_deg` is split into: under 30° one,
/// 30° to 60° inclusive two, beyond 60° three.
pub fn segment_count(span_deg: f64) -> usize {
    let d = span_deg.abs();
    if d < MAX_SEGMENT_DEG {
        1
    } else if d <= 2.0 * MAX_SEGMENT_DEG {
        2
    } else {
        3
    }
}

/// Split a joint move into equal motions separated by `delay_ms` pauses.
pub fn plan_joint_motion(joint: JointId, from_deg: f64, to_deg: f64, delay_ms: f64) -> Vec<MotionSegment> {
    let n = segment_count(to_deg - from_deg);
    let at = |i: usize| if i == n { to_deg } else { from_deg + (to_deg - from_deg) * i as f64 / n as f64 };
    (0..n)
        .map(|i| MotionSegment {
            joint,
            start_deg: at(i),
            end_deg: at(i + 1),
            delay_after_ms: if i + 1 < n { delay_ms } else { 0.0 },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_move_single_segment() {
        let p = plan_joint_motion(JointId::Base, 0.0, 25.0, 200.0);
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].start_deg, p[0].end_deg, p[0].delay_after_ms), (0.0, 25.0, 0.0));
    }

    #[test]
    fn medium_move_two_segments() {
        let p = plan_joint_motion(JointId::Base, 0.0, 45.0, 200.0);
        assert_eq!(p.len(), 2);
        assert_eq!((p[0].start_deg, p[0].end_deg), (0.0, 22.5));
        assert_eq!((p[1].start_deg, p[1].end_deg), (22.5, 45.0));
        assert_eq!(p.iter().filter(|s| s.delay_after_ms > 0.0).count(), 1);
    }

    #[test]
    fn long_move_three_segments() {
        let p = plan_joint_motion(JointId::Elbow, 10.0, 85.0, 200.0);
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|s| (s.span() - 25.0).abs() < 1e-12));
        assert_eq!(p.iter().filter(|s| s.delay_after_ms > 0.0).count(), 2);
        assert_eq!(p[2].end_deg, 85.0);
    }

    #[test]
    fn boundaries() {
        assert_eq!(segment_count(29.999), 1);
        assert_eq!(segment_count(30.0), 2);
        assert_eq!(segment_count(60.0), 2);
        assert_eq!(segment_count(60.0001), 3);
        assert_eq!(segment_count(-45.0), 2);
    }

    #[test]
    fn downward_moves_and_json() {
        let p = plan_joint_motion(JointId::Shoulder, 90.0, 20.0, 150.0);
        assert_eq!(p.len(), 3);
        assert_eq!(p[0].start_deg, 90.0);
        assert_eq!(p[2].end_deg, 20.0);
        let json = serde_json::to_string(&p[0]).unwrap();
        assert!(json.contains("\"joint\":\"shoulder\"") && json.contains("\"start\":90.0") && json.contains("\"delay_after_ms\":150.0"));
    }

    #[test]
    fn joint_index_round_trip() {
        for j in JointId::ALL {
            assert_eq!(JointId::from_index(j.index()), Some(j));
        }
        assert_eq!(JointId::from_index(4), None);
    }
}
