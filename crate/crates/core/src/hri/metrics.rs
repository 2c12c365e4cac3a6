use serde::{Deserialize, Serialize};

use super::{EventKind, SessionLog};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    /// Per completed task: time from its latest highlight to `task_done`.
    pub completion_ms: Vec<f64>,
    pub jog_count: usize,
    pub direction_changes: usize,
    pub timeouts: usize,
    pub response_ms: Vec<f64>,
    pub response_median_ms: f64,
    pub response_mean_ms: f64,
    /// Sample standard deviation; zero for fewer than two responses.
    pub response_stdev_ms: f64,
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

pub fn session_metrics(log: &SessionLog) -> SessionSummary {
    let mut out = SessionSummary::default();
    let mut task_start = None;
    let mut last_dir: Option<String> = None;
    for e in log.events() {
        match e.kind {
            EventKind::Highlight => task_start = Some(e.t_ms),
            EventKind::TaskDone => {
                if let Some(t0) = task_start.take() {
                    out.completion_ms.push(e.t_ms - t0);
                }
            }
            EventKind::Jog => {
                out.jog_count += 1;
                let dir = e.payload.get("direction").and_then(|d| d.as_str()).map(str::to_owned);
                if last_dir.is_some() && dir != last_dir {
                    out.direction_changes += 1;
                }
                last_dir = dir;
            }
            EventKind::Timeout => out.timeouts += 1,
            EventKind::Select => {
                if let Some(r) = e.payload.get("response_ms").and_then(|v| v.as_f64()) {
                    out.response_ms.push(r);
                }
            }
            _ => {}
        }
    }
    let n = out.response_ms.len();
    if n > 0 {
        out.response_median_ms = median(&out.response_ms);
        out.response_mean_ms = out.response_ms.iter().sum::<f64>() / n as f64;
    }
    if n > 1 {
        let m = out.response_mean_ms;
        out.response_stdev_ms = (out.response_ms.iter().map(|r| (r - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    }
    out
}
