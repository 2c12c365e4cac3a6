//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use gazearm_core::arm::{constant_height_delta, handover_alpha, tip_height, ArmGeometry};
use gazearm_core::classifier::synthetic::{cluster_set, ClusterConfig};
use gazearm_core::classifier::{loss_and_gradient, train, TrainConfig, INPUT_DIM};
use gazearm_core::gaze::{update_dwell, DwellState, Region};
use gazearm_core::geom::{Point2, Rect};
use gazearm_core::hri::{
    run_pointing, run_reachability, session_metrics, EventKind, LatencySelector, PointingRecord, PointingRunConfig, PointingTask,
    ReachabilityConfig,
};
use gazearm_core::mapping::{fit_mapping, grid_points, map_point, AffineMap, CorrespondencePair};
use gazearm_core::planner::{plan_joint_motion, JointId};
use gazearm_core::runtime::{decode_ack, decode_frame, encode_ack, encode_frame, Ack};
use gazearm_core::ScreenGrid;

const KIN_REL_TOL: f64 = 1e-6;
const KIN_TIME_LIMIT: Duration = Duration::from_secs(1);
const HANDOVER_TOL: f64 = 1e-9;
const SPAN_SUM_TOL: f64 = 1e-12;
const MAP_R2_MIN: f64 = 0.99;
const MAP_RMSE_MAX_CM: f64 = 1.0;
const MAP_TRIALS: u64 = 100;
const MAP_PASS_MIN: usize = 99;
const CLS_SEEDS: u64 = 100;
const CLS_PASS_MIN: usize = 95;
const CLS_GRAD_REL_TOL: f64 = 1e-4;
const DWELL_STREAMS: u64 = 10_000;
const DWELL_MS: f64 = 500.0;
const POINTING_PERIOD_MS: f64 = 1000.0 / 60.0;
const REACH_RUNS: u64 = 50;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn kinematics() -> Outcome {
    let g = ArmGeometry::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let h = 1e-4;
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 1000 {
        let alpha: f64 = rng.gen_range(0.0..180.0);
        let beta: f64 = rng.gen_range(0.0..180.0);
        // stay clear of the singular pose and of a vanishing numerator
        if beta.to_radians().sin().abs() < 0.05 || alpha.to_radians().sin().abs() < 0.05 {
            continue;
        }
        let dd_da = (tip_height(&g, alpha + h, beta) - tip_height(&g, alpha - h, beta)) / (2.0 * h);
        let dd_db = (tip_height(&g, alpha, beta + h) - tip_height(&g, alpha, beta - h)) / (2.0 * h);
        let numeric = -dd_da / dd_db;
        let analytic = constant_height_delta(&g, alpha, beta, 1.0).expect("non-singular");
        worst = worst.max((analytic - numeric).abs() / numeric.abs());
        n += 1;
    }
    let elapsed = start.elapsed();
    outcome(worst <= KIN_REL_TOL && elapsed < KIN_TIME_LIMIT, format!("max rel err {worst:.2e} over {n} poses in {elapsed:?}"))
}

fn handover() -> Outcome {
    let g = ArmGeometry::default();
    let a90 = handover_alpha(&g, 90.0);
    let a120 = handover_alpha(&g, 120.0);
    let ok = (a90 - 144.855).abs() <= HANDOVER_TOL && (a120 - 131.715).abs() <= HANDOVER_TOL;
    outcome(ok, format!("alpha(90)={a90}, alpha(120)={a120}"))
}

fn brute_segments(d: f64) -> usize {
    if d < 30.0 {
        1
    } else if d <= 60.0 {
        2
    } else {
        3
    }
}

fn motion_split() -> Outcome {
    let mut bad = Vec::new();
    for i in 0..=1800 {
        let d = i as f64 / 10.0;
        for (from, to) in [(0.0, d), (180.0, 180.0 - d)] {
            let segs = plan_joint_motion(JointId::Base, from, to, 200.0);
            let sum: f64 = segs.iter().map(|s| s.end_deg - s.start_deg).sum();
            let contiguous = segs.windows(2).all(|w| w[0].end_deg == w[1].start_deg);
            let ends = segs[0].start_deg == from && segs.last().unwrap().end_deg == to;
            if segs.len() != brute_segments(d) || (sum - (to - from)).abs() > SPAN_SUM_TOL || !contiguous || !ends {
                bad.push(d);
            }
        }
    }
    outcome(bad.is_empty(), format!("1801 spans x 2 directions, {} mismatches {:?}", bad.len(), &bad[..bad.len().min(5)]))
}

fn mapping_quality() -> Outcome {
    let display = grid_points(1920.0, 1080.0, 0.1);
    let noise = Normal::new(0.0, 0.2).unwrap();
    let mut passed = 0;
    let mut worst = (1.0f64, 0.0f64);
    for seed in 0..MAP_TRIALS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // ground truth: the calibration grid spans 20 cm horizontally, with a
        // random rotation, slight anisotropy and offset
        let span_px = 0.8 * 1920.0;
        let s = 20.0 / span_px;
        let th: f64 = rng.gen_range(-0.3..0.3);
        let k: f64 = rng.gen_range(0.9..1.1);
        let truth = AffineMap::from_parts(
            [[s * th.cos(), -s * k * th.sin()], [s * th.sin(), -s * k * th.cos()]],
            [rng.gen_range(-15.0..-5.0), rng.gen_range(15.0..20.0)],
        );
        let pairs: Vec<_> = display
            .iter()
            .map(|&p| {
                let q = map_point(&truth, p);
                CorrespondencePair::new(p, Point2::new(q.x + noise.sample(&mut rng), q.y + noise.sample(&mut rng)))
            })
            .collect();
        let fit = fit_mapping(&pairs).expect("well-posed grid");
        worst = (worst.0.min(fit.r_squared), worst.1.max(fit.rmse_cm));
        if fit.r_squared >= MAP_R2_MIN && fit.rmse_cm < MAP_RMSE_MAX_CM {
            passed += 1;
        }
    }
    outcome(passed >= MAP_PASS_MIN, format!("{passed}/{MAP_TRIALS} trials, min R2 {:.4}, max RMSE {:.3} cm", worst.0, worst.1))
}

fn gradient_check() -> f64 {
    let set = cluster_set(&ClusterConfig { per_class: 8, ..Default::default() }, 11);
    let model = train(&set, &TrainConfig { epoch_cap: 1, stop_on_target: false, ..Default::default() }).unwrap().model;
    let xs: Vec<[f64; INPUT_DIM]> = set.examples.iter().map(|e| e.gaze.0).collect();
    let ys: Vec<usize> = set.examples.iter().map(|e| e.label).collect();
    let (_, grad) = loss_and_gradient(&model, &xs, &ys);
    let n = model.param_count();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    while checked < 10 {
        let i = rng.gen_range(0..n);
        let g = grad.get(i);
        if g.abs() < 1e-6 {
            continue;
        }
        let mut m = model.clone();
        m.set_param(i, model.param(i) + h);
        let up = loss_and_gradient(&m, &xs, &ys).0;
        m.set_param(i, model.param(i) - h);
        let down = loss_and_gradient(&m, &xs, &ys).0;
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((fd - g).abs() / fd.abs().max(g.abs()));
        checked += 1;
    }
    worst
}

fn classifier() -> Outcome {
    let mut converged = 0;
    let mut max_epochs = 0;
    for seed in 0..CLS_SEEDS {
        let set = cluster_set(&ClusterConfig::default(), seed);
        let out = train(&set, &TrainConfig { seed, ..Default::default() }).expect("valid set");
        if out.model.metrics.converged && out.model.metrics.epochs_run <= 200 {
            converged += 1;
        }
        max_epochs = max_epochs.max(out.model.metrics.epochs_run);
    }
    let grad = gradient_check();
    outcome(
        converged >= CLS_PASS_MIN && grad <= CLS_GRAD_REL_TOL,
        format!("{converged}/{CLS_SEEDS} seeds reach 0.90 test accuracy (max {max_epochs} epochs); gradient rel err {grad:.2e}"),
    )
}

/// Events an ideal dwell detector emits: for each maximal run of consecutive
/// samples inside one region, the first sample at least `DWELL_MS` after the run began.
fn dwell_oracle(samples: &[(f64, Point2)], regions: &[Region]) -> Vec<(String, f64)> {
    let label = |p: Point2| regions.iter().position(|r| r.rect.contains(p));
    let mut out = Vec::new();
    let mut i = 0;
    while i < samples.len() {
        let here = label(samples[i].1);
        let mut j = i;
        while j + 1 < samples.len() && label(samples[j + 1].1) == here {
            j += 1;
        }
        if let Some(r) = here {
            if let Some(k) = (i..=j).find(|&k| samples[k].0 - samples[i].0 >= DWELL_MS) {
                out.push((regions[r].id.clone(), samples[k].0));
            }
        }
        i = j + 1;
    }
    out
}

fn dwell() -> Outcome {
    let regions = vec![
        Region::new("a", Rect::new(0.0, 0.0, 100.0, 100.0)),
        Region::new("b", Rect::new(100.0, 0.0, 100.0, 100.0)),
        Region::new("c", Rect::new(0.0, 150.0, 200.0, 50.0)),
    ];
    let mut mismatches = 0;
    let mut events = 0;
    for seed in 0..DWELL_STREAMS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..400);
        let mut t = rng.gen_range(0.0..1000.0);
        let mut p = Point2::new(rng.gen_range(0.0..220.0), rng.gen_range(0.0..220.0));
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            t += rng.gen_range(1.0..40.0);
            // mostly hold still, sometimes wander or jump
            match rng.gen_range(0..10) {
                0 => p = Point2::new(rng.gen_range(0.0..220.0), rng.gen_range(0.0..220.0)),
                1..=3 => p = Point2::new(p.x + rng.gen_range(-15.0..15.0), p.y + rng.gen_range(-15.0..15.0)),
                _ => {}
            }
            samples.push((t, p));
        }
        let mut st = DwellState::new(DWELL_MS);
        let mut got = Vec::new();
        for &(t, p) in &samples {
            let (next, ev) = update_dwell(&st, p, &regions, t);
            st = next;
            got.extend(ev.map(|e| (e.region, e.t_ms)));
        }
        let want = dwell_oracle(&samples, &regions);
        events += want.len();
        if got != want {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{DWELL_STREAMS} streams, {events} oracle events, {mismatches} mismatching streams"))
}

fn pointing() -> Outcome {
    let grid = ScreenGrid::new(1920.0, 1080.0);
    let cfg = PointingRunConfig { trials: 30, period_ms: POINTING_PERIOD_MS, max_ms: f64::INFINITY };
    let mut notes = Vec::new();
    let mut ok = true;
    for latency in [1000.0, 3000.0, 9000.0] {
        let run = run_pointing(PointingTask::new(grid, 7, 0.0), &mut LatencySelector { latency_ms: latency }, &cfg).unwrap();
        let rts = session_metrics(&run.log).response_ms;
        let good = rts.len() == cfg.trials && rts.iter().all(|r| (r - latency).abs() <= POINTING_PERIOD_MS);
        ok &= good;
        let worst = rts.iter().map(|r| (r - latency).abs()).fold(0.0, f64::max);
        notes.push(format!("L={}s: {} hits, max dev {worst:.2} ms", latency / 1000.0, rts.len()));
    }
    let run = run_pointing(PointingTask::new(grid, 8, 0.0), &mut LatencySelector { latency_ms: 11_000.0 }, &cfg).unwrap();
    let mut highlight = 0.0;
    let mut all_timeouts = run.records.len() == cfg.trials;
    for r in &run.records {
        match r {
            PointingRecord::Timeout { t_ms, .. } => {
                all_timeouts &= (t_ms - highlight - 10_000.0).abs() < 1e-6;
                highlight = *t_ms;
            }
            _ => all_timeouts = false,
        }
    }
    ok &= all_timeouts && session_metrics(&run.log).timeouts == cfg.trials;
    notes.push(format!("L=11s: {} timeouts at 10 s", if all_timeouts { cfg.trials } else { 0 }));
    outcome(ok, notes.join("; "))
}

fn closed_loop() -> Outcome {
    let mut reached = 0;
    let mut logs_ok = 0;
    let mut times = Vec::new();
    let mut changes = Vec::new();
    for seed in 0..REACH_RUNS {
        let run = run_reachability(&ReachabilityConfig { seed, ..Default::default() }).expect("harness runs");
        let m = session_metrics(&run.log);
        if run.reached && run.final_pen.distance(run.task.target) <= run.task.done_radius_cm {
            reached += 1;
        }
        let logged_changes = run.log.of_kind(EventKind::DirectionChange).count();
        if m.completion_ms.len() == 1 && m.direction_changes == logged_changes {
            logs_ok += 1;
            times.push(m.completion_ms[0] / 1000.0);
            changes.push(m.direction_changes);
        }
    }
    let mean_t = times.iter().sum::<f64>() / times.len().max(1) as f64;
    let mean_c = changes.iter().sum::<usize>() as f64 / changes.len().max(1) as f64;
    outcome(
        reached == REACH_RUNS as usize && logs_ok == REACH_RUNS as usize,
        format!("{reached}/{REACH_RUNS} reached, {logs_ok} complete logs, mean completion {mean_t:.1} s, mean direction changes {mean_c:.1}"),
    )
}

fn serial_codec() -> Outcome {
    let mut failures = 0;
    let mut frames = 0;
    for joint in 0..4u8 {
        for k in 0..=18_000u32 {
            let a = k as f64 / 100.0;
            let f = encode_frame(joint, a).expect("in range");
            let back = decode_frame(&f.to_line()).expect("own frame parses");
            if back != f || back.joint != joint || back.angle_deg() != a || back.centideg != k {
                failures += 1;
            }
            frames += 1;
        }
        if decode_ack(&encode_ack(Ack::Ok(joint))).ok() != Some(Ack::Ok(joint)) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{frames} frames, {failures} failures"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("kinematics consistency", kinematics),
        ("handover law", handover),
        ("motion-split rule", motion_split),
        ("mapping quality", mapping_quality),
        ("classifier convergence", classifier),
        ("dwell correctness", dwell),
        ("pointing-harness protocol", pointing),
        ("end-to-end closed loop", closed_loop),
        ("serial codec", serial_codec),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        println!("{} {name}: {} [{:.1?}]", if o.pass { "PASS" } else { "FAIL" }, o.detail, start.elapsed());
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
