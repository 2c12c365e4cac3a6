//! Seeded nine-cluster gaze data: noisy gaze vectors aimed at each block centre.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CalibrationSet, Example, ScreenGrid, BLOCKS};
use crate::gaze::synthetic::ViewingGeometry;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    pub view: ViewingGeometry,
    pub per_class: usize,
    /// Angular noise per gaze component, degrees.
    pub sigma_deg: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self { view: ViewingGeometry::default(), per_class: 100, sigma_deg: 2.0 }
    }
}

pub fn cluster_examples(cfg: &ClusterConfig, seed: u64) -> Vec<Example> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = ScreenGrid::new(cfg.view.display_px.0, cfg.view.display_px.1);
    let mut out = Vec::with_capacity(BLOCKS * cfg.per_class);
    for label in 0..BLOCKS {
        let c = grid.center(label);
        for _ in 0..cfg.per_class {
            out.push(Example { gaze: cfg.view.noisy_gaze_vector(c, cfg.sigma_deg, &mut rng), label });
        }
    }
    out
}

/// Clustered examples with a stratified split drawn from the same seed.
pub fn cluster_set(cfg: &ClusterConfig, seed: u64) -> CalibrationSet {
    CalibrationSet::new(cluster_examples(cfg, seed), seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{loss_and_gradient, predict, train, Partition, TrainConfig, INPUT_DIM};
    use crate::gaze::GazeVector;

    #[test]
    fn seeded_and_balanced() {
        let cfg = ClusterConfig::default();
        assert_eq!(cluster_examples(&cfg, 3), cluster_examples(&cfg, 3));
        let set = cluster_set(&cfg, 3);
        for label in 0..BLOCKS {
            assert_eq!(set.count(Partition::Train, label), 70);
            assert_eq!(set.count(Partition::Test, label), 15);
        }
        assert!(set.examples.iter().all(|e| e.gaze.validate().is_ok()));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let set = cluster_set(&ClusterConfig { per_class: 8, ..Default::default() }, 9);
        let cfg = TrainConfig { epoch_cap: 1, stop_on_target: false, ..Default::default() };
        let model = train(&set, &cfg).unwrap().model;
        let xs: Vec<[f64; INPUT_DIM]> = set.examples.iter().map(|e| e.gaze.0).collect();
        let ys: Vec<usize> = set.examples.iter().map(|e| e.label).collect();
        let (_, grad) = loss_and_gradient(&model, &xs, &ys);
        let n = model.param_count();
        let h = 1e-5;
        let mut checked = 0;
        for k in 0..n {
            let i = (k * 7919) % n;
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
            assert!((fd - g).abs() <= 1e-4 * fd.abs().max(g.abs()), "param {i}: analytic {g} numeric {fd}");
            checked += 1;
            if checked == 10 {
                break;
            }
        }
        assert_eq!(checked, 10);
    }

    #[test]
    fn trained_model_hits_centroids() {
        let cfg = ClusterConfig::default();
        let out = train(&cluster_set(&cfg, 1), &TrainConfig { seed: 1, ..Default::default() }).unwrap();
        assert!(out.model.metrics.converged);
        let grid = ScreenGrid::new(1920.0, 1080.0);
        for label in 0..BLOCKS {
            assert_eq!(predict(&out.model, &cfg.view.gaze_vector(grid.center(label))).unwrap(), label);
        }
        let mid = grid.center(0).midpoint(grid.center(1));
        assert!(predict(&out.model, &cfg.view.gaze_vector(mid)).unwrap() <= 1);
        assert!(predict(&out.model, &GazeVector([f64::NAN; 6])).is_err());
    }
}
