use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mlp::softmax;
use super::{BlockModel, CalibrationSet, ClassifierError, Gradient, Partition, HIDDEN_SIZES, INPUT_DIM};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epoch_cap: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Stop once test accuracy reaches this value.
    pub target_accuracy: f64,
    /// When false, run to the epoch cap (or patience) regardless of accuracy.
    pub stop_on_target: bool,
    /// Epochs without validation-loss improvement before giving up.
    pub patience: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: HIDDEN_SIZES.to_vec(),
            learning_rate: 1e-3,
            batch_size: 32,
            epoch_cap: 200,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            target_accuracy: 0.90,
            stop_on_target: true,
            patience: 30,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
    pub test_accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: BlockModel,
    pub history: Vec<EpochStats>,
}

/// Mean cross-entropy over a batch and its gradient by backpropagation.
pub fn loss_and_gradient(model: &BlockModel, xs: &[[f64; INPUT_DIM]], labels: &[usize]) -> (f64, Gradient) {
    let mut grad = Gradient::zeros_like(model);
    let mut loss = 0.0;
    let n = xs.len().max(1) as f64;
    for (x, &label) in xs.iter().zip(labels) {
        let acts = model.activations(x);
        let probs = softmax(acts.last().expect("logits"));
        loss -= probs[label].max(f64::MIN_POSITIVE).ln();

        let mut delta: Vec<f64> = probs;
        delta[label] -= 1.0;
        for k in (0..model.layers.len()).rev() {
            let layer = &model.layers[k];
            let input = &acts[k];
            let (gw, gb) = &mut grad.layers[k];
            for (o, d) in delta.iter().enumerate() {
                gb[o] += d / n;
                let row = &mut gw[o * layer.inputs..(o + 1) * layer.inputs];
                for (g, v) in row.iter_mut().zip(input) {
                    *g += d * v / n;
                }
            }
            if k == 0 {
                break;
            }
            let mut prev = vec![0.0; layer.inputs];
            for (o, d) in delta.iter().enumerate() {
                let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (p, w) in prev.iter_mut().zip(row) {
                    *p += d * w;
                }
            }
            // rectifier derivative, using the post-activation sign
            for (p, a) in prev.iter_mut().zip(input) {
                if *a <= 0.0 {
                    *p = 0.0;
                }
            }
            delta = prev;
        }
    }
    (loss / n, grad)
}

pub fn mean_loss(model: &BlockModel, xs: &[[f64; INPUT_DIM]], labels: &[usize]) -> f64 {
    let n = xs.len().max(1) as f64;
    xs.iter().zip(labels).map(|(x, &l)| -model.probabilities(x)[l].max(f64::MIN_POSITIVE).ln()).sum::<f64>() / n
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Fraction of examples in `part` classified correctly.
pub fn accuracy(model: &BlockModel, set: &CalibrationSet, part: Partition) -> f64 {
    let idx = set.indices(part);
    if idx.is_empty() {
        return 0.0;
    }
    let hits = idx.iter().filter(|&&i| argmax(&model.logits(&set.examples[i].gaze.normalized().0)) == set.examples[i].label).count();
    hits as f64 / idx.len() as f64
}

struct Adam {
    m: Vec<(Vec<f64>, Vec<f64>)>,
    v: Vec<(Vec<f64>, Vec<f64>)>,
    t: i32,
}

impl Adam {
    fn new(model: &BlockModel) -> Self {
        let z = Gradient::zeros_like(model).layers;
        Self { m: z.clone(), v: z, t: 0 }
    }

    fn step(&mut self, model: &mut BlockModel, grad: &Gradient, cfg: &TrainConfig) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        for (k, layer) in model.layers.iter_mut().enumerate() {
            let (gw, gb) = &grad.layers[k];
            let (mw, mb) = &mut self.m[k];
            let (vw, vb) = &mut self.v[k];
            for (params, g, m, v) in [(&mut layer.weights, gw, mw, vw), (&mut layer.biases, gb, mb, vb)] {
                for i in 0..params.len() {
                    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
                    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
                    params[i] -= cfg.learning_rate * (m[i] / c1) / ((v[i] / c2).sqrt() + cfg.epsilon);
                }
            }
        }
    }
}

fn gather(set: &CalibrationSet, part: Partition) -> (Vec<[f64; INPUT_DIM]>, Vec<usize>) {
    set.indices(part).into_iter().map(|i| (set.examples[i].gaze.normalized().0, set.examples[i].label)).unzip()
}

/// Mini-batch Adam on cross-entropy.
///
/// After every epoch the test partition is scored and training stops at the
/// first epoch reaching `target_accuracy`. Validation loss drives a patience
/// cut-off. A model that never reaches the target comes back with
/// `metrics.converged == false`.
pub fn train(set: &CalibrationSet, cfg: &TrainConfig) -> Result<TrainOutcome, ClassifierError> {
    set.validate()?;
    if cfg.batch_size == 0 {
        return Err(ClassifierError::Malformed("batch size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = BlockModel::new(&cfg.hidden, &mut rng);

    let (train_x, train_y) = gather(set, Partition::Train);
    let (val_x, val_y) = gather(set, Partition::Val);
    let n = train_x.len() as f64;
    for d in 0..INPUT_DIM {
        let mean = train_x.iter().map(|x| x[d]).sum::<f64>() / n;
        let var = train_x.iter().map(|x| (x[d] - mean).powi(2)).sum::<f64>() / n;
        model.input_mean[d] = mean;
        model.input_std[d] = var.sqrt().max(1e-6);
    }

    let mut adam = Adam::new(&model);
    let mut order: Vec<usize> = (0..train_x.len()).collect();
    let mut history = Vec::new();
    let mut best_val = f64::INFINITY;
    let mut stale = 0;
    let mut converged = false;

    for epoch in 1..=cfg.epoch_cap {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let bx: Vec<_> = chunk.iter().map(|&i| train_x[i]).collect();
            let by: Vec<_> = chunk.iter().map(|&i| train_y[i]).collect();
            let (_, grad) = loss_and_gradient(&model, &bx, &by);
            adam.step(&mut model, &grad, cfg);
        }
        let stats = EpochStats {
            epoch,
            train_loss: mean_loss(&model, &train_x, &train_y),
            val_loss: mean_loss(&model, &val_x, &val_y),
            val_accuracy: accuracy(&model, set, Partition::Val),
            test_accuracy: accuracy(&model, set, Partition::Test),
        };
        history.push(stats);
        model.metrics.epochs_run = epoch;
        model.metrics.test_accuracy = stats.test_accuracy;
        model.metrics.val_accuracy = stats.val_accuracy;
        converged = stats.test_accuracy >= cfg.target_accuracy;
        if converged && cfg.stop_on_target {
            break;
        }
        if stats.val_loss < best_val - 1e-12 {
            best_val = stats.val_loss;
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }
    model.metrics.converged = converged;
    Ok(TrainOutcome { model, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::Example;
    use crate::gaze::synthetic::ViewingGeometry;
    use crate::classifier::ScreenGrid;

    fn memorization_set() -> CalibrationSet {
        let view = ViewingGeometry::default();
        let grid = ScreenGrid::new(1920.0, 1080.0);
        let examples = (0..9)
            .flat_map(|label| {
                let g = view.gaze_vector(grid.center(label));
                (0..20).map(move |_| Example { gaze: g, label })
            })
            .collect();
        CalibrationSet::new(examples, 4)
    }

    #[test]
    fn memorizes_identical_copies() {
        let out = train(&memorization_set(), &TrainConfig { stop_on_target: false, epoch_cap: 40, ..Default::default() }).unwrap();
        assert_eq!(out.model.metrics.test_accuracy, 1.0);
        assert!(out.model.metrics.converged);
    }

    #[test]
    fn memorization_loss_never_increases() {
        let out = train(&memorization_set(), &TrainConfig { stop_on_target: false, epoch_cap: 40, seed: 2, ..Default::default() }).unwrap();
        assert_eq!(out.history.len(), 40);
        for w in out.history.windows(2) {
            assert!(w[1].train_loss <= w[0].train_loss, "epoch {}: {} > {}", w[1].epoch, w[1].train_loss, w[0].train_loss);
        }
    }

    #[test]
    fn empty_set_is_an_error() {
        assert_eq!(train(&CalibrationSet::default(), &TrainConfig::default()).unwrap_err(), ClassifierError::EmptySet);
    }
}
