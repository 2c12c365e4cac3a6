use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ClassifierError, BLOCKS};
use crate::gaze::GazeVector;

pub const INPUT_DIM: usize = 6;
pub const HIDDEN_SIZES: [usize; 2] = [256, 128];
pub const MODEL_VERSION: u32 = 1;

/// Fully connected layer. `weights` is `outputs × inputs`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Dense {
    /// Uniform init with limit `sqrt(6 / fan_in)`, zero biases.
    fn init<R: Rng>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let limit = (6.0 / inputs as f64).sqrt();
        let weights = (0..inputs * outputs).map(|_| rng.gen_range(-limit..limit)).collect();
        Self { inputs, outputs, weights, biases: vec![0.0; outputs] }
    }

    pub(crate) fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.biases.iter().enumerate().map(|(o, b)| {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
        }));
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelMetrics {
    pub test_accuracy: f64,
    pub val_accuracy: f64,
    pub epochs_run: usize,
    pub converged: bool,
}

/// Feed-forward classifier from a 6-D gaze vector to one of nine blocks:
/// rectified hidden layers and a softmax output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockModel {
    pub version: u32,
    pub layer_sizes: Vec<usize>,
    pub layers: Vec<Dense>,
    /// Per-feature standardisation fitted on the training partition.
    pub input_mean: Vec<f64>,
    pub input_std: Vec<f64>,
    pub metrics: ModelMetrics,
}

/// Per-layer weight and bias gradients, same shapes as the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Gradient {
    pub fn zeros_like(model: &BlockModel) -> Self {
        Self { layers: model.layers.iter().map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.biases.len()])).collect() }
    }

    /// Flat view in the same order as [`BlockModel::param`].
    pub fn get(&self, mut i: usize) -> f64 {
        for (w, b) in &self.layers {
            if i < w.len() {
                return w[i];
            }
            i -= w.len();
            if i < b.len() {
                return b[i];
            }
            i -= b.len();
        }
        panic!("gradient index out of range")
    }
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - m).exp()).collect();
    let s: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / s).collect()
}

impl BlockModel {
    pub fn new<R: Rng>(hidden: &[usize], rng: &mut R) -> Self {
        let mut sizes = vec![INPUT_DIM];
        sizes.extend_from_slice(hidden);
        sizes.push(BLOCKS);
        let layers = sizes.windows(2).map(|w| Dense::init(w[0], w[1], rng)).collect();
        Self {
            version: MODEL_VERSION,
            layer_sizes: sizes,
            layers,
            input_mean: vec![0.0; INPUT_DIM],
            input_std: vec![1.0; INPUT_DIM],
            metrics: ModelMetrics::default(),
        }
    }

    pub fn standardize(&self, x: &[f64; INPUT_DIM]) -> Vec<f64> {
        x.iter().zip(self.input_mean.iter().zip(&self.input_std)).map(|(v, (m, s))| (v - m) / s).collect()
    }

    /// Activations of every layer for one input: standardised input, each
    /// rectified hidden layer, then the output logits.
    pub(crate) fn activations(&self, x: &[f64; INPUT_DIM]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(self.standardize(x));
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::with_capacity(layer.outputs);
            layer.apply(&acts[k], &mut out);
            if k < last {
                out.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            acts.push(out);
        }
        acts
    }

    pub fn logits(&self, x: &[f64; INPUT_DIM]) -> Vec<f64> {
        self.activations(x).pop().expect("at least one layer")
    }

    pub fn probabilities(&self, x: &[f64; INPUT_DIM]) -> Vec<f64> {
        softmax(&self.logits(x))
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }

    fn locate(&self, mut i: usize) -> (usize, bool, usize) {
        for (k, l) in self.layers.iter().enumerate() {
            if i < l.weights.len() {
                return (k, true, i);
            }
            i -= l.weights.len();
            if i < l.biases.len() {
                return (k, false, i);
            }
            i -= l.biases.len();
        }
        panic!("parameter index out of range")
    }

    /// Flat parameter access: layer by layer, weights then biases.
    pub fn param(&self, i: usize) -> f64 {
        match self.locate(i) {
            (k, true, j) => self.layers[k].weights[j],
            (k, false, j) => self.layers[k].biases[j],
        }
    }

    pub fn set_param(&mut self, i: usize, v: f64) {
        match self.locate(i) {
            (k, true, j) => self.layers[k].weights[j] = v,
            (k, false, j) => self.layers[k].biases[j] = v,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| l.weights.iter().chain(&l.biases).all(|v| v.is_finite()))
            && self.input_mean.iter().chain(&self.input_std).all(|v| v.is_finite())
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |m: &str| Err(ClassifierError::ModelFormat(m.to_string()));
        if self.version != MODEL_VERSION {
            return bad(&format!("unsupported version {}", self.version));
        }
        if self.layer_sizes.len() != self.layers.len() + 1
            || self.layer_sizes.first() != Some(&INPUT_DIM)
            || self.layer_sizes.last() != Some(&BLOCKS)
        {
            return bad("layer sizes must run from 6 inputs to 9 outputs");
        }
        for (k, l) in self.layers.iter().enumerate() {
            if l.inputs != self.layer_sizes[k]
                || l.outputs != self.layer_sizes[k + 1]
                || l.weights.len() != l.inputs * l.outputs
                || l.biases.len() != l.outputs
            {
                return bad(&format!("layer {k} shape mismatch"));
            }
        }
        if self.input_mean.len() != INPUT_DIM || self.input_std.len() != INPUT_DIM || self.input_std.iter().any(|s| !(*s > 0.0)) {
            return bad("bad input standardisation");
        }
        if !self.is_finite() {
            return bad("non-finite weights");
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, ClassifierError> {
        let m: Self = serde_json::from_str(text).map_err(|e| ClassifierError::ModelFormat(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }
}

/// Most probable block for a gaze vector (re-normalised per eye first).
pub fn predict(model: &BlockModel, gaze: &GazeVector) -> Result<usize, ClassifierError> {
    if !gaze.is_finite() {
        return Err(ClassifierError::NonFinite);
    }
    let logits = model.logits(&gaze.normalized().0);
    let mut best = 0;
    for (i, v) in logits.iter().enumerate() {
        if *v > logits[best] {
            best = i;
        }
    }
    Ok(best)
}
