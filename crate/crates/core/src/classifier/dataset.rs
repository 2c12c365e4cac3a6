use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ClassifierError, MarkerPath, MarkerPhase, BLOCKS};
use crate::gaze::{GazeSample, GazeVector};

/// Samples this long after each block change are discarded (saccade onset).
pub const DEFAULT_SETTLE_MS: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Train,
    Val,
    Test,
}

impl Partition {
    pub fn name(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Val => "val",
            Partition::Test => "test",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "train" => Some(Partition::Train),
            "val" => Some(Partition::Val),
            "test" => Some(Partition::Test),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub gaze: GazeVector,
    pub label: usize,
}

/// Labelled gaze vectors with a train/val/test assignment per example.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CalibrationSet {
    pub examples: Vec<Example>,
    pub split: Vec<Partition>,
}

impl CalibrationSet {
    /// Builds a set and assigns a stratified 70/15/15 split.
    pub fn new(examples: Vec<Example>, seed: u64) -> Self {
        let mut set = Self { split: vec![Partition::Train; examples.len()], examples };
        set.stratified_split(seed);
        set
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn indices(&self, part: Partition) -> Vec<usize> {
        self.split.iter().enumerate().filter(|(_, p)| **p == part).map(|(i, _)| i).collect()
    }

    pub fn count(&self, part: Partition, label: usize) -> usize {
        self.examples.iter().zip(&self.split).filter(|(e, p)| **p == part && e.label == label).count()
    }

    /// Shuffle each class and cut it at 70% and 85%, rounding each cut, so
    /// every partition is within one example of its share per class.
    pub fn stratified_split(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut split = vec![Partition::Train; self.examples.len()];
        let max_label = self.examples.iter().map(|e| e.label).max().unwrap_or(0);
        for label in 0..=max_label {
            let mut idx: Vec<usize> = (0..self.examples.len()).filter(|&i| self.examples[i].label == label).collect();
            idx.shuffle(&mut rng);
            let n = idx.len() as f64;
            let cut_train = (0.70 * n).round() as usize;
            let cut_val = (0.85 * n).round() as usize;
            for (k, &i) in idx.iter().enumerate() {
                split[i] = if k < cut_train {
                    Partition::Train
                } else if k < cut_val {
                    Partition::Val
                } else {
                    Partition::Test
                };
            }
        }
        self.split = split;
    }

    /// Checks labels, finiteness and that every class appears in every partition.
    pub fn validate(&self) -> Result<(), ClassifierError> {
        if self.examples.is_empty() {
            return Err(ClassifierError::EmptySet);
        }
        if self.split.len() != self.examples.len() {
            return Err(ClassifierError::Malformed("split length differs from example count".into()));
        }
        if let Some(e) = self.examples.iter().find(|e| e.label >= BLOCKS) {
            return Err(ClassifierError::Malformed(format!("label {} out of range", e.label)));
        }
        if self.examples.iter().any(|e| !e.gaze.is_finite()) {
            return Err(ClassifierError::NonFinite);
        }
        for part in [Partition::Train, Partition::Val, Partition::Test] {
            for label in 0..BLOCKS {
                if self.count(part, label) == 0 {
                    return Err(ClassifierError::Malformed(format!("class {label} missing from {} partition", part.name())));
                }
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), ClassifierError> {
        let err = |e: csv::Error| ClassifierError::Csv(e.to_string());
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["gx0", "gy0", "gz0", "gx1", "gy1", "gz1", "label", "split"]).map_err(err)?;
        for (e, p) in self.examples.iter().zip(&self.split) {
            let mut rec: Vec<String> = e.gaze.0.iter().map(|v| v.to_string()).collect();
            rec.push(e.label.to_string());
            rec.push(p.name().to_string());
            wtr.write_record(&rec).map_err(err)?;
        }
        wtr.flush().map_err(|e| ClassifierError::Csv(e.to_string()))
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, ClassifierError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
        let mut set = CalibrationSet::default();
        for (i, rec) in rdr.records().enumerate() {
            let row = i + 2;
            let rec = rec.map_err(|e| ClassifierError::Csv(e.to_string()))?;
            if rec.len() != 8 {
                return Err(ClassifierError::Csv(format!("line {row}: expected 8 columns")));
            }
            let mut g = [0.0; 6];
            for (k, slot) in g.iter_mut().enumerate() {
                *slot = rec[k].parse().map_err(|_| ClassifierError::Csv(format!("line {row}: bad number {:?}", &rec[k])))?;
            }
            let label = rec[6].parse().map_err(|_| ClassifierError::Csv(format!("line {row}: bad label {:?}", &rec[6])))?;
            let part = Partition::parse(&rec[7]).ok_or_else(|| ClassifierError::Csv(format!("line {row}: bad split {:?}", &rec[7])))?;
            set.examples.push(Example { gaze: GazeVector(g), label });
            set.split.push(part);
        }
        Ok(set)
    }
}

/// Label gaze vectors recorded while the marker rested on each block.
///
/// Samples in the first `settle_ms` of each dwell and all transition samples
/// are discarded. Gaze vectors are re-normalised per eye.
pub fn collect_calibration(
    samples: &[GazeSample],
    path: &MarkerPath,
    settle_ms: f64,
    seed: u64,
) -> Result<CalibrationSet, ClassifierError> {
    let mut examples = Vec::new();
    for s in samples {
        let Some(g) = s.gaze_vec.filter(|g| s.valid && g.is_finite()) else { continue };
        if let MarkerPhase::Dwell { block, since_ms } = path.phase_at(s.t_ms) {
            if s.t_ms - since_ms >= settle_ms {
                examples.push(Example { gaze: g.normalized(), label: block });
            }
        }
    }
    for label in 0..BLOCKS {
        if !examples.iter().any(|e| e.label == label) {
            return Err(ClassifierError::InsufficientData);
        }
    }
    Ok(CalibrationSet::new(examples, seed))
}
