//! Display-to-workspace calibration: a least-squares affine fit from
//! correspondence pairs recorded by dragging the arm to known positions.

use std::io::Read;

use nalgebra::{DMatrix, Matrix2, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point2;

#[derive(Debug, Error, PartialEq)]
pub enum MappingError {
    #[error("rank-deficient calibration")]
    RankDeficient,
    #[error("non-finite correspondence")]
    NonFinite,
    #[error("pairs file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrespondencePair {
    /// Display pixels.
    pub display_pt: Point2,
    /// Arm frame, cm.
    pub robot_pt: Point2,
}

impl CorrespondencePair {
    pub fn new(display_pt: Point2, robot_pt: Point2) -> Self {
        Self { display_pt, robot_pt }
    }
}

/// `robot = matrix · display + offset`, with fit quality on the calibration set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub matrix: [[f64; 2]; 2],
    pub offset: [f64; 2],
    pub r_squared: f64,
    pub rmse_cm: f64,
}

impl AffineMap {
    pub fn identity() -> Self {
        Self::from_parts([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0])
    }

    pub fn from_parts(matrix: [[f64; 2]; 2], offset: [f64; 2]) -> Self {
        Self { matrix, offset, r_squared: 1.0, rmse_cm: 0.0 }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, MappingError> {
        serde_json::from_str(text).map_err(|e| MappingError::Parse(e.to_string()))
    }

    /// Inverse map (workspace to display), when the linear part is invertible.
    pub fn inverse(&self) -> Option<AffineMap> {
        let m = Matrix2::new(self.matrix[0][0], self.matrix[0][1], self.matrix[1][0], self.matrix[1][1]);
        let inv = m.try_inverse()?;
        let o = -(inv * Vector2::new(self.offset[0], self.offset[1]));
        Some(AffineMap::from_parts([[inv[(0, 0)], inv[(0, 1)]], [inv[(1, 0)], inv[(1, 1)]]], [o.x, o.y]))
    }
}

pub fn map_point(m: &AffineMap, p: Point2) -> Point2 {
    Point2::new(
        m.matrix[0][0] * p.x + m.matrix[0][1] * p.y + m.offset[0],
        m.matrix[1][0] * p.x + m.matrix[1][1] * p.y + m.offset[1],
    )
}

/// Relative singular-value floor below which the display points count as collinear.
const RANK_TOL: f64 = 1e-9;

/// Least-squares affine fit. R² is pooled over both output axes.
pub fn fit_mapping(pairs: &[CorrespondencePair]) -> Result<AffineMap, MappingError> {
    if pairs.len() < 3 {
        return Err(MappingError::RankDeficient);
    }
    if pairs.iter().any(|p| !p.display_pt.is_finite() || !p.robot_pt.is_finite()) {
        return Err(MappingError::NonFinite);
    }
    let n = pairs.len();
    let n_f = n as f64;
    let mean_d = pairs.iter().fold(Point2::default(), |a, p| Point2::new(a.x + p.display_pt.x / n_f, a.y + p.display_pt.y / n_f));
    let mean_r = pairs.iter().fold(Point2::default(), |a, p| Point2::new(a.x + p.robot_pt.x / n_f, a.y + p.robot_pt.y / n_f));

    // Work in centred coordinates: the offset then drops out and the 2×2 part
    // is the solution of a well-conditioned n×2 problem.
    let x = DMatrix::from_fn(n, 2, |i, j| {
        let p = pairs[i].display_pt;
        if j == 0 { p.x - mean_d.x } else { p.y - mean_d.y }
    });
    let y = DMatrix::from_fn(n, 2, |i, j| {
        let p = pairs[i].robot_pt;
        if j == 0 { p.x - mean_r.x } else { p.y - mean_r.y }
    });
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin <= RANK_TOL * smax {
        return Err(MappingError::RankDeficient);
    }
    // Columns of `coef` hold the rows of M, transposed.
    let coef = svd.solve(&y, 0.0).map_err(|_| MappingError::RankDeficient)?;
    let matrix = [[coef[(0, 0)], coef[(1, 0)]], [coef[(0, 1)], coef[(1, 1)]]];
    let offset = [
        mean_r.x - matrix[0][0] * mean_d.x - matrix[0][1] * mean_d.y,
        mean_r.y - matrix[1][0] * mean_d.x - matrix[1][1] * mean_d.y,
    ];
    let mut map = AffineMap::from_parts(matrix, offset);
    let (r_squared, rmse_cm) = fit_quality(&map, pairs);
    map.r_squared = r_squared;
    map.rmse_cm = rmse_cm;
    Ok(map)
}

/// Pooled R² and RMS Euclidean residual of `map` over `pairs`.
pub fn fit_quality(map: &AffineMap, pairs: &[CorrespondencePair]) -> (f64, f64) {
    if pairs.is_empty() {
        return (0.0, 0.0);
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.robot_pt.x).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.robot_pt.y).sum::<f64>() / n;
    let mut sse = 0.0;
    let mut sst = 0.0;
    for p in pairs {
        let q = map_point(map, p.display_pt);
        sse += (q.x - p.robot_pt.x).powi(2) + (q.y - p.robot_pt.y).powi(2);
        sst += (p.robot_pt.x - mx).powi(2) + (p.robot_pt.y - my).powi(2);
    }
    let r2 = if sst > 0.0 { (1.0 - sse / sst).clamp(0.0, 1.0) } else if sse == 0.0 { 1.0 } else { 0.0 };
    (r2, (sse / n).sqrt())
}

/// Reads `dx_px,dy_px,rx_cm,ry_cm` rows; a non-numeric first row is taken as a header.
pub fn read_pairs_csv<R: Read>(reader: R) -> Result<Vec<CorrespondencePair>, MappingError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| MappingError::Parse(e.to_string()))?;
        if rec.len() != 4 {
            return Err(MappingError::Parse(format!("row {}: expected 4 columns", i + 1)));
        }
        let vals: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match vals {
            Ok(v) => out.push(CorrespondencePair::new(Point2::new(v[0], v[1]), Point2::new(v[2], v[3]))),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(MappingError::Parse(format!("row {}: {e}", i + 1))),
        }
    }
    Ok(out)
}

pub fn write_pairs_csv<W: std::io::Write>(w: W, pairs: &[CorrespondencePair]) -> Result<(), MappingError> {
    let mut wtr = csv::Writer::from_writer(w);
    let err = |e: csv::Error| MappingError::Parse(e.to_string());
    wtr.write_record(["dx_px", "dy_px", "rx_cm", "ry_cm"]).map_err(err)?;
    for p in pairs {
        wtr.serialize((p.display_pt.x, p.display_pt.y, p.robot_pt.x, p.robot_pt.y)).map_err(err)?;
    }
    wtr.flush().map_err(|e| MappingError::Parse(e.to_string()))
}

/// Nine display points on a 3×3 grid inset by `margin` (fraction of each side).
pub fn grid_points(width: f64, height: f64, margin: f64) -> Vec<Point2> {
    let xs = [margin, 0.5, 1.0 - margin].map(|f| f * width);
    let ys = [margin, 0.5, 1.0 - margin].map(|f| f * height);
    ys.iter().flat_map(|&y| xs.iter().map(move |&x| Point2::new(x, y))).collect()
}
