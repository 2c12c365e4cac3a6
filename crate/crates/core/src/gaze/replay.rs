//! Gaze replay files: one record per line,
//! `t_ms,x_px,y_px,gx0,gy0,gz0,gx1,gy1,gz1,valid`, with empty fields for
//! absent channels. Lines starting with `#` and a leading `t_ms` header are
//! skipped.

use std::io::{BufRead, Write};

use super::{GazeError, GazeSample, GazeVector};
use crate::geom::Point2;

pub const HEADER: &str = "t_ms,x_px,y_px,gx0,gy0,gz0,gx1,gy1,gz1,valid";

fn field(fields: &[&str], i: usize, line: usize) -> Result<Option<f64>, GazeError> {
    let raw = fields[i].trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<f64>()
        .map(Some)
        .map_err(|_| GazeError::Replay { line, msg: format!("field {} is not a number: {raw:?}", i + 1) })
}

pub fn parse_line(text: &str, line: usize) -> Result<GazeSample, GazeError> {
    let fields: Vec<&str> = text.split(',').collect();
    if fields.len() != 10 {
        return Err(GazeError::Replay { line, msg: format!("expected 10 fields, found {}", fields.len()) });
    }
    let t_ms = field(&fields, 0, line)?.ok_or(GazeError::Replay { line, msg: "missing timestamp".into() })?;
    let screen_pt = match (field(&fields, 1, line)?, field(&fields, 2, line)?) {
        (Some(x), Some(y)) => Some(Point2::new(x, y)),
        (None, None) => None,
        _ => return Err(GazeError::Replay { line, msg: "screen point needs both x and y".into() }),
    };
    let mut g = [0.0; 6];
    let mut present = 0;
    for (k, slot) in g.iter_mut().enumerate() {
        if let Some(v) = field(&fields, 3 + k, line)? {
            *slot = v;
            present += 1;
        }
    }
    let gaze_vec = match present {
        0 => None,
        6 => Some(GazeVector(g)),
        _ => return Err(GazeError::Replay { line, msg: "gaze vector needs all six components".into() }),
    };
    let valid = match fields[9].trim() {
        "1" | "true" | "TRUE" | "True" => true,
        "0" | "false" | "FALSE" | "False" => false,
        other => return Err(GazeError::Replay { line, msg: format!("bad valid flag {other:?}") }),
    };
    Ok(GazeSample { t_ms, screen_pt, gaze_vec, valid })
}

pub fn format_line(s: &GazeSample) -> String {
    let mut out = format!("{}", s.t_ms);
    match s.screen_pt {
        Some(p) => out.push_str(&format!(",{},{}", p.x, p.y)),
        None => out.push_str(",,"),
    }
    match &s.gaze_vec {
        Some(g) => g.0.iter().for_each(|v| out.push_str(&format!(",{v}"))),
        None => out.push_str(",,,,,,"),
    }
    out.push_str(if s.valid { ",1" } else { ",0" });
    out
}

pub fn read<R: BufRead>(reader: R) -> Result<Vec<GazeSample>, GazeError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with("t_ms") {
            continue;
        }
        out.push(parse_line(trimmed, line_no)?);
    }
    super::validate_stream(&out)?;
    Ok(out)
}

pub fn write<W: Write>(mut w: W, samples: &[GazeSample]) -> std::io::Result<()> {
    writeln!(w, "{HEADER}")?;
    for s in samples {
        writeln!(w, "{}", format_line(s))?;
    }
    Ok(())
}
