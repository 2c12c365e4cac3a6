use std::fmt;
use std::io::{BufRead, Write};

use super::RuntimeError;
use crate::planner::JointId;

/// One servo command, `SRV <joint> <centidegrees>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SerialFrame {
    pub joint: u8,
    pub centideg: u32,
}

pub const MAX_CENTIDEG: u32 = 18_000;

impl SerialFrame {
    pub fn angle_deg(&self) -> f64 {
        self.centideg as f64 / 100.0
    }

    pub fn to_line(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SerialFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SRV {} {}", self.joint, self.centideg)
    }
}

/// Fixed-point encoding with round-half-up. Fails before anything is sent
/// when the joint is unknown or the angle lies outside [0, 180].
pub fn encode_frame(joint: u8, angle_deg: f64) -> Result<SerialFrame, RuntimeError> {
    if JointId::from_index(joint).is_none() {
        return Err(RuntimeError::Protocol(format!("unknown joint {joint}")));
    }
    if !(0.0..=180.0).contains(&angle_deg) {
        return Err(RuntimeError::OutOfRange { joint, angle_deg });
    }
    let centideg = (angle_deg * 100.0 + 0.5).floor() as u32;
    Ok(SerialFrame { joint, centideg: centideg.min(MAX_CENTIDEG) })
}

fn strip_newline(line: &str) -> Result<&str, RuntimeError> {
    let body = line.strip_suffix('\n').unwrap_or(line);
    let body = body.strip_suffix('\r').unwrap_or(body);
    if body.contains('\n') {
        return Err(RuntimeError::Protocol("more than one line".into()));
    }
    Ok(body)
}

fn field<T: std::str::FromStr>(s: Option<&str>, what: &str, line: &str) -> Result<T, RuntimeError> {
    s.filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| RuntimeError::Protocol(format!("bad {what} in {line:?}")))
}

/// Parse a command line as the microcontroller would.
pub fn decode_frame(line: &str) -> Result<SerialFrame, RuntimeError> {
    let body = strip_newline(line)?;
    let mut parts = body.split(' ');
    if parts.next() != Some("SRV") {
        return Err(RuntimeError::Protocol(format!("not a servo frame: {line:?}")));
    }
    let joint: u8 = field(parts.next(), "joint", line)?;
    let centideg: u32 = field(parts.next(), "angle", line)?;
    if parts.next().is_some() {
        return Err(RuntimeError::Protocol(format!("trailing fields in {line:?}")));
    }
    if JointId::from_index(joint).is_none() || centideg > MAX_CENTIDEG {
        return Err(RuntimeError::Protocol(format!("frame out of range: {line:?}")));
    }
    Ok(SerialFrame { joint, centideg })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ack {
    Ok(u8),
    Err(u32),
}

pub fn decode_ack(line: &str) -> Result<Ack, RuntimeError> {
    let body = strip_newline(line)?;
    match body.split_once(' ') {
        Some(("OK", j)) => Ok(Ack::Ok(field(Some(j), "joint", line)?)),
        Some(("ERR", c)) => Ok(Ack::Err(field(Some(c), "code", line)?)),
        _ => Err(RuntimeError::Protocol(format!("malformed ack {line:?}"))),
    }
}

pub fn encode_ack(ack: Ack) -> String {
    match ack {
        Ack::Ok(j) => format!("OK {j}\n"),
        Ack::Err(c) => format!("ERR {c}\n"),
    }
}

/// Anything that can carry servo commands to hardware.
pub trait ServoLink {
    fn send(&mut self, joint: JointId, angle_deg: f64) -> Result<(), RuntimeError>;
}

/// Line-oriented link: one frame out, one ack back. A NAK is retried once.
#[derive(Debug)]
pub struct SerialLink<R, W> {
    reader: R,
    writer: W,
    pub frames_sent: usize,
}

impl<R: BufRead, W: Write> SerialLink<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        Self { reader, writer, frames_sent: 0 }
    }

    fn transact(&mut self, frame: &SerialFrame) -> Result<Ack, RuntimeError> {
        self.writer.write_all(frame.to_line().as_bytes())?;
        self.writer.flush()?;
        self.frames_sent += 1;
        let mut line = String::new();
        if self.reader.read_line(&mut line)? == 0 {
            return Err(RuntimeError::Protocol("link closed".into()));
        }
        let ack = decode_ack(&line)?;
        match ack {
            Ack::Ok(j) if j != frame.joint => Err(RuntimeError::Protocol(format!("ack for joint {j}, sent {}", frame.joint))),
            _ => Ok(ack),
        }
    }

    pub fn into_parts(self) -> (R, W) {
        (self.reader, self.writer)
    }
}

impl<R: BufRead, W: Write> ServoLink for SerialLink<R, W> {
    fn send(&mut self, joint: JointId, angle_deg: f64) -> Result<(), RuntimeError> {
        let frame = encode_frame(joint.index(), angle_deg)?;
        let mut code = 0;
        for _ in 0..2 {
            match self.transact(&frame)? {
                Ack::Ok(_) => return Ok(()),
                Ack::Err(c) => code = c,
            }
        }
        Err(RuntimeError::Nak { joint: frame.joint, code })
    }
}
