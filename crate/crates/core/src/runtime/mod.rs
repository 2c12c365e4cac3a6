//! Simulated servo arm, serial line protocol, plan execution and the JSON
//! gateway used by UI clients.

mod control;
mod exec;
mod gateway;
mod serial;
mod sim;

pub use control::{display_to_sheet, ArmRuntime, CartesianArm, PickConfig};
pub use exec::{execute, ExecutionReport, Executor, SegmentRecord};
pub use gateway::{error_message, Gateway, Inbound, BROADCAST_INTERVAL_MS, DEFAULT_QUEUE_CAPACITY, TRACE_TAIL};
pub use serial::{decode_ack, decode_frame, encode_ack, encode_frame, Ack, SerialFrame, SerialLink, ServoLink, MAX_CENTIDEG};
pub use sim::{Pen, SimArm, DEFAULT_MAX_RATE_DEG_S, SIM_TICK_MS};

use thiserror::Error;

use crate::planner::PlanError;

#[derive(Debug, Error)]
pub enum RuntimeError {
    #[error("joint {joint}: angle {angle_deg} out of range")]
    OutOfRange { joint: u8, angle_deg: f64 },
    #[error("serial protocol: {0}")]
    Protocol(String),
    #[error("joint {joint}: command refused with code {code}")]
    Nak { joint: u8, code: u32 },
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
