//! Multilevel ECN congestion feedback: codepoints, router queues, transport
//! endpoints and a deterministic packet-level simulator.
//!
//! The congestion-level estimator is generic over [`num::Scalar`] and the window
//! arithmetic over [`num::Real`]; the simulator runs on `f64` through the
//! aliases below.

pub mod codepoint;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod num;
pub mod packet;
pub mod queue;
pub mod time;
pub mod transport;

pub use codepoint::{CongestionLevel, EcnCodepoint};
pub use error::{ConfigError, Error, Result};
pub use time::{SimDuration, SimTime};
pub use transport::Algorithm;

pub type Window = transport::WindowState<f64>;
pub type WindowParams = transport::WindowParams<f64>;
pub type QueueThresholds = queue::Thresholds<f64>;

pub type Window32 = transport::WindowState<f32>;
pub type WindowParams32 = transport::WindowParams<f32>;
pub type QueueThresholds32 = queue::Thresholds<f32>;
