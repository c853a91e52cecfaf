//! Congestion control endpoints: handshake negotiation, window algorithms,
//! RTT estimation and receiver echo logic.

mod echo;
mod endpoint;
mod rtt;
mod window;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

pub use echo::{AckSignal, EchoMode, EchoState, CL1_ECHO_ACKS};
pub use endpoint::{
    ConnEvent, Endpoint, EndpointConfig, EndpointStats, LossKind, Negotiated, Outbox, Phase, Role,
    TimerRequest,
};
pub use rtt::{AvgRttKind, RttEstimator};
pub use window::{
    initial_cwnd, initial_segments, EchoResponse, HandshakeOutcome, RttView, WindowParams,
    WindowState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "eecn")]
    Eecn,
    #[serde(rename = "ecn")]
    NewRenoEcn,
    #[serde(rename = "newreno")]
    NewReno,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Eecn, Algorithm::NewRenoEcn, Algorithm::NewReno];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Eecn => "eecn",
            Algorithm::NewRenoEcn => "ecn",
            Algorithm::NewReno => "newreno",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How often the congestion-avoidance decay may apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaDecay {
    #[default]
    PerAck,
    PerRtt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransportConfig {
    pub seg_size: u32,
    pub d: f64,
    pub sigma_ss: f64,
    pub sigma_ca: f64,
    pub avg_rtt: AvgRttKind,
    pub ca_decay: CaDecay,
    pub initial_rto_s: f64,
    pub min_rto_s: f64,
}

impl Default for TransportConfig {
    fn default() -> Self {
        Self {
            seg_size: 1000,
            d: 8.0,
            sigma_ss: 0.3,
            sigma_ca: 0.02,
            avg_rtt: AvgRttKind::Ewma,
            ca_decay: CaDecay::PerAck,
            initial_rto_s: 1.0,
            min_rto_s: 0.2,
        }
    }
}

impl TransportConfig {
    pub fn window_params(&self) -> WindowParams<f64> {
        WindowParams {
            seg_size: f64::from(self.seg_size),
            d: self.d,
            sigma_ss: self.sigma_ss,
            sigma_ca: self.sigma_ca,
        }
    }

    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if self.seg_size == 0 {
            return Err(ConfigError::new(
                format!("{path}.seg_size"),
                "must be positive",
            ));
        }
        if let Err(msg) = self.window_params().validate() {
            let field = if msg.starts_with("d ") {
                "d"
            } else if msg.starts_with("sigma_ss") {
                "sigma_ss"
            } else {
                "sigma_ca"
            };
            return Err(ConfigError::new(format!("{path}.{field}"), msg));
        }
        if !(self.min_rto_s > 0.0 && self.initial_rto_s >= self.min_rto_s) {
            return Err(ConfigError::new(
                format!("{path}.initial_rto_s"),
                "RTO bounds must satisfy 0 < min_rto_s <= initial_rto_s",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
