//! Congestion-window arithmetic, generic over the float type.
//!
//! Windows and segment sizes are in bytes; RTTs are in seconds, so the decay
//! exponent `beta = cur_rtt - avg_rtt` is a small number of seconds.

use serde::{Deserialize, Serialize};

use crate::codepoint::CongestionLevel;
use crate::num::Real;

/// Fixed parameters of the window algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowParams<T> {
    /// Segment size in bytes.
    pub seg_size: T,
    /// Divisor for the level-2 decrease.
    pub d: T,
    /// Slow-start growth factor when RTT is rising.
    pub sigma_ss: T,
    /// Congestion-avoidance growth factor.
    pub sigma_ca: T,
}

impl<T: Real> WindowParams<T> {
    pub fn with_seg_size(seg_size: T) -> Self {
        Self {
            seg_size,
            d: T::lit(8.0),
            sigma_ss: T::lit(0.3),
            sigma_ca: T::lit(0.02),
        }
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), &'static str> {
        let zero = T::zero();
        let one = T::one();
        if !(self.seg_size > zero) {
            return Err("segment size must be positive");
        }
        if !(self.d >= T::lit(2.0)) {
            return Err("d must be at least 2");
        }
        if !(self.sigma_ss > zero && self.sigma_ss <= one) {
            return Err("sigma_ss must be in (0, 1]");
        }
        if !(self.sigma_ca > zero && self.sigma_ca <= one) {
            return Err("sigma_ca must be in (0, 1]");
        }
        Ok(())
    }

    fn floor(&self) -> T {
        self.seg_size
    }

    fn md_floor(&self) -> T {
        self.seg_size + self.seg_size
    }
}

/// Current and average RTT, seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RttView<T> {
    pub cur: T,
    pub avg: T,
}

impl<T: Real> RttView<T> {
    pub fn rising(&self) -> bool {
        self.cur >= self.avg
    }

    /// `cur - avg`, only meaningful when [`rising`](Self::rising).
    pub fn beta(&self) -> T {
        self.cur - self.avg
    }
}

/// What the handshake revealed about the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandshakeOutcome {
    pub peer_capable: bool,
    /// Worst level echoed back about this endpoint's own control packet.
    pub observed_level: CongestionLevel,
}

impl HandshakeOutcome {
    pub fn not_capable() -> Self {
        Self {
            peer_capable: false,
            observed_level: CongestionLevel::None,
        }
    }

    pub fn capable(observed_level: CongestionLevel) -> Self {
        Self {
            peer_capable: true,
            observed_level,
        }
    }
}

/// Initial window in segments for a handshake outcome: 10, 5 or 1.
pub fn initial_segments(outcome: HandshakeOutcome) -> u32 {
    if !outcome.peer_capable {
        return 10;
    }
    match outcome.observed_level {
        CongestionLevel::None => 10,
        CongestionLevel::Cl1 => 5,
        CongestionLevel::Cl2 => 1,
    }
}

pub fn initial_cwnd<T: Real>(outcome: HandshakeOutcome, seg_size: T) -> T {
    T::from_u32(initial_segments(outcome)).expect("small integer") * seg_size
}

/// Whether a reduction happened and how.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EchoResponse {
    Severe,
    Decay,
    Unchanged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowState<T> {
    /// Bytes.
    pub cwnd: T,
    /// Bytes.
    pub ssthresh: T,
}

impl<T: Real> WindowState<T> {
    pub fn new(cwnd: T) -> Self {
        Self {
            cwnd,
            ssthresh: T::infinity(),
        }
    }

    pub fn in_slow_start(&self) -> bool {
        self.cwnd < self.ssthresh
    }

    fn clamp_floor(&mut self, p: &WindowParams<T>) {
        if self.cwnd < p.floor() {
            self.cwnd = p.floor();
        }
    }

    /// Sender response to an echoed congestion level.
    pub fn on_congestion_echo(
        &mut self,
        level: CongestionLevel,
        rtt: RttView<T>,
        p: &WindowParams<T>,
    ) -> EchoResponse {
        match level {
            CongestionLevel::Cl2 => {
                let divisor = if rtt.rising() { p.d } else { p.d / T::lit(2.0) };
                self.ssthresh = (self.cwnd / divisor).max(p.md_floor());
                self.cwnd = self.ssthresh;
                EchoResponse::Severe
            }
            CongestionLevel::Cl1 if rtt.rising() => {
                self.ssthresh = self.cwnd * (-rtt.beta()).exp();
                self.cwnd = self.ssthresh;
                self.clamp_floor(p);
                EchoResponse::Decay
            }
            CongestionLevel::Cl1 | CongestionLevel::None => EchoResponse::Unchanged,
        }
    }

    /// EECN per-ACK growth: damped slow start, RTT-driven congestion avoidance.
    ///
    /// `allow_decay` gates the congestion-avoidance decay branch; callers that
    /// apply it once per RTT pass `false` on the other ACKs.
    pub fn eecn_on_ack(&mut self, rtt: RttView<T>, p: &WindowParams<T>, allow_decay: bool) {
        if self.in_slow_start() {
            if rtt.rising() {
                self.cwnd = self.cwnd + p.seg_size * p.sigma_ss;
            } else {
                self.cwnd = self.cwnd + p.seg_size;
            }
        } else if rtt.rising() {
            if allow_decay {
                self.cwnd = self.cwnd * (-rtt.beta()).exp();
            }
        } else {
            self.cwnd = self.cwnd + p.seg_size * p.sigma_ca;
        }
        self.clamp_floor(p);
    }

    /// Classic per-ACK growth: one segment in slow start, SZ²/cwnd in avoidance.
    pub fn newreno_on_ack(&mut self, p: &WindowParams<T>) {
        if self.in_slow_start() {
            self.cwnd = self.cwnd + p.seg_size;
        } else {
            self.cwnd = self.cwnd + p.seg_size * p.seg_size / self.cwnd;
        }
    }

    /// Classic multiplicative decrease used for ECN echoes.
    pub fn halve(&mut self, p: &WindowParams<T>) {
        self.ssthresh = (self.cwnd / T::lit(2.0)).max(p.md_floor());
        self.cwnd = self.ssthresh;
    }

    /// Retransmission timeout: half the window becomes ssthresh, restart from one segment.
    pub fn on_timeout(&mut self, p: &WindowParams<T>) {
        self.ssthresh = (self.cwnd / T::lit(2.0)).max(p.md_floor());
        self.cwnd = p.seg_size;
    }

    /// Third duplicate ACK: sets ssthresh and inflates the window by the three
    /// segments that have left the network.
    pub fn on_triple_dupack(&mut self, p: &WindowParams<T>) {
        self.ssthresh = (self.cwnd / T::lit(2.0)).max(p.md_floor());
        self.cwnd = self.ssthresh + T::lit(3.0) * p.seg_size;
    }
}
