//! Bounded router queue with two-level EECN marking or classic RED/ECN.

mod level;
mod rate;
mod red;

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use level::{congestion_level_value, Thresholds};
pub use rate::RateEstimator;
pub use red::{RedDecision, RedParams, RedState};

use crate::codepoint::{decode_ip_ecn, CongestionLevel, EcnCodepoint, IpEcn};
use crate::error::ConfigError;
use crate::packet::Packet;
use crate::time::{SimDuration, SimTime};

/// How a router treats markable packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkingMode {
    /// RED on the average queue; markable packets get CE instead of an early drop.
    Ecn,
    /// Per-packet two-level marking from the occupancy estimator.
    Eecn,
}

impl MarkingMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ecn => "ecn",
            Self::Eecn => "eecn",
        }
    }
}

/// Raises the level a packet carries to at least `local`.
///
/// Not-capable packets are returned unchanged. A packet never leaves with a
/// lower level than it arrived with.
pub fn apply_local_level(cp: EcnCodepoint, local: CongestionLevel) -> EcnCodepoint {
    if cp == EcnCodepoint::NOT_ECT {
        return cp;
    }
    match cp.level().max(local) {
        CongestionLevel::None => cp,
        CongestionLevel::Cl1 => EcnCodepoint::ECT0,
        CongestionLevel::Cl2 => EcnCodepoint::CE,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueConfig {
    /// Packets.
    pub capacity: u32,
    pub th1: f64,
    pub th2: f64,
    pub red: RedParams,
    pub mode: MarkingMode,
    /// Rate-measurement epoch in seconds.
    pub epoch_s: f64,
}

impl Default for QueueConfig {
    fn default() -> Self {
        Self {
            capacity: 100,
            th1: 0.3,
            th2: 0.5,
            red: RedParams::default(),
            mode: MarkingMode::Eecn,
            epoch_s: 0.1,
        }
    }
}

impl QueueConfig {
    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if self.capacity == 0 {
            return Err(ConfigError::new(
                format!("{path}.capacity"),
                "queue capacity must be positive",
            ));
        }
        Thresholds::new(self.th1, self.th2)
            .map_err(|e| ConfigError::new(format!("{path}.th1"), e.message))?;
        let red = &self.red;
        if !(red.min_th >= 0.0 && red.min_th < red.max_th) {
            return Err(ConfigError::new(
                format!("{path}.red.min_th"),
                "RED thresholds must satisfy 0 <= min_th < max_th",
            ));
        }
        if !(red.max_p > 0.0 && red.max_p <= 1.0) {
            return Err(ConfigError::new(
                format!("{path}.red.max_p"),
                "max_p must be in (0, 1]",
            ));
        }
        if !(red.weight > 0.0 && red.weight <= 1.0) {
            return Err(ConfigError::new(
                format!("{path}.red.weight"),
                "weight must be in (0, 1]",
            ));
        }
        if !(self.epoch_s.is_finite() && self.epoch_s > 0.0) {
            return Err(ConfigError::new(
                format!("{path}.epoch_s"),
                "epoch must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DropReason {
    /// Queue full.
    Tail,
    /// RED early drop of a packet that could not be marked.
    Early,
    /// RED average above `max_th`.
    Forced,
}

impl DropReason {
    pub fn name(self) -> &'static str {
        match self {
            Self::Tail => "tail",
            Self::Early => "red-early",
            Self::Forced => "red-forced",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Forward(Packet),
    Drop(DropReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mark {
    pub before: EcnCodepoint,
    pub after: EcnCodepoint,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnqueueOutcome {
    Admitted { mark: Option<Mark> },
    Dropped { packet: Packet, reason: DropReason },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueCounters {
    pub arrivals: u64,
    pub dequeued: u64,
    pub dropped: u64,
    pub marked_cl1: u64,
    pub marked_cl2: u64,
}

#[derive(Debug, Clone)]
struct Queued {
    packet: Packet,
    enqueued_at: SimTime,
}

#[derive(Debug, Clone)]
pub struct RouterQueue {
    capacity: usize,
    thresholds: Thresholds<f64>,
    mode: MarkingMode,
    buf: VecDeque<Queued>,
    rate: RateEstimator,
    red: RedState,
    service_time: SimDuration,
    counters: QueueCounters,
}

impl RouterQueue {
    /// `service_time` is the time to transmit a typical packet on the outgoing
    /// link; RED uses it to age the average across idle periods.
    pub fn new(cfg: &QueueConfig, service_time: SimDuration) -> Result<Self, ConfigError> {
        cfg.validate("queue")?;
        Ok(Self {
            capacity: cfg.capacity as usize,
            thresholds: Thresholds::new(cfg.th1, cfg.th2)?,
            mode: cfg.mode,
            buf: VecDeque::with_capacity(cfg.capacity as usize),
            rate: RateEstimator::new(SimDuration::from_secs_f64(cfg.epoch_s)),
            red: RedState::new(cfg.red),
            service_time,
            counters: QueueCounters::default(),
        })
    }

    pub fn mode(&self) -> MarkingMode {
        self.mode
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn occupancy(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn thresholds(&self) -> Thresholds<f64> {
        self.thresholds
    }

    pub fn counters(&self) -> QueueCounters {
        self.counters
    }

    pub fn red_avg(&self) -> f64 {
        self.red.avg()
    }

    pub fn rates(&self) -> &RateEstimator {
        &self.rate
    }

    pub fn rates_mut(&mut self) -> &mut RateEstimator {
        &mut self.rate
    }

    /// Projected fill fraction from current occupancy and the measured rates.
    pub fn congestion_level_value(&self) -> f64 {
        congestion_level_value(
            self.buf.len() as f64,
            self.capacity as f64,
            self.rate.arrival_rate(),
            self.rate.departure_rate(),
        )
    }

    pub fn classify(&self) -> CongestionLevel {
        self.thresholds.classify(self.congestion_level_value())
    }

    /// Marking/dropping decision for an arriving packet that fits in the buffer.
    pub fn mark_or_forward<R: Rng + ?Sized>(&mut self, mut p: Packet, rng: &mut R) -> Verdict {
        match self.mode {
            MarkingMode::Eecn => {
                if p.ip == EcnCodepoint::NOT_ECT {
                    return match self.red.decide(rng) {
                        RedDecision::Pass => Verdict::Forward(p),
                        RedDecision::Early => Verdict::Drop(DropReason::Early),
                        RedDecision::Forced => Verdict::Drop(DropReason::Forced),
                    };
                }
                if p.ip.level() == CongestionLevel::Cl2 {
                    return Verdict::Forward(p);
                }
                p.ip = apply_local_level(p.ip, self.classify());
                Verdict::Forward(p)
            }
            MarkingMode::Ecn => match self.red.decide(rng) {
                RedDecision::Pass => Verdict::Forward(p),
                RedDecision::Forced => Verdict::Drop(DropReason::Forced),
                RedDecision::Early => match decode_ip_ecn(p.ip) {
                    IpEcn::NotEct => Verdict::Drop(DropReason::Early),
                    IpEcn::Ect0 | IpEcn::Ect1 => {
                        p.ip = EcnCodepoint::CE;
                        Verdict::Forward(p)
                    }
                    IpEcn::Ce => Verdict::Forward(p),
                },
            },
        }
    }

    pub fn enqueue<R: Rng + ?Sized>(
        &mut self,
        p: Packet,
        now: SimTime,
        rng: &mut R,
    ) -> EnqueueOutcome {
        self.rate.record_arrival(now);
        self.counters.arrivals += 1;
        self.red.update_avg(self.buf.len(), now, self.service_time);
        if self.buf.len() >= self.capacity {
            self.counters.dropped += 1;
            return EnqueueOutcome::Dropped {
                packet: p,
                reason: DropReason::Tail,
            };
        }
        let before = p.ip;
        match self.mark_or_forward(p.clone(), rng) {
            Verdict::Drop(reason) => {
                self.counters.dropped += 1;
                EnqueueOutcome::Dropped { packet: p, reason }
            }
            Verdict::Forward(packet) => {
                let after = packet.ip;
                let mark = (after != before).then_some(Mark { before, after });
                if mark.is_some() {
                    match after.level() {
                        CongestionLevel::Cl1 => self.counters.marked_cl1 += 1,
                        CongestionLevel::Cl2 => self.counters.marked_cl2 += 1,
                        CongestionLevel::None => unreachable!("marking never clears a level"),
                    }
                }
                self.buf.push_back(Queued {
                    packet,
                    enqueued_at: now,
                });
                EnqueueOutcome::Admitted { mark }
            }
        }
    }

    /// Removes the head packet and returns it with its sojourn time.
    ///
    /// Panics on an empty queue; the engine only dequeues when a packet is waiting.
    pub fn dequeue(&mut self, now: SimTime) -> (Packet, SimDuration) {
        let q = self
            .buf
            .pop_front()
            .expect("dequeue from an empty router queue");
        self.rate.record_departure(now);
        self.counters.dequeued += 1;
        if self.buf.is_empty() {
            self.red.mark_idle(now);
        }
        (q.packet, now - q.enqueued_at)
    }

    /// Packets currently buffered, head first.
    pub fn iter(&self) -> impl Iterator<Item = &Packet> {
        self.buf.iter().map(|q| &q.packet)
    }
}
