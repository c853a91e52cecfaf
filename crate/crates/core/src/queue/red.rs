//! Random Early Detection in packet mode.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::time::{SimDuration, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedParams {
    /// Packets.
    pub min_th: f64,
    /// Packets.
    pub max_th: f64,
    pub max_p: f64,
    /// EWMA weight of the average queue estimate.
    pub weight: f64,
}

impl Default for RedParams {
    fn default() -> Self {
        Self {
            min_th: 30.0,
            max_th: 60.0,
            max_p: 0.1,
            weight: 0.002,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RedDecision {
    Pass,
    /// Probabilistic drop/mark between the thresholds.
    Early,
    /// Average above `max_th`.
    Forced,
}

#[derive(Debug, Clone)]
pub struct RedState {
    params: RedParams,
    avg: f64,
    count: u64,
    idle_since: Option<SimTime>,
}

impl RedState {
    pub fn new(params: RedParams) -> Self {
        Self {
            params,
            avg: 0.0,
            count: 0,
            idle_since: Some(SimTime::ZERO),
        }
    }

    pub fn avg(&self) -> f64 {
        self.avg
    }

    /// Folds the instantaneous queue length into the average. After an idle
    /// period the average decays as if `idle / service_time` empty samples arrived.
    pub fn update_avg(&mut self, occupancy: usize, now: SimTime, service_time: SimDuration) {
        let w = self.params.weight;
        if let Some(since) = self.idle_since.take() {
            let idle = now.saturating_since(since).as_nanos() as f64;
            let m = idle / service_time.as_nanos().max(1) as f64;
            self.avg *= (1.0 - w).powf(m);
        }
        self.avg = (1.0 - w) * self.avg + w * occupancy as f64;
    }

    pub fn mark_idle(&mut self, now: SimTime) {
        self.idle_since = Some(now);
    }

    pub fn decide<R: Rng + ?Sized>(&mut self, rng: &mut R) -> RedDecision {
        let RedParams {
            min_th,
            max_th,
            max_p,
            ..
        } = self.params;
        if self.avg < min_th {
            self.count = 0;
            return RedDecision::Pass;
        }
        if self.avg >= max_th {
            self.count = 0;
            return RedDecision::Forced;
        }
        self.count += 1;
        let pb = max_p * (self.avg - min_th) / (max_th - min_th);
        let denom = 1.0 - self.count as f64 * pb;
        let pa = if denom <= 0.0 {
            1.0
        } else {
            (pb / denom).min(1.0)
        };
        if rng.gen::<f64>() < pa {
            self.count = 0;
            RedDecision::Early
        } else {
            RedDecision::Pass
        }
    }
}
