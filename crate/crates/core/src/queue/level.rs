//! Queue-occupancy congestion estimator and the two-threshold classifier.

use serde::{Deserialize, Serialize};

use crate::codepoint::CongestionLevel;
use crate::error::ConfigError;
use crate::num::Scalar;

/// Projected queue fill over the next 100 ms as a fraction of capacity.
///
/// `arrival_rate` and `departure_rate` are packets per second; dividing each by
/// ten gives the expected packet delta over the 100 ms horizon. The result is
/// clamped to `[0, 1]`.
pub fn congestion_level_value<T: Scalar>(
    occupancy: T,
    capacity: T,
    arrival_rate: T,
    departure_rate: T,
) -> T {
    debug_assert!(capacity > T::zero());
    let delta = arrival_rate / T::ten() - departure_rate / T::ten();
    ((occupancy + delta) / capacity).clamp_unit()
}

/// Marking thresholds, `0 < th1 < th2 < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds<T> {
    pub th1: T,
    pub th2: T,
}

impl<T: Scalar> Thresholds<T> {
    pub fn new(th1: T, th2: T) -> Result<Self, ConfigError> {
        if !(T::zero() < th1 && th1 < th2 && th2 < T::one()) {
            return Err(ConfigError::new(
                "queue.th1",
                format!("thresholds must satisfy 0 < th1 < th2 < 1 (got {th1:?}, {th2:?})"),
            ));
        }
        Ok(Self { th1, th2 })
    }

    /// `level < th1` is uncongested, `th1 <= level < th2` is CL1, `level >= th2` is CL2.
    pub fn classify(&self, level: T) -> CongestionLevel {
        if level >= self.th2 {
            CongestionLevel::Cl2
        } else if level >= self.th1 {
            CongestionLevel::Cl1
        } else {
            CongestionLevel::None
        }
    }
}

impl Default for Thresholds<f64> {
    fn default() -> Self {
        Self { th1: 0.3, th2: 0.5 }
    }
}

impl Default for Thresholds<f32> {
    fn default() -> Self {
        Self { th1: 0.3, th2: 0.5 }
    }
}
