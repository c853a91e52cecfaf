use serde::{Deserialize, Serialize};

/// Estimator for the average RTT the window algorithms compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AvgRttKind {
    /// EWMA with gain 1/8; the first sample initializes it.
    #[default]
    Ewma,
    /// Arithmetic mean of every sample.
    RunningMean,
}

/// RTT state in seconds: current sample, average, and the RTO estimator.
#[derive(Debug, Clone)]
pub struct RttEstimator {
    kind: AvgRttKind,
    cur: Option<f64>,
    avg: f64,
    samples: u64,
    srtt: f64,
    rttvar: f64,
    min_rto: f64,
    max_rto: f64,
    rto: f64,
}

const EWMA_GAIN: f64 = 1.0 / 8.0;

impl RttEstimator {
    pub fn new(kind: AvgRttKind, initial_rto: f64, min_rto: f64) -> Self {
        Self {
            kind,
            cur: None,
            avg: 0.0,
            samples: 0,
            srtt: 0.0,
            rttvar: 0.0,
            min_rto,
            max_rto: 60.0,
            rto: initial_rto,
        }
    }

    pub fn on_sample(&mut self, sample: f64) {
        debug_assert!(sample > 0.0);
        self.cur = Some(sample);
        if self.samples == 0 {
            self.avg = sample;
            self.srtt = sample;
            self.rttvar = sample / 2.0;
        } else {
            self.avg = match self.kind {
                AvgRttKind::Ewma => self.avg + EWMA_GAIN * (sample - self.avg),
                AvgRttKind::RunningMean => {
                    (self.avg * self.samples as f64 + sample) / (self.samples + 1) as f64
                }
            };
            self.rttvar = 0.75 * self.rttvar + 0.25 * (self.srtt - sample).abs();
            self.srtt = 0.875 * self.srtt + 0.125 * sample;
        }
        self.samples += 1;
        self.rto = (self.srtt + 4.0 * self.rttvar).clamp(self.min_rto, self.max_rto);
    }

    pub fn cur(&self) -> Option<f64> {
        self.cur
    }

    /// Zero before the first sample.
    pub fn avg(&self) -> f64 {
        self.avg
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn rto(&self) -> f64 {
        self.rto
    }

    pub fn backoff(&mut self) {
        self.rto = (self.rto * 2.0).min(self.max_rto);
    }
}
