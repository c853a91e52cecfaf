use crate::time::{SimDuration, SimTime};

/// Arrival and departure counters over fixed measurement epochs.
///
/// Rates reported are those of the most recently completed epoch. An epoch in
/// which nothing happened still completes, so rates decay to zero on idle links.
#[derive(Debug, Clone)]
pub struct RateEstimator {
    epoch_len: SimDuration,
    epoch_start: SimTime,
    window_arrivals: u64,
    window_departures: u64,
    arrival_rate: f64,
    departure_rate: f64,
}

impl RateEstimator {
    pub fn new(epoch_len: SimDuration) -> Self {
        assert!(
            epoch_len > SimDuration::ZERO,
            "epoch length must be positive"
        );
        Self {
            epoch_len,
            epoch_start: SimTime::ZERO,
            window_arrivals: 0,
            window_departures: 0,
            arrival_rate: 0.0,
            departure_rate: 0.0,
        }
    }

    pub fn epoch_len(&self) -> SimDuration {
        self.epoch_len
    }

    /// Closes every epoch that ended at or before `now`.
    pub fn observe(&mut self, now: SimTime) {
        let elapsed = now.saturating_since(self.epoch_start).as_nanos();
        let len = self.epoch_len.as_nanos();
        let closed = elapsed / len;
        if closed == 0 {
            return;
        }
        let secs = self.epoch_len.as_secs_f64();
        if closed == 1 {
            self.arrival_rate = self.window_arrivals as f64 / secs;
            self.departure_rate = self.window_departures as f64 / secs;
        } else {
            self.arrival_rate = 0.0;
            self.departure_rate = 0.0;
        }
        self.window_arrivals = 0;
        self.window_departures = 0;
        self.epoch_start += SimDuration::from_nanos(closed * len);
    }

    pub fn record_arrival(&mut self, now: SimTime) {
        self.observe(now);
        self.window_arrivals += 1;
    }

    pub fn record_departure(&mut self, now: SimTime) {
        self.observe(now);
        self.window_departures += 1;
    }

    /// Packets per second over the last completed epoch.
    pub fn arrival_rate(&self) -> f64 {
        self.arrival_rate
    }

    pub fn departure_rate(&self) -> f64 {
        self.departure_rate
    }

    /// Overrides the measured rates until the next epoch boundary. Used for replays.
    pub fn set_rates(&mut self, arrival_rate: f64, departure_rate: f64) {
        assert!(arrival_rate >= 0.0 && departure_rate >= 0.0);
        self.arrival_rate = arrival_rate;
        self.departure_rate = departure_rate;
    }
}
