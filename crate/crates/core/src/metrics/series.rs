use serde::{Deserialize, Serialize};

/// Time series down-sampled to fixed buckets, keeping the last value seen in each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketSeries {
    pub bucket_s: f64,
    /// `[bucket start (s), value]`, increasing in time.
    pub points: Vec<[f64; 2]>,
}

impl BucketSeries {
    pub fn new(bucket_s: f64) -> Self {
        assert!(bucket_s > 0.0);
        Self {
            bucket_s,
            points: Vec::new(),
        }
    }

    fn bucket_start(&self, t: f64) -> f64 {
        (t / self.bucket_s).floor() * self.bucket_s
    }

    pub fn record(&mut self, t: f64, value: f64) {
        let start = self.bucket_start(t);
        match self.points.last_mut() {
            Some(last) if last[0] == start => last[1] = value,
            Some(last) => {
                debug_assert!(last[0] < start, "series times must not go backwards");
                self.points.push([start, value]);
            }
            None => self.points.push([start, value]),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Value in effect at `t`: the last point at or before it.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let i = self.points.partition_point(|p| p[0] <= t);
        (i > 0).then(|| self.points[i - 1][1])
    }
}

/// Summary of a sample of non-negative durations, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Distribution {
    pub count: u64,
    pub mean: f64,
    pub min: f64,
    pub p50: f64,
    pub p95: f64,
    pub p99: f64,
    pub max: f64,
}

impl Distribution {
    pub fn from_samples(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return Self::default();
        }
        let mut v = samples.to_vec();
        v.sort_by(f64::total_cmp);
        let rank = |q: f64| {
            let k = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
            v[k - 1]
        };
        Self {
            count: v.len() as u64,
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v[0],
            p50: rank(0.50),
            p95: rank(0.95),
            p99: rank(0.99),
            max: v[v.len() - 1],
        }
    }
}
