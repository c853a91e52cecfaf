use serde::{Deserialize, Serialize};

use crate::engine::FlowClass;
use crate::queue::MarkingMode;
use crate::transport::Algorithm;

use super::fairness::jain_fairness;
use super::series::{BucketSeries, Distribution};

/// Raw per-flow observations gathered during a run.
#[derive(Debug, Clone)]
pub struct FlowRecord {
    pub id: u32,
    pub class: FlowClass,
    pub algo: Algorithm,
    pub src: String,
    pub dst: String,
    pub size_bytes: u64,
    pub start_s: f64,
    pub completed_at_s: Option<f64>,
    pub delivered_bytes: u64,
    /// `(time, rtt)` samples taken by the data sender.
    pub rtt_samples: Vec<(f64, f64)>,
    pub e2e_delays: Vec<f64>,
    pub cwnd: BucketSeries,
    pub delivered: BucketSeries,
    pub initial_cwnd_segments: Option<u32>,
    pub packets_sent: u64,
    pub data_packets_sent: u64,
    pub bytes_sent: u64,
    pub retransmits: u64,
    pub timeouts: u64,
    pub drops: u64,
    pub drop_bytes: u64,
    pub marks_cl1: u64,
    pub marks_cl2: u64,
    pub mark_bytes: u64,
    pub delivered_packets: u64,
    pub resident_packets: u64,
}

impl FlowRecord {
    pub fn new(id: u32, class: FlowClass, algo: Algorithm, bucket_s: f64) -> Self {
        Self {
            id,
            class,
            algo,
            src: String::new(),
            dst: String::new(),
            size_bytes: 0,
            start_s: 0.0,
            completed_at_s: None,
            delivered_bytes: 0,
            rtt_samples: Vec::new(),
            e2e_delays: Vec::new(),
            cwnd: BucketSeries::new(bucket_s),
            delivered: BucketSeries::new(bucket_s),
            initial_cwnd_segments: None,
            packets_sent: 0,
            data_packets_sent: 0,
            bytes_sent: 0,
            retransmits: 0,
            timeouts: 0,
            drops: 0,
            drop_bytes: 0,
            marks_cl1: 0,
            marks_cl2: 0,
            mark_bytes: 0,
            delivered_packets: 0,
            resident_packets: 0,
        }
    }
}

/// Raw per-queue observations gathered during a run.
#[derive(Debug, Clone)]
pub struct QueueRecord {
    pub id: u32,
    pub name: String,
    pub mode: MarkingMode,
    pub arrivals: u64,
    pub dequeued: u64,
    pub drops: u64,
    pub drop_bytes: u64,
    pub marks_cl1: u64,
    pub marks_cl2: u64,
    pub mark_bytes: u64,
    pub resident: u64,
    pub sojourn: Vec<f64>,
    pub occupancy: BucketSeries,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conservation {
    pub injected: u64,
    pub delivered: u64,
    pub dropped: u64,
    /// Buffered, being transmitted, or propagating when the run ended.
    pub resident: u64,
}

impl Conservation {
    pub fn balanced(&self) -> bool {
        self.injected == self.delivered + self.dropped + self.resident
    }
}

#[derive(Debug, Clone)]
pub struct RunData {
    pub scenario: String,
    pub seed: u64,
    pub algo: String,
    pub end_s: f64,
    pub flows: Vec<FlowRecord>,
    pub queues: Vec<QueueRecord>,
    pub conservation: Conservation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowStats {
    pub flow_id: u32,
    pub class: FlowClass,
    pub algo: Algorithm,
    pub src: String,
    pub dst: String,
    pub size_bytes: u64,
    pub start_s: f64,
    pub completed: bool,
    /// Seconds from the first SYN to the last byte delivered.
    pub fct_s: Option<f64>,
    pub delivered_bytes: u64,
    /// Delivered bits over the FCT, or over the time the flow was active if unfinished.
    pub goodput_bps: f64,
    pub mean_rtt_s: Option<f64>,
    /// Mean absolute difference of consecutive RTT samples.
    pub jitter_s: Option<f64>,
    pub e2e_delay: Distribution,
    pub initial_cwnd_segments: Option<u32>,
    pub packets_sent: u64,
    pub data_packets_sent: u64,
    pub bytes_sent: u64,
    pub retransmits: u64,
    pub timeouts: u64,
    pub drops: u64,
    pub marks_cl1: u64,
    pub marks_cl2: u64,
    pub delivered_packets: u64,
    pub resident_packets: u64,
    pub rtt_series: BucketSeries,
    pub cwnd_series: BucketSeries,
    pub delivered_series: BucketSeries,
}

impl FlowStats {
    /// Goodput over `[t0, t1]` from the delivered-bytes series.
    pub fn window_goodput_bps(&self, t0: f64, t1: f64) -> f64 {
        assert!(t1 > t0);
        let at = |t| self.delivered_series.value_at(t).unwrap_or(0.0);
        (at(t1) - at(t0)) * 8.0 / (t1 - t0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueStats {
    pub queue_id: u32,
    pub name: String,
    pub mode: MarkingMode,
    pub arrivals: u64,
    pub dequeued: u64,
    pub drops: u64,
    pub marks_cl1: u64,
    pub marks_cl2: u64,
    pub resident: u64,
    pub sojourn: Distribution,
    pub occupancy_series: BucketSeries,
}

impl QueueStats {
    pub fn marks(&self) -> u64 {
        self.marks_cl1 + self.marks_cl2
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub packets_sent: u64,
    pub bytes_sent: u64,
    pub packets_dropped: u64,
    pub bytes_dropped: u64,
    pub packets_marked: u64,
    pub marks_cl1: u64,
    pub marks_cl2: u64,
    pub bytes_marked: u64,
    /// Dropped over sent, percent.
    pub drop_pct: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub flows: u32,
    pub completed: u32,
    pub mean_fct_s: Option<f64>,
    pub mean_goodput_bps: Option<f64>,
    pub mean_e2e_delay_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub scenario: String,
    pub seed: u64,
    pub algo: String,
    pub end_s: f64,
    pub totals: Totals,
    pub elephant: ClassSummary,
    pub short: ClassSummary,
    /// Jain index over elephant goodputs, if defined.
    pub jain_elephants: Option<f64>,
    pub conservation: Conservation,
    pub flows: Vec<FlowStats>,
    pub queues: Vec<QueueStats>,
}

impl SimReport {
    pub fn flows_of(&self, class: FlowClass) -> impl Iterator<Item = &FlowStats> {
        self.flows.iter().filter(move |f| f.class == class)
    }

    pub fn class(&self, class: FlowClass) -> &ClassSummary {
        match class {
            FlowClass::Elephant => &self.elephant,
            FlowClass::Short => &self.short,
        }
    }
}

fn mean(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (mut n, mut sum) = (0usize, 0.0);
    for x in xs {
        n += 1;
        sum += x;
    }
    (n > 0).then(|| sum / n as f64)
}

fn flow_stats(r: &FlowRecord, end_s: f64) -> FlowStats {
    let fct_s = r.completed_at_s.map(|t| t - r.start_s);
    let active = fct_s.unwrap_or(end_s - r.start_s);
    let goodput_bps = if active > 0.0 {
        r.delivered_bytes as f64 * 8.0 / active
    } else {
        0.0
    };
    let mut rtt_series = BucketSeries::new(r.cwnd.bucket_s);
    for &(t, v) in &r.rtt_samples {
        rtt_series.record(t, v);
    }
    let jitter_s = mean(r.rtt_samples.windows(2).map(|w| (w[1].1 - w[0].1).abs()));
    FlowStats {
        flow_id: r.id,
        class: r.class,
        algo: r.algo,
        src: r.src.clone(),
        dst: r.dst.clone(),
        size_bytes: r.size_bytes,
        start_s: r.start_s,
        completed: fct_s.is_some(),
        fct_s,
        delivered_bytes: r.delivered_bytes,
        goodput_bps,
        mean_rtt_s: mean(r.rtt_samples.iter().map(|s| s.1)),
        jitter_s,
        e2e_delay: Distribution::from_samples(&r.e2e_delays),
        initial_cwnd_segments: r.initial_cwnd_segments,
        packets_sent: r.packets_sent,
        data_packets_sent: r.data_packets_sent,
        bytes_sent: r.bytes_sent,
        retransmits: r.retransmits,
        timeouts: r.timeouts,
        drops: r.drops,
        marks_cl1: r.marks_cl1,
        marks_cl2: r.marks_cl2,
        delivered_packets: r.delivered_packets,
        resident_packets: r.resident_packets,
        rtt_series,
        cwnd_series: r.cwnd.clone(),
        delivered_series: r.delivered.clone(),
    }
}

fn class_summary(flows: &[FlowStats], records: &[FlowRecord], class: FlowClass) -> ClassSummary {
    let members: Vec<usize> = (0..flows.len())
        .filter(|&i| flows[i].class == class)
        .collect();
    let all_e2e: Vec<f64> = members
        .iter()
        .flat_map(|&i| records[i].e2e_delays.iter().copied())
        .collect();
    ClassSummary {
        flows: members.len() as u32,
        completed: members.iter().filter(|&&i| flows[i].completed).count() as u32,
        mean_fct_s: mean(members.iter().filter_map(|&i| flows[i].fct_s)),
        mean_goodput_bps: mean(members.iter().map(|&i| flows[i].goodput_bps)),
        mean_e2e_delay_s: mean(all_e2e),
    }
}

/// Aggregates raw run observations into the report.
pub fn summarize(run: &RunData) -> SimReport {
    let flows: Vec<FlowStats> = run.flows.iter().map(|r| flow_stats(r, run.end_s)).collect();
    let queues: Vec<QueueStats> = run
        .queues
        .iter()
        .map(|q| QueueStats {
            queue_id: q.id,
            name: q.name.clone(),
            mode: q.mode,
            arrivals: q.arrivals,
            dequeued: q.dequeued,
            drops: q.drops,
            marks_cl1: q.marks_cl1,
            marks_cl2: q.marks_cl2,
            resident: q.resident,
            sojourn: Distribution::from_samples(&q.sojourn),
            occupancy_series: q.occupancy.clone(),
        })
        .collect();

    let mut totals = Totals::default();
    for r in &run.flows {
        totals.packets_sent += r.packets_sent;
        totals.bytes_sent += r.bytes_sent;
    }
    for q in &run.queues {
        totals.packets_dropped += q.drops;
        totals.bytes_dropped += q.drop_bytes;
        totals.marks_cl1 += q.marks_cl1;
        totals.marks_cl2 += q.marks_cl2;
        totals.bytes_marked += q.mark_bytes;
    }
    totals.packets_marked = totals.marks_cl1 + totals.marks_cl2;
    totals.drop_pct = if totals.packets_sent > 0 {
        totals.packets_dropped as f64 / totals.packets_sent as f64 * 100.0
    } else {
        0.0
    };

    let elephant_goodputs: Vec<f64> = flows
        .iter()
        .filter(|f| f.class == FlowClass::Elephant)
        .map(|f| f.goodput_bps)
        .collect();

    SimReport {
        scenario: run.scenario.clone(),
        seed: run.seed,
        algo: run.algo.clone(),
        end_s: run.end_s,
        totals,
        elephant: class_summary(&flows, &run.flows, FlowClass::Elephant),
        short: class_summary(&flows, &run.flows, FlowClass::Short),
        jain_elephants: jain_fairness(&elephant_goodputs).ok(),
        conservation: run.conservation,
        flows,
        queues,
    }
}
