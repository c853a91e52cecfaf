//! Run statistics, fairness, report export and event traces.

mod export;
mod fairness;
mod report;
mod series;
mod trace;

pub use export::{export, import, ExportFormat};
pub use fairness::{jain_fairness, FairnessError};
pub use report::{
    summarize, ClassSummary, Conservation, FlowRecord, FlowStats, QueueRecord, QueueStats, RunData,
    SimReport, Totals,
};
pub use series::{BucketSeries, Distribution};
pub use trace::{TraceLog, TraceRecord, TRACE_HEADER};

/// Bucket width for exported time series, seconds.
pub const SERIES_BUCKET_S: f64 = 0.01;
