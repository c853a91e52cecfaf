use std::fmt::Write as _;
use std::io::{self, Write};

use crate::time::SimTime;

pub const TRACE_HEADER: &str = "time_s,entity,event,flow,detail";

/// One trace row. `detail` holds space-separated `key=value` pairs and never a comma.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub time: SimTime,
    pub entity: String,
    pub event: &'static str,
    pub flow: Option<u32>,
    pub detail: String,
}

impl TraceRecord {
    pub fn write_csv_row(&self, out: &mut String) {
        let _ = write!(out, "{},{},{},", self.time, self.entity, self.event);
        if let Some(f) = self.flow {
            let _ = write!(out, "{f}");
        }
        let _ = writeln!(out, ",{}", self.detail);
    }

    /// Value of `key` in the detail field.
    pub fn field(&self, key: &str) -> Option<&str> {
        self.detail
            .split(' ')
            .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
    }
}

/// In-memory event trace of one run.
#[derive(Debug, Clone, Default)]
pub struct TraceLog {
    pub records: Vec<TraceRecord>,
}

impl TraceLog {
    pub fn push(&mut self, r: TraceRecord) {
        debug_assert!(!r.detail.contains(','));
        self.records.push(r);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.records.len() + 1));
        s.push_str(TRACE_HEADER);
        s.push('\n');
        for r in &self.records {
            r.write_csv_row(&mut s);
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}
