//! Comparison and sweep tables.
//!
//! Values are stored in SI units (seconds, bits per second) and only scaled
//! for the text rendering.

use std::fmt::Write as _;

use eecn_core::engine::FlowClass;
use eecn_core::metrics::SimReport;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Count,
    Percent,
    Seconds,
    Bps,
    Fraction,
}

#[derive(Debug, Clone, Copy)]
pub struct Column {
    pub name: &'static str,
    pub unit: Unit,
}

const fn col(name: &'static str, unit: Unit) -> Column {
    Column { name, unit }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub label_name: &'static str,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

pub const COMPARE_COLUMNS: [Column; 13] = [
    col("packets_sent", Unit::Count),
    col("packets_dropped", Unit::Count),
    col("drop_pct", Unit::Percent),
    col("packets_marked", Unit::Count),
    col("marks_cl1", Unit::Count),
    col("marks_cl2", Unit::Count),
    col("ef_fct_s", Unit::Seconds),
    col("ef_goodput_bps", Unit::Bps),
    col("ef_e2e_delay_s", Unit::Seconds),
    col("sf_fct_s", Unit::Seconds),
    col("sf_goodput_bps", Unit::Bps),
    col("sf_e2e_delay_s", Unit::Seconds),
    col("jain", Unit::Fraction),
];

pub const SWEEP_COLUMNS: [Column; 7] = [
    col("th1", Unit::Fraction),
    col("th2", Unit::Fraction),
    col("ef_throughput_bps", Unit::Bps),
    col("sf_throughput_bps", Unit::Bps),
    col("packets_dropped", Unit::Count),
    col("ef_e2e_delay_s", Unit::Seconds),
    col("sf_e2e_delay_s", Unit::Seconds),
];

fn class_values(r: &SimReport, class: FlowClass) -> [Option<f64>; 3] {
    let c = r.class(class);
    [c.mean_fct_s, c.mean_goodput_bps, c.mean_e2e_delay_s]
}

pub fn compare_row(label: &str, r: &SimReport) -> Row {
    let t = &r.totals;
    let mut values = vec![
        Some(t.packets_sent as f64),
        Some(t.packets_dropped as f64),
        Some(t.drop_pct),
        Some(t.packets_marked as f64),
        Some(t.marks_cl1 as f64),
        Some(t.marks_cl2 as f64),
    ];
    values.extend(class_values(r, FlowClass::Elephant));
    values.extend(class_values(r, FlowClass::Short));
    values.push(r.jain_elephants);
    Row {
        label: label.to_owned(),
        values,
    }
}

pub fn sweep_row(th1: f64, th2: f64, r: &SimReport) -> Row {
    let [_, ef_goodput, ef_e2e] = class_values(r, FlowClass::Elephant);
    let [_, sf_goodput, sf_e2e] = class_values(r, FlowClass::Short);
    Row {
        label: format!("{th1}:{th2}"),
        values: vec![
            Some(th1),
            Some(th2),
            ef_goodput,
            sf_goodput,
            Some(r.totals.packets_dropped as f64),
            ef_e2e,
            sf_e2e,
        ],
    }
}

/// `(baseline - subject) / baseline` in percent, per column; undefined when the
/// baseline is zero or either side is missing.
pub fn reduction(subject: &Row, baseline: &Row) -> Row {
    let values = subject
        .values
        .iter()
        .zip(&baseline.values)
        .map(|(s, b)| match (*s, *b) {
            (Some(s), Some(b)) if b != 0.0 => Some((b - s) / b * 100.0),
            _ => None,
        })
        .collect();
    Row {
        label: format!("{}_vs_{}", subject.label, baseline.label),
        values,
    }
}

impl Table {
    pub fn new(label_name: &'static str, columns: &[Column]) -> Self {
        Self {
            label_name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Row) {
        assert_eq!(row.values.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: std::io::Write>(&self, w: &mut csv::Writer<W>) -> csv::Result<()> {
        for row in &self.rows {
            let mut rec = vec![row.label.clone()];
            rec.extend(
                row.values
                    .iter()
                    .map(|v| v.map(|x| x.to_string()).unwrap_or_default()),
            );
            w.write_record(&rec)?;
        }
        Ok(())
    }

    pub fn csv_header(&self) -> Vec<&'static str> {
        std::iter::once(self.label_name)
            .chain(self.columns.iter().map(|c| c.name))
            .collect()
    }

    /// Fixed-width text rendering with human units.
    pub fn render(&self, percent: bool) -> String {
        let mut cells: Vec<Vec<String>> = vec![std::iter::once(self.label_name.to_owned())
            .chain(self.columns.iter().map(|c| header(c, percent)))
            .collect()];
        for row in &self.rows {
            let mut line = vec![row.label.clone()];
            for (c, v) in self.columns.iter().zip(&row.values) {
                line.push(match v {
                    None => "-".to_owned(),
                    Some(x) if percent => format!("{x:.1}"),
                    Some(x) => human(c.unit, *x),
                });
            }
            cells.push(line);
        }
        let widths: Vec<usize> = (0..cells[0].len())
            .map(|i| cells.iter().map(|l| l[i].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for line in cells {
            for (i, (cell, w)) in line.iter().zip(&widths).enumerate() {
                if i == 0 {
                    let _ = write!(out, "{cell:<w$}");
                } else {
                    let _ = write!(out, "  {cell:>w$}");
                }
            }
            out.push('\n');
        }
        out
    }
}

fn header(c: &Column, percent: bool) -> String {
    let base = c
        .name
        .trim_end_matches("_bps")
        .trim_end_matches("_s")
        .trim_end_matches("_pct");
    match (percent, c.unit) {
        (true, _) => format!("{base}(%)"),
        (false, Unit::Seconds) => format!("{base}(ms)"),
        (false, Unit::Bps) => format!("{base}(Mb/s)"),
        (false, Unit::Percent) => format!("{base}(%)"),
        (false, _) => base.to_owned(),
    }
}

fn human(unit: Unit, x: f64) -> String {
    match unit {
        Unit::Count => format!("{x:.0}"),
        Unit::Percent => format!("{x:.3}"),
        Unit::Seconds => format!("{:.3}", x * 1e3),
        Unit::Bps => format!("{:.3}", x / 1e6),
        Unit::Fraction => format!("{x:.4}"),
    }
}

struct RowView<'a>(&'a Table, &'a Row);

impl Serialize for RowView<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (table, row) = (self.0, self.1);
        let mut m = s.serialize_map(Some(row.values.len() + 1))?;
        m.serialize_entry(table.label_name, &row.label)?;
        for (c, v) in table.columns.iter().zip(&row.values) {
            m.serialize_entry(c.name, v)?;
        }
        m.end()
    }
}

struct RowsView<'a>(&'a Table);

impl Serialize for RowsView<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.rows.iter().map(|r| RowView(self.0, r)))
    }
}

/// Output of `compare`.
pub struct Comparison {
    pub scenario: String,
    pub seed: u64,
    pub rows: Table,
    /// Percent reductions of EECN against each baseline; empty unless EECN and
    /// at least one other algorithm ran.
    pub reductions: Table,
}

impl Serialize for Comparison {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Comparison", 4)?;
        st.serialize_field("scenario", &self.scenario)?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("rows", &RowsView(&self.rows))?;
        st.serialize_field("reductions_pct", &RowsView(&self.reductions))?;
        st.end()
    }
}

/// Output of `sweep`.
pub struct Sweep {
    pub scenario: String,
    pub seed: u64,
    pub rows: Table,
}

impl Serialize for Sweep {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Sweep", 3)?;
        st.serialize_field("scenario", &self.scenario)?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("rows", &RowsView(&self.rows))?;
        st.end()
    }
}
