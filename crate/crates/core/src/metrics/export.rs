//! Report serialization.
//!
//! CSV is long-form: one `path,value` row per leaf of the JSON document, where
//! `path` uses `a.b[3].c` notation and `value` is the JSON literal. Empty arrays
//! and objects appear as leaves (`[]`, `{}`) so the structure survives a round trip.

use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

use super::report::SimReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Csv,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::UnknownFormat(other.to_owned())),
        }
    }
}

pub fn export(report: &SimReport, format: ExportFormat) -> Result<Vec<u8>> {
    match format {
        ExportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        ExportFormat::Csv => {
            let value = serde_json::to_value(report)?;
            let mut rows = Vec::new();
            flatten(&value, String::new(), &mut rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["path", "value"])?;
            for (path, leaf) in rows {
                w.write_record([path.as_str(), leaf.as_str()])?;
            }
            w.into_inner()
                .map_err(|e| Error::Csv(e.into_error().into()))
        }
    }
}

pub fn import(bytes: &[u8], format: ExportFormat) -> Result<SimReport> {
    match format {
        ExportFormat::Json => Ok(serde_json::from_slice(bytes)?),
        ExportFormat::Csv => {
            let mut r = csv::Reader::from_reader(bytes);
            let mut root = Value::Null;
            for rec in r.records() {
                let rec = rec?;
                let leaf: Value = serde_json::from_str(&rec[1])?;
                insert(&mut root, &parse_path(&rec[0]), leaf);
            }
            Ok(serde_json::from_value(root)?)
        }
    }
}

fn flatten(v: &Value, path: String, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, child) in m {
                let p = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                flatten(child, p, out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, child) in a.iter().enumerate() {
                flatten(child, format!("{path}[{i}]"), out);
            }
        }
        leaf => out.push((path, leaf.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Seg {
    Key(String),
    Index(usize),
}

fn parse_path(p: &str) -> Vec<Seg> {
    let mut segs = Vec::new();
    for part in p.split('.') {
        let (key, mut rest) = match part.find('[') {
            Some(i) => (&part[..i], &part[i..]),
            None => (part, ""),
        };
        if !key.is_empty() {
            segs.push(Seg::Key(key.to_owned()));
        }
        while let Some(end) = rest.find(']') {
            let idx = rest[1..end].parse().expect("numeric index in export path");
            segs.push(Seg::Index(idx));
            rest = &rest[end + 1..];
        }
    }
    segs
}

fn insert(slot: &mut Value, path: &[Seg], leaf: Value) {
    let Some((head, tail)) = path.split_first() else {
        *slot = leaf;
        return;
    };
    match head {
        Seg::Key(k) => {
            if !slot.is_object() {
                *slot = Value::Object(Map::new());
            }
            let m = slot.as_object_mut().expect("object");
            insert(m.entry(k.clone()).or_insert(Value::Null), tail, leaf);
        }
        Seg::Index(i) => {
            if !slot.is_array() {
                *slot = Value::Array(Vec::new());
            }
            let a = slot.as_array_mut().expect("array");
            if a.len() <= *i {
                a.resize(*i + 1, Value::Null);
            }
            insert(&mut a[*i], tail, leaf);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_round_trip_generic_value() {
        let v: Value = serde_json::json!({
            "a": 1.5,
            "b": [[0.0, 2.0], [0.01, 3.0]],
            "c": {"d": null, "e": "x,y", "f": []},
            "g": {}
        });
        let mut rows = Vec::new();
        flatten(&v, String::new(), &mut rows);
        let mut root = Value::Null;
        for (p, leaf) in rows {
            insert(
                &mut root,
                &parse_path(&p),
                serde_json::from_str(&leaf).unwrap(),
            );
        }
        assert_eq!(root, v);
    }

    #[test]
    fn unknown_format() {
        assert!(matches!(
            "xml".parse::<ExportFormat>(),
            Err(Error::UnknownFormat(_))
        ));
    }
}
