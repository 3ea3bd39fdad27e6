//! CSV and JSON layouts of the norm table, ε profiles and figure data.

use std::io::Read;

use ehbal_core::epsilon::EpsilonProfile;
use ehbal_core::moments::{MonomialNormTable, NormEntry, NormMethod};
use ehbal_core::obstruction::ObstructionReport;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{AppError, Result};

pub const NORMS_HEADER: [&str; 5] = ["j", "k", "m", "logN", "method"];
pub const EPSILON_HEADER: [&str; 6] = ["m", "x", "y", "epsilon", "tail_estimate", "Dmax"];
pub const FIGURE_HEADER: [&str; 2] = ["x", "f"];

/// Seventeen significant digits, enough to round-trip any f64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_string(op: &'static str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |source| AppError::Csv { op, source };
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    let bytes = w.into_inner().map_err(|e| AppError::invalid(op, e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn norm_table_csv(table: &MonomialNormTable) -> Result<String> {
    let m = table.level().to_string();
    csv_string(
        "io::write_norm_table",
        &NORMS_HEADER,
        table.entries().map(|e| {
            vec![e.j.to_string(), e.k.to_string(), m.clone(), fmt17(e.log_norm), e.method.as_str().to_string()]
        }),
    )
}

#[derive(Debug, Deserialize)]
struct NormRecord {
    j: u32,
    k: u32,
    m: u32,
    #[serde(rename = "logN")]
    log_n: f64,
    method: String,
}

/// Parse a norm table written by [`norm_table_csv`], in any row order.
pub fn read_norm_table_csv<R: Read>(reader: R) -> Result<MonomialNormTable> {
    const OP: &str = "io::read_norm_table";
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(|source| AppError::Csv { op: OP, source })?;
    if headers.iter().ne(NORMS_HEADER) {
        return Err(AppError::invalid(OP, format!("expected header {}", NORMS_HEADER.join(","))));
    }
    let mut level = None;
    let mut entries = Vec::new();
    for rec in rdr.deserialize::<NormRecord>() {
        let rec = rec.map_err(|source| AppError::Csv { op: OP, source })?;
        if *level.get_or_insert(rec.m) != rec.m {
            return Err(AppError::invalid(OP, "rows disagree on m"));
        }
        let method = NormMethod::parse(&rec.method)
            .ok_or_else(|| AppError::invalid(OP, format!("unknown method {:?}", rec.method)))?;
        entries.push(NormEntry { j: rec.j, k: rec.k, log_norm: rec.log_n, method });
    }
    let m = level.ok_or_else(|| AppError::invalid(OP, "table has no rows"))?;
    Ok(MonomialNormTable::from_entries(m, &entries)?)
}

pub fn epsilon_profile_csv(profile: &EpsilonProfile) -> Result<String> {
    let m = profile.m.to_string();
    csv_string(
        "io::write_epsilon_profile",
        &EPSILON_HEADER,
        profile.samples.iter().map(|s| {
            vec![m.clone(), fmt17(s.x), fmt17(s.y), fmt17(s.epsilon), fmt17(s.tail_estimate), s.degree.to_string()]
        }),
    )
}

pub fn figure_csv(report: &ObstructionReport) -> Result<String> {
    if report.samples.is_empty() {
        return Err(AppError::invalid("obstruction::emit_figure1", "report has no samples"));
    }
    csv_string(
        "obstruction::emit_figure1",
        &FIGURE_HEADER,
        report.samples.iter().map(|s| vec![fmt17(s.x), fmt17(s.f.value())]),
    )
}

#[derive(Debug, Serialize)]
pub struct NormRow {
    pub j: u32,
    pub k: u32,
    pub m: u32,
    #[serde(rename = "logN")]
    pub log_n: f64,
    pub method: &'static str,
}

pub fn norm_rows(table: &MonomialNormTable) -> Vec<NormRow> {
    table
        .entries()
        .map(|e| NormRow { j: e.j, k: e.k, m: table.level(), log_n: e.log_norm, method: e.method.as_str() })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct EpsilonRow {
    pub m: u32,
    pub x: f64,
    pub y: f64,
    pub epsilon: f64,
    pub tail_estimate: f64,
    #[serde(rename = "Dmax")]
    pub dmax: u32,
}

pub fn epsilon_rows(profile: &EpsilonProfile) -> Vec<EpsilonRow> {
    profile
        .samples
        .iter()
        .map(|s| EpsilonRow {
            m: profile.m,
            x: s.x,
            y: s.y,
            epsilon: s.epsilon,
            tail_estimate: s.tail_estimate,
            dmax: s.degree,
        })
        .collect()
}

/// Run parameters attached to every JSON document.
#[derive(Debug, Clone, Default)]
pub struct Metadata(Map<String, Value>);

impl Metadata {
    pub fn new(command: &str) -> Self {
        let mut map = Map::new();
        map.insert("command".into(), command.into());
        map.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        Metadata(map)
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.insert(key.into(), value.into());
        self
    }
}

/// `{"metadata": {...}, <key>: rows, ...extra}` as pretty JSON.
pub fn json_document<T: Serialize>(meta: &Metadata, key: &str, rows: &T, extra: Map<String, Value>) -> Result<String> {
    const OP: &str = "io::write_json";
    let mut doc = Map::new();
    doc.insert("metadata".into(), Value::Object(meta.0.clone()));
    doc.insert(key.into(), serde_json::to_value(rows).map_err(|source| AppError::Json { op: OP, source })?);
    doc.extend(extra);
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).map_err(|source| AppError::Json { op: OP, source })?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ehbal_core::moments::build_table;

    #[test]
    fn norm_table_roundtrip() {
        let t = build_table(2, 6).unwrap();
        let s = norm_table_csv(&t).unwrap();
        assert!(s.starts_with("j,k,m,logN,method\n0,2,2,"));
        assert_eq!(s.lines().count(), 1 + t.len());
        let back = read_norm_table_csv(s.as_bytes()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(read_norm_table_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_norm_table_csv("j,k,m,logN,method\n".as_bytes()).is_err());
        let bad = "j,k,m,logN,method\n1,0,1,0.5,closed-form\n0,1,1,0.6,closed-form\n";
        assert!(read_norm_table_csv(bad.as_bytes()).is_err());
        let odd = "j,k,m,logN,method\n1,0,1,0.5,guess\n0,1,1,0.5,guess\n";
        assert!(read_norm_table_csv(odd.as_bytes()).is_err());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt17(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn json_carries_metadata() {
        let t = build_table(1, 1).unwrap();
        let meta = Metadata::new("norms").with("m", 1).with("dmax", 1);
        let s = json_document(&meta, "rows", &norm_rows(&t), Map::new()).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["metadata"]["command"], "norms");
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        assert_eq!(v["rows"][0]["method"], "closed-form");
    }
}
