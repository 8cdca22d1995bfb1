use std::io::Write;

use serde_json::{Map, Value};

use super::meta::RunMeta;
use crate::bilinear::ScanRow;
use crate::error::Result;
use crate::sqfree::{ErrorRecord, SweepRecord};

/// Rows of display strings under a header. Floats use the shortest
/// round-trip form, so rendering is deterministic.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(ToString::to_string).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width does not match header"
        );
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, meta: &RunMeta, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(
            RunMeta::header()
                .iter()
                .copied()
                .chain(self.header.iter().map(String::as_str)),
        )?;
        let stamp = meta.fields();
        for row in &self.rows {
            out.write_record(stamp.iter().chain(row.iter()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, meta: &RunMeta, mut w: W) -> Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .cloned()
                    .zip(row.iter().map(|c| json_cell(c)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "meta": meta, "rows": rows });
        serde_json::to_writer_pretty(&mut w, &doc)?;
        w.write_all(b"\n")?;
        Ok(())
    }
}

fn json_cell(c: &str) -> Value {
    if let Ok(i) = c.parse::<i64>() {
        return Value::from(i);
    }
    if let Ok(b) = c.parse::<bool>() {
        return Value::from(b);
    }
    match c.parse::<f64>() {
        Ok(f) if f.is_finite() => Value::from(f),
        _ => Value::from(c),
    }
}

pub fn scan_table(rows: &[ScanRow]) -> Table {
    let mut t = Table::new(&[
        "q",
        "j",
        "B",
        "b1",
        "b2",
        "b3",
        "b4",
        "h",
        "abs_sigma",
        "ratio",
        "in_diagonal",
    ]);
    for r in rows {
        t.push(vec![
            r.q.to_string(),
            r.j.to_string(),
            r.big_b.to_string(),
            r.b1.to_string(),
            r.b2.to_string(),
            r.b3.to_string(),
            r.b4.to_string(),
            r.h.to_string(),
            r.abs_sigma.to_string(),
            r.ratio.to_string(),
            r.in_diagonal.to_string(),
        ]);
    }
    t
}

pub fn error_table(rows: &[ErrorRecord]) -> Table {
    let mut t = Table::new(&[
        "X",
        "q",
        "a",
        "E_direct",
        "E_decomp",
        "hooley_bound",
        "ratio",
    ]);
    for r in rows {
        t.push(vec![
            r.x.to_string(),
            r.q.to_string(),
            r.a.to_string(),
            r.e_direct.to_string(),
            r.e_decomp.to_string(),
            r.hooley_bound.to_string(),
            r.ratio.to_string(),
        ]);
    }
    t
}

pub fn sweep_table(rows: &[SweepRecord], a_list: &[f64]) -> Table {
    let mut header: Vec<String> = [
        "X",
        "theta",
        "q",
        "a",
        "E_direct",
        "E_decomp",
        "max_abs_E",
        "hooley_bound",
        "ratio",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(a_list.iter().map(|a| format!("X_over_q_log^{a}")));
    header.push("headline_exponent".into());
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for r in rows {
        let mut row = vec![
            r.x.to_string(),
            r.theta.clone(),
            r.q.to_string(),
            r.a.to_string(),
            r.e_direct.to_string(),
            r.e_decomp.to_string(),
            r.max_abs_e.to_string(),
            r.hooley_bound.to_string(),
            r.ratio.to_string(),
        ];
        row.extend(r.log_columns.iter().map(|(_, v)| v.to_string()));
        row.push(r.headline.to_string());
        t.push(row);
    }
    t
}
