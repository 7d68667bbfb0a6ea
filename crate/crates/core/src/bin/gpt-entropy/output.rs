use std::io::Write;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Scalar fields, optionally followed by a table.
#[derive(Debug, Default)]
pub struct Report {
    pub fields: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// Floats carry ten decimals in every format; non-finite values become
/// strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        let rounded: f64 = format!("{x:.10}").parse().expect("formatted float");
        Number::from_f64(if rounded == 0.0 { 0.0 } else { rounded }).map_or(Value::Null, Value::Number)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

/// Rounds every float inside a serialized report.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().expect("f64")),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

impl Report {
    pub fn field(mut self, key: &str, value: Value) -> Self {
        self.fields.push((key.to_string(), normalize(value)));
        self
    }

    /// Fields from the top-level keys of a serializable struct, in
    /// declaration order.
    pub fn from_struct<T: serde::Serialize>(value: &T) -> Self {
        let mut report = Report::default();
        if let Value::Object(o) = serde_json::to_value(value).expect("report serializes") {
            for (k, v) in o {
                report.fields.push((k, normalize(v)));
            }
        }
        report
    }

    pub fn table(mut self, columns: &[&str], rows: Vec<Vec<Value>>) -> Self {
        self.columns = columns.iter().map(|c| c.to_string()).collect();
        self.rows = rows.into_iter().map(|r| r.into_iter().map(normalize).collect()).collect();
        self
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                let mut obj = Map::new();
                for (k, v) in &self.fields {
                    obj.insert(k.clone(), v.clone());
                }
                if !self.columns.is_empty() {
                    let rows = self
                        .rows
                        .iter()
                        .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect()))
                        .collect();
                    obj.insert("rows".into(), Value::Array(rows));
                }
                serde_json::to_writer_pretty(&mut *out, &Value::Object(obj))?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().flexible(true).from_writer(&mut *out);
                if !self.fields.is_empty() {
                    w.write_record(["key", "value"])?;
                    for (k, v) in &self.fields {
                        w.write_record([k.as_str(), &cell(v)])?;
                    }
                }
                if !self.columns.is_empty() {
                    if !self.fields.is_empty() {
                        w.write_record([""])?;
                    }
                    w.write_record(&self.columns)?;
                    for r in &self.rows {
                        w.write_record(r.iter().map(cell))?;
                    }
                }
                w.flush()
            }
            Format::Text => {
                let width = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.fields {
                    writeln!(out, "{k:<width$}  {}", cell(v))?;
                }
                if !self.columns.is_empty() {
                    if !self.fields.is_empty() {
                        writeln!(out)?;
                    }
                    let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
                    let widths: Vec<usize> = (0..self.columns.len())
                        .map(|j| cells.iter().map(|r| r[j].len()).chain([self.columns[j].len()]).max().unwrap_or(0))
                        .collect();
                    let line = |items: Vec<&str>| {
                        let parts: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
                        parts.join("  ").trim_end().to_string()
                    };
                    writeln!(out, "{}", line(self.columns.iter().map(String::as_str).collect()))?;
                    for r in &cells {
                        writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
                    }
                }
                Ok(())
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format!("{:.10}", n.as_f64().expect("f64")),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
