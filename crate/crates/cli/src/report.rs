//! Report assembly and emission.
//!
//! Every report starts with a header naming the tool, its version, the
//! command and the resolved configuration. Floating-point values are rounded
//! to 15 significant digits before printing, so the text does not claim more
//! than the computation delivers. Worker count and output path are left out
//! of the header because they must not change the bytes of a report.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde_json::{json, Map, Value};

use crate::args::Format;

pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Rounds every float inside a JSON tree in place.
fn round_tree(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round15(x))) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_tree),
        Value::Object(map) => map.values_mut().for_each(round_tree),
        _ => {}
    }
}

pub fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

pub enum Body {
    /// Named fields; nested objects flatten to dotted keys in CSV.
    Record(Value),
    /// Rows under fixed columns, with scalar summary fields.
    Table { columns: Vec<&'static str>, rows: Vec<Vec<Value>>, summary: Value },
}

pub struct Report {
    pub header: Value,
    pub body: Body,
}

impl Report {
    pub fn new(command: &str, config: Value, body: Body) -> Self {
        let header = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config,
        });
        Report { header, body }
    }

    pub fn render(&self, format: Format) -> String {
        let mut header = self.header.clone();
        round_tree(&mut header);
        match format {
            Format::Json => {
                let mut root = Map::new();
                root.insert("header".into(), header);
                match &self.body {
                    Body::Record(v) => {
                        let mut v = v.clone();
                        round_tree(&mut v);
                        root.insert("report".into(), v);
                    }
                    Body::Table { columns, rows, summary } => {
                        let mut summary = summary.clone();
                        round_tree(&mut summary);
                        root.insert("summary".into(), summary);
                        let rows = rows
                            .iter()
                            .map(|row| {
                                let mut obj: Map<String, Value> = columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect();
                                obj.values_mut().for_each(round_tree);
                                Value::Object(obj)
                            })
                            .collect();
                        root.insert("rows".into(), Value::Array(rows));
                    }
                }
                let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("JSON values always serialize");
                text.push('\n');
                text
            }
            Format::Csv => {
                let mut out = String::new();
                out.push_str(&format!("# {} {}\n", self.header["tool"].as_str().unwrap_or(""), self.header["version"].as_str().unwrap_or("")));
                out.push_str(&format!("# command: {}\n", self.header["command"].as_str().unwrap_or("")));
                out.push_str(&format!("# config: {}\n", header["config"]));
                match &self.body {
                    Body::Record(v) => {
                        out.push_str("key,value\n");
                        let mut flat = Vec::new();
                        flatten("", v, &mut flat);
                        for (k, v) in flat {
                            out.push_str(&format!("{k},{}\n", cell(&v)));
                        }
                    }
                    Body::Table { columns, rows, summary } => {
                        let mut flat = Vec::new();
                        flatten("", summary, &mut flat);
                        for (k, v) in flat {
                            out.push_str(&format!("# {k}: {}\n", cell(&v)));
                        }
                        out.push_str(&columns.join(","));
                        out.push('\n');
                        for row in rows {
                            let cells: Vec<String> = row.iter().map(cell).collect();
                            out.push_str(&cells.join(","));
                            out.push('\n');
                        }
                    }
                }
                out
            }
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

fn cell(v: &Value) -> String {
    let text = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => {
                let x = round15(x);
                if x != 0.0 && !(1e-4..1e15).contains(&x.abs()) {
                    format!("{x:e}")
                } else {
                    x.to_string()
                }
            }
            _ => n.to_string(),
        },
        other => other.to_string(),
    };
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
