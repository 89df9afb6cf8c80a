use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::commands::Table;

pub const TOOL: &str = "laser-entropy";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct Artifact<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub config: &'a BTreeMap<String, Value>,
    pub result: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Artifact<'_> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifact serialises");
        s.push('\n');
        s
    }

    fn comment_header(&self) -> String {
        let mut s = format!("# tool: {} {}\n# command: {}\n# seed: {}\n", self.tool, self.version, self.command, self.seed);
        s.push_str(&format!("# config: {}\n", serde_json::to_string(self.config).expect("config")));
        if let Some(t) = self.wall_time_s {
            s.push_str(&format!("# wall_time_s: {t}\n"));
        }
        s
    }

    /// The table when there is one (the scalar result moves into a comment),
    /// otherwise the flattened result as a single row.
    pub fn to_csv(&self, table: Option<&Table>) -> String {
        let mut s = self.comment_header();
        match table {
            Some(t) => {
                let mut scalars = Map::new();
                if let Value::Object(m) = self.result {
                    for (k, v) in m {
                        if !v.is_object() && !v.is_array() {
                            scalars.insert(k.clone(), v.clone());
                        }
                    }
                }
                s.push_str(&format!("# result: {}\n", Value::Object(scalars)));
                s.push_str(&write_table(t));
            }
            None => {
                let (header, row) = flatten(self.result).into_iter().unzip();
                s.push_str(&write_table(&Table { header, rows: vec![row] }));
            }
        }
        s
    }
}

pub fn write_table(t: &Table) -> String {
    let mut s = t.header.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(",");
    s.push('\n');
    for row in &t.rows {
        s.push_str(&row.iter().map(csv_value).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Floats in scientific notation with 17 significant digits.
pub fn csv_value(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => format!("{:.16e}", n.as_f64().expect("f64")),
        Value::Number(n) => n.to_string(),
        Value::String(s) => csv_field(s),
        other => csv_field(&other.to_string()),
    }
}

/// Dotted keys for nested objects; arrays of scalars joined with `;`, arrays
/// longer than a few entries dropped.
pub fn flatten(v: &Value) -> Vec<(String, Value)> {
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                walk(&key, x, out);
            }
        }
        Value::Array(a) if a.len() <= 8 && a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let joined = a.iter().map(csv_value).collect::<Vec<_>>().join(";");
            out.push((prefix.to_string(), Value::String(joined)));
        }
        Value::Array(_) => {}
        scalar => out.push((prefix.to_string(), scalar.clone())),
    }
}
