use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::commands::{self, Command, Table};
use crate::error::CliError;
use crate::output::flatten;
use crate::params::{Params, Resolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

/// `name=start:stop:points[:log|:linear]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Range {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl FromStr for Range {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |msg: String| CliError::config("range", format!("`{s}`: {msg}"));
        let (name, spec) = s.split_once('=').ok_or_else(|| bad("expected name=start:stop:points[:log]".into()))?;
        if !Params::SWEEPABLE.contains(&name) {
            return Err(bad(format!("`{name}` is not a numeric parameter")));
        }
        let parts: Vec<&str> = spec.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad("expected start:stop:points[:log]".into()));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| bad(format!("`{p}`: {e}")));
        let start = num(parts[0])?;
        let stop = num(parts[1])?;
        let points: usize = parts[2].trim().parse().map_err(|e| bad(format!("points `{}`: {e}", parts[2])))?;
        let scale = match parts.get(3).map(|p| p.trim()) {
            None | Some("linear") | Some("lin") => Scale::Linear,
            Some("log") => Scale::Log,
            Some(other) => return Err(bad(format!("unknown scale `{other}`"))),
        };
        let range = Range { name: name.to_string(), start, stop, points, scale };
        range.check().map_err(bad)?;
        Ok(range)
    }
}

impl Range {
    fn check(&self) -> Result<(), String> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err("endpoints must be finite".into());
        }
        if self.points == 1 && self.start != self.stop {
            return Err("a single point needs start = stop".into());
        }
        if self.points == 0 {
            return Err("need at least one point".into());
        }
        if self.points > 1 && self.start == self.stop {
            return Err("degenerate range: start = stop".into());
        }
        if self.scale == Scale::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err("log scale needs positive endpoints".into());
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    return self.stop;
                }
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + t * (self.stop - self.start),
                    Scale::Log => {
                        let (a, b) = (self.start.log10(), self.stop.log10());
                        10f64.powf(a + t * (b - a))
                    }
                }
            })
            .collect()
    }
}

pub struct SweepResult {
    pub table: Table,
    pub rows: Vec<Value>,
    pub failed: bool,
}

/// Cartesian product of the ranges, first range outermost; one row per point
/// with the resolved inputs followed by the outputs.
pub fn sweep(base: Command, values: &Map<String, Value>, ranges: &[Range]) -> Result<SweepResult, CliError> {
    let grids: Vec<Vec<f64>> = ranges.iter().map(Range::values).collect();
    let total: usize = grids.iter().map(Vec::len).product();
    let mut header: Vec<String> = Vec::new();
    let mut records: Vec<Vec<(String, Value)>> = Vec::with_capacity(total);
    let mut rows = Vec::with_capacity(total);
    let mut failed = false;
    for flat in 0..total {
        let mut rem = flat;
        let mut point = vec![0.0; ranges.len()];
        for i in (0..ranges.len()).rev() {
            point[i] = grids[i][rem % grids[i].len()];
            rem /= grids[i].len();
        }
        let mut resolver = Resolver::new(values.clone());
        for (range, x) in ranges.iter().zip(&point) {
            resolver.set(&range.name, Value::from(*x));
        }
        let outcome = commands::run(base, &mut resolver)?;
        failed |= outcome.failed;
        let inputs: Vec<(String, Value)> = resolver.used().iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut record = inputs.clone();
        for (k, v) in flatten(&outcome.result) {
            let key = if inputs.iter().any(|(i, _)| *i == k) { format!("result.{k}") } else { k };
            record.push((key, v));
        }
        for (k, _) in &record {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
        rows.push(serde_json::json!({
            "inputs": Value::Object(inputs.into_iter().collect()),
            "result": outcome.result,
        }));
        records.push(record);
    }
    let table_rows = records
        .iter()
        .map(|rec| {
            header
                .iter()
                .map(|h| rec.iter().find(|(k, _)| k == h).map(|(_, v)| v.clone()).unwrap_or(Value::Null))
                .collect()
        })
        .collect();
    Ok(SweepResult { table: Table { header, rows: table_rows }, rows, failed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_expand() {
        let r: Range = "coherence=1e2:1e5:4:log".parse().unwrap();
        assert_eq!(r.values(), vec![100.0, 1000.0, 10000.0, 100000.0]);
        let r: Range = "temperature=100:400:4".parse().unwrap();
        assert_eq!(r.values(), vec![100.0, 200.0, 300.0, 400.0]);
    }

    #[test]
    fn degenerate_ranges_rejected() {
        for bad in ["coherence=1:1:3", "coherence=1:2:0", "coherence=0:2:3:log", "coherence=1:2", "bogus=1:2:3", "coherence=1:2:3:cubic"] {
            let err = bad.parse::<Range>().unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}");
        }
    }
}
