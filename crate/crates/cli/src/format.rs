//! Bit-stable text output: CSV with LF endings and 17 significant digits,
//! JSON pretty-printed with a trailing newline.

use serde::Serialize;
use stabcleanse::protocol::ResourceRow;

use crate::CliError;

/// 17 significant digits in scientific notation; round-trips every f64.
pub fn real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(internal)?;
    for r in rows {
        w.write_record(r).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(internal)
}

pub fn json_string<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(internal)?;
    s.push('\n');
    Ok(s)
}

fn internal<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Internal(e.to_string())
}

pub const RESOURCE_HEADER: [&str; 4] = ["method", "cost_metric", "cost_value", "error"];

pub fn resource_csv(rows: &[ResourceRow]) -> Result<String, CliError> {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.method.clone(),
                r.cost_metric.clone(),
                real(r.cost_value),
                real(r.error),
            ]
        })
        .collect();
    csv_string(&RESOURCE_HEADER, &body)
}

pub fn parse_resource_csv(text: &str) -> Result<Vec<ResourceRow>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(usage)?.clone();
    if header.iter().collect::<Vec<_>>() != RESOURCE_HEADER {
        return Err(CliError::Usage(format!("unexpected header {header:?}")));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(usage)?;
            let num = |i: usize| rec[i].parse::<f64>().map_err(usage);
            Ok(ResourceRow {
                method: rec[0].to_string(),
                cost_metric: rec[1].to_string(),
                cost_value: num(2)?,
                error: num(3)?,
            })
        })
        .collect()
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}
