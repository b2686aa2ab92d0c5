use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    None,
    /// Log-differences of a price column.
    Returns,
    /// B = 1/v with v the windowed mean of squared log-returns.
    InverseVolatility,
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// Column name (with a header row) or zero-based index.
    pub column: Option<String>,
    pub delimiter: Option<u8>,
    /// `None` detects a header from a non-numeric first row.
    pub header: Option<bool>,
    pub transform: Transform,
    pub window: usize,
    /// Divide the inverse volatility by its mean.
    pub normalize: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            column: None,
            delimiter: None,
            header: None,
            transform: Transform::None,
            window: 5,
            normalize: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub values: Vec<f64>,
    pub path: PathBuf,
    /// SHA-256 of the raw file, hex encoded.
    pub digest: String,
    pub transform: Transform,
    pub column: String,
}

pub fn ingest(path: &Path, options: &IngestOptions) -> Result<Dataset> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| data_error(path, "file is not valid UTF-8"))?;
    let delimiter = options.delimiter.unwrap_or_else(|| detect_delimiter(&text));

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<(u64, Vec<String>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| data_error(path, &e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    if rows.is_empty() {
        return Err(data_error(path, "no data rows"));
    }

    let header = match options.header {
        Some(h) => h,
        None => rows[0].1.iter().all(|f| parse(f).is_none()),
    };
    let names: Option<Vec<String>> = if header { Some(rows.remove(0).1) } else { None };
    if rows.is_empty() {
        return Err(data_error(path, "header row but no data rows"));
    }

    let index = match &options.column {
        Some(sel) => select_column(sel, names.as_deref())
            .ok_or_else(|| CliError::Usage(format!("{}: no column matches '{sel}'", path.display())))?,
        None => rows[0]
            .1
            .iter()
            .position(|f| parse(f).is_some())
            .ok_or_else(|| data_error(path, &format!("line {}: no numeric column", rows[0].0)))?,
    };
    let column = names
        .as_ref()
        .and_then(|n| n.get(index).cloned())
        .unwrap_or_else(|| index.to_string());

    let mut values = Vec::with_capacity(rows.len());
    let mut lines = Vec::with_capacity(rows.len());
    for (line, fields) in &rows {
        let field = fields
            .get(index)
            .ok_or_else(|| data_error(path, &format!("line {line}: missing column {column}")))?;
        let v = parse(field)
            .ok_or_else(|| data_error(path, &format!("line {line}: cannot parse '{field}' as a number")))?;
        values.push(v);
        lines.push(*line);
    }

    let values = match options.transform {
        Transform::None => values,
        Transform::Returns => log_returns(&values, &lines).map_err(|m| data_error(path, &m))?,
        Transform::InverseVolatility => {
            let r = log_returns(&values, &lines).map_err(|m| data_error(path, &m))?;
            inverse_volatility(&r, &lines[1..], options.window, options.normalize).map_err(|m| data_error(path, &m))?
        }
    };
    Ok(Dataset {
        values,
        path: path.to_owned(),
        digest,
        transform: options.transform,
        column,
    })
}

fn data_error(path: &Path, msg: &str) -> CliError {
    CliError::Data(format!("{}: {msg}", path.display()))
}

fn parse(field: &str) -> Option<f64> {
    field.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn select_column(sel: &str, names: Option<&[String]>) -> Option<usize> {
    if let Some(i) = names.and_then(|n| n.iter().position(|c| c == sel)) {
        return Some(i);
    }
    sel.parse::<usize>().ok()
}

/// The candidate that splits the first data line into the most fields.
fn detect_delimiter(text: &str) -> u8 {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    (*b",\t;")
        .into_iter()
        .map(|d| (first.bytes().filter(|&b| b == d).count(), d))
        .max_by_key(|&(count, d)| (count, d == b','))
        .filter(|&(count, _)| count > 0)
        .map_or(b',', |(_, d)| d)
}

/// r_i = ln S_(i+1) - ln S_i.
pub fn log_returns(prices: &[f64], lines: &[u64]) -> std::result::Result<Vec<f64>, String> {
    if let Some(i) = prices.iter().position(|&p| !(p > 0.0)) {
        return Err(format!("line {}: price {} is not positive", lines[i], prices[i]));
    }
    if prices.len() < 2 {
        return Err("returns need at least two prices".into());
    }
    Ok(prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

/// B(t) = 1/v(t) with v(t) the mean of r^2 over the `window` returns ending at t.
/// `lines[i]` is the input line of return i.
pub fn inverse_volatility(
    returns: &[f64],
    lines: &[u64],
    window: usize,
    normalize: bool,
) -> std::result::Result<Vec<f64>, String> {
    if window == 0 {
        return Err("volatility window must be at least 1".into());
    }
    if returns.len() < window {
        return Err(format!("{} returns are fewer than the window {window}", returns.len()));
    }
    let mut out = Vec::with_capacity(returns.len() + 1 - window);
    for (t, w) in returns.windows(window).enumerate() {
        let v = w.iter().map(|r| r * r).sum::<f64>() / window as f64;
        if !(v > 0.0) {
            return Err(format!(
                "line {}: zero variance in the window of {window} returns ending here",
                lines[t + window - 1]
            ));
        }
        out.push(1.0 / v);
    }
    if normalize {
        let mean = out.iter().sum::<f64>() / out.len() as f64;
        out.iter_mut().for_each(|b| *b /= mean);
    }
    Ok(out)
}
