use std::fs;
use std::io::Write;
use std::path::Path;

use qlognorm::infer::{ModelParams, OptimizerTrace};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::ingest::{Dataset, Transform};

/// Version of the JSON and TSV layouts written by this tool.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Version {
    pub tool: &'static str,
    pub schema: u32,
}

impl Version {
    pub fn current() -> Self {
        Version {
            tool: env!("CARGO_PKG_VERSION"),
            schema: SCHEMA_VERSION,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DatasetInfo {
    pub path: String,
    pub digest: String,
    pub n: usize,
    pub transform: Transform,
    pub column: String,
}

impl From<&Dataset> for DatasetInfo {
    fn from(d: &Dataset) -> Self {
        DatasetInfo {
            path: d.path.display().to_string(),
            digest: d.digest.clone(),
            n: d.values.len(),
            transform: d.transform,
            column: d.column.clone(),
        }
    }
}

/// One requested model; a failed fit keeps its slot with `error` set.
#[derive(Debug, Serialize)]
pub struct FitEntry {
    pub model: &'static str,
    pub params: Option<ModelParams>,
    pub loglik: Option<f64>,
    pub ks: Option<f64>,
    pub aic: Option<f64>,
    pub converged: bool,
    pub error: Option<String>,
    pub trace: Option<OptimizerTrace>,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct FitDocument {
    pub version: Version,
    pub command: Vec<String>,
    pub seed: u64,
    pub dataset: DatasetInfo,
    pub fits: Vec<FitEntry>,
    /// Successful fits by increasing AIC.
    pub ranking: Vec<&'static str>,
    pub timing: Timing,
}

#[derive(Debug, Serialize)]
pub struct IngestDocument {
    pub version: Version,
    pub command: Vec<String>,
    pub dataset: DatasetInfo,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub positive: bool,
}

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
