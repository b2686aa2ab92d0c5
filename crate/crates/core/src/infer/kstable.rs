use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ks_sorted;
use crate::dist::{ContinuousDistribution, QLogNormal, QParams};
use crate::error::{domain, Error, Result};
use crate::sample::{RngStream, Sample};

pub const DEFAULT_LEVELS: [f64; 5] = [0.80, 0.85, 0.90, 0.95, 0.99];

/// Sample sizes whose sqrt(n) D_n quantiles are pooled into the asymptotic coefficients.
pub const ASYMPTOTIC_NS: [usize; 3] = [200, 500, 1000];

pub const MIN_REPLICAS: usize = 10_000;

/// Replicas beyond the quantile needed at every level.
pub const MIN_TAIL_COUNT: f64 = 100.0;

const FORMAT_VERSION: u32 = 1;

/// Quantiles of the one-sample Kolmogorov-Smirnov statistic for a fully specified q-log-Normal law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsTable {
    pub q: f64,
    pub mu: f64,
    pub sigma: f64,
    pub levels: Vec<f64>,
    /// n -> quantile of D_n at each level
    pub rows: BTreeMap<usize, Vec<f64>>,
    /// c_P with quantile ~ c_P / sqrt(n) for large n
    pub asymptotic_coeffs: Vec<f64>,
    pub replicas: usize,
    /// `None` for tables not produced by this crate
    pub seed: Option<u64>,
}

/// Significance bracket for an observed distance: the p-value lies in (lower, upper].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValueBracket {
    pub lower: f64,
    pub upper: f64,
}

impl PValueBracket {
    /// True when the null is rejected at `alpha`.
    pub fn rejects_at(&self, alpha: f64) -> bool {
        self.upper <= alpha
    }
}

/// Published Monte Carlo tables with 10^6 replicas at mu = 0, sigma = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PublishedTable {
    /// q = 4/5
    Table1,
    /// q = 5/4
    Table2,
}

const PUBLISHED_NS: [usize; 15] = [5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 60, 70, 80, 90, 100];

#[allow(clippy::approx_constant)]
const TABLE1: [[f64; 5]; 15] = [
    [0.442, 0.471, 0.504, 0.558, 0.663],
    [0.318, 0.339, 0.362, 0.404, 0.485],
    [0.261, 0.277, 0.296, 0.333, 0.399],
    [0.211, 0.225, 0.245, 0.274, 0.334],
    [0.192, 0.205, 0.222, 0.249, 0.302],
    [0.176, 0.188, 0.204, 0.228, 0.278],
    [0.164, 0.175, 0.190, 0.212, 0.257],
    [0.154, 0.165, 0.178, 0.200, 0.242],
    [0.146, 0.156, 0.169, 0.189, 0.230],
    [0.140, 0.149, 0.161, 0.18, 0.219],
    [0.128, 0.139, 0.148, 0.165, 0.199],
    [0.119, 0.127, 0.138, 0.154, 0.186],
    [0.112, 0.121, 0.1301, 0.144, 0.175],
    [0.106, 0.113, 0.122, 0.135, 0.164],
    [0.101, 0.108, 0.115, 0.129, 0.156],
];

const TABLE2: [[f64; 5]; 15] = [
    [0.382, 0.413, 0.454, 0.513, 0.627],
    [0.286, 0.307, 0.334, 0.377, 0.461],
    [0.246, 0.262, 0.282, 0.317, 0.384],
    [0.204, 0.218, 0.237, 0.277, 0.327],
    [0.189, 0.202, 0.218, 0.246, 0.299],
    [0.174, 0.186, 0.202, 0.225, 0.276],
    [0.161, 0.174, 0.188, 0.213, 0.256],
    [0.155, 0.165, 0.178, 0.204, 0.242],
    [0.146, 0.156, 0.169, 0.189, 0.229],
    [0.137, 0.148, 0.162, 0.183, 0.217],
    [0.128, 0.138, 0.148, 0.165, 0.201],
    [0.118, 0.127, 0.138, 0.154, 0.186],
    [0.111, 0.121, 0.1301, 0.143, 0.175],
    [0.107, 0.113, 0.122, 0.135, 0.164],
    [0.099, 0.107, 0.115, 0.128, 0.155],
];

impl PublishedTable {
    pub fn table(self) -> KsTable {
        let (q, cells, coeffs) = match self {
            PublishedTable::Table1 => (0.8, &TABLE1, [1.02, 1.17, 1.30, 1.42, 1.56]),
            PublishedTable::Table2 => (1.25, &TABLE2, [1.01, 1.15, 1.28, 1.41, 1.57]),
        };
        KsTable {
            q,
            mu: 0.0,
            sigma: 1.0,
            levels: DEFAULT_LEVELS.to_vec(),
            rows: PUBLISHED_NS
                .iter()
                .zip(cells.iter())
                .map(|(&n, r)| (n, r.to_vec()))
                .collect(),
            asymptotic_coeffs: coeffs.to_vec(),
            replicas: 1_000_000,
            seed: None,
        }
    }
}

/// Type-7 quantile of sorted data.
fn quantile_sorted(xs: &[f64], p: f64) -> f64 {
    let h = (xs.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(xs.len() - 1);
    xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo])
}

/// D_n for every replica at sample size n; replica r reads stream (seed, n).substream(r).
fn simulate(law: &QLogNormal, n: usize, replicas: usize, seed: u64) -> Vec<f64> {
    let base = RngStream::new(seed, n as u64);
    let cdf = |x: f64| law.cdf(x).unwrap_or(f64::NAN);
    let mut ds: Vec<f64> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = base.substream(r);
            let mut xs = law.draw_n(n, &mut rng);
            xs.sort_by(f64::total_cmp);
            ks_sorted(&xs, cdf)
        })
        .collect();
    ds.sort_by(f64::total_cmp);
    ds
}

/// Monte Carlo quantiles of D_n for samples of size `ns` drawn from and tested against `params`.
pub fn ks_table_generate(params: QParams, ns: &[usize], levels: &[f64], replicas: usize, seed: u64) -> Result<KsTable> {
    let law = QLogNormal::new(params)?;
    if replicas < MIN_REPLICAS {
        return Err(Error::InsufficientData(format!(
            "{replicas} replicas, at least {MIN_REPLICAS} required"
        )));
    }
    if levels.is_empty() {
        return Err(Error::InvalidParameter("no levels requested".into()));
    }
    for &p in levels {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("level {p} outside (0, 1)")));
        }
        if (1.0 - p) * (replicas as f64) < MIN_TAIL_COUNT {
            return Err(Error::InsufficientData(format!(
                "level {p} needs at least {} replicas to resolve its quantile",
                (MIN_TAIL_COUNT / (1.0 - p)).ceil()
            )));
        }
    }
    if let Some(&n) = ns.iter().find(|&&n| n == 0) {
        return Err(Error::InvalidParameter(format!("sample size {n} must be positive")));
    }
    let mut rows = BTreeMap::new();
    for &n in ns {
        let ds = simulate(&law, n, replicas, seed);
        rows.insert(n, levels.iter().map(|&p| quantile_sorted(&ds, p)).collect());
    }
    let mut pooled = Vec::with_capacity(ASYMPTOTIC_NS.len() * replicas);
    for &n in &ASYMPTOTIC_NS {
        let root = (n as f64).sqrt();
        pooled.extend(simulate(&law, n, replicas, seed).into_iter().map(|d| root * d));
    }
    pooled.sort_by(f64::total_cmp);
    let asymptotic_coeffs = levels.iter().map(|&p| quantile_sorted(&pooled, p)).collect();
    Ok(KsTable {
        q: params.q,
        mu: params.mu,
        sigma: params.sigma,
        levels: levels.to_vec(),
        rows,
        asymptotic_coeffs,
        replicas,
        seed: Some(seed),
    })
}

impl KsTable {
    /// Critical distances at sample size n: a table row, linear interpolation
    /// between rows, or c_P / sqrt(n) beyond the last row.
    pub fn critical_values(&self, n: usize) -> Result<Vec<f64>> {
        if let Some(row) = self.rows.get(&n) {
            return Ok(row.clone());
        }
        let below = self.rows.range(..n).next_back();
        let above = self.rows.range(n..).next();
        match (below, above) {
            (Some((&n0, r0)), Some((&n1, r1))) => {
                let t = (n - n0) as f64 / (n1 - n0) as f64;
                Ok(r0.iter().zip(r1).map(|(a, b)| a + t * (b - a)).collect())
            }
            (_, None) if !self.asymptotic_coeffs.is_empty() => {
                let root = (n as f64).sqrt();
                Ok(self.asymptotic_coeffs.iter().map(|c| c / root).collect())
            }
            _ => Err(domain("ks_pvalue_lookup", format!("n={n} is not covered by the table"))),
        }
    }

    /// Versioned text form: '#' header lines, then `n` and one column per level.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# qlognorm-kstable version {FORMAT_VERSION}");
        let _ = writeln!(s, "# q {} mu {} sigma {}", self.q, self.mu, self.sigma);
        let _ = writeln!(s, "# replicas {}", self.replicas);
        match self.seed {
            Some(seed) => {
                let _ = writeln!(s, "# seed {seed}");
            }
            None => {
                let _ = writeln!(s, "# seed none");
            }
        }
        s.push('n');
        for p in &self.levels {
            let _ = write!(s, "\t{p}");
        }
        s.push('\n');
        for (n, row) in &self.rows {
            let _ = write!(s, "{n}");
            for v in row {
                let _ = write!(s, "\t{v}");
            }
            s.push('\n');
        }
        if !self.asymptotic_coeffs.is_empty() {
            s.push_str("asymptotic");
            for c in &self.asymptotic_coeffs {
                let _ = write!(s, "\t{c}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_tsv(text: &str) -> Result<KsTable> {
        let bad = |msg: String| domain("ks_table_parse", msg);
        let mut header: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        let mut version = None;
        let mut body = Vec::new();
        for line in text.lines().map(str::trim_end).filter(|l| !l.is_empty()) {
            if let Some(h) = line.strip_prefix('#') {
                let words: Vec<&str> = h.split_whitespace().collect();
                if words.first() == Some(&"qlognorm-kstable") {
                    version = words.get(2).and_then(|v| v.parse::<u32>().ok());
                } else if let Some((k, rest)) = words.split_first() {
                    header.insert(k, rest.to_vec());
                }
            } else {
                body.push(line);
            }
        }
        if version != Some(FORMAT_VERSION) {
            return Err(bad(format!("unsupported or missing format version {version:?}")));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number {s:?}")));
        let q_line = header.get("q").ok_or_else(|| bad("missing parameter line".into()))?;
        if q_line.len() != 5 || q_line[1] != "mu" || q_line[3] != "sigma" {
            return Err(bad("malformed parameter line".into()));
        }
        let (q, mu, sigma) = (num(q_line[0])?, num(q_line[2])?, num(q_line[4])?);
        let replicas = header
            .get("replicas")
            .and_then(|v| v.first())
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("missing replicas line".into()))?;
        let seed = match header.get("seed").and_then(|v| v.first()) {
            Some(&"none") => None,
            Some(v) => Some(v.parse().map_err(|_| bad(format!("bad seed {v:?}")))?),
            None => return Err(bad("missing seed line".into())),
        };
        let (cols, rows_text) = body.split_first().ok_or_else(|| bad("missing column header".into()))?;
        let cols: Vec<&str> = cols.split('\t').collect();
        if cols.first() != Some(&"n") {
            return Err(bad("first column must be n".into()));
        }
        let levels = cols[1..].iter().map(|c| num(c)).collect::<Result<Vec<f64>>>()?;
        let mut rows = BTreeMap::new();
        let mut asymptotic_coeffs = Vec::new();
        for line in rows_text {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != levels.len() + 1 {
                return Err(bad(format!("row {line:?} has {} fields", fields.len())));
            }
            let vals = fields[1..].iter().map(|c| num(c)).collect::<Result<Vec<f64>>>()?;
            if fields[0] == "asymptotic" {
                asymptotic_coeffs = vals;
            } else {
                let n = fields[0]
                    .parse()
                    .map_err(|_| bad(format!("bad sample size {:?}", fields[0])))?;
                rows.insert(n, vals);
            }
        }
        Ok(KsTable {
            q,
            mu,
            sigma,
            levels,
            rows,
            asymptotic_coeffs,
            replicas,
            seed,
        })
    }
}

/// Brackets the p-value of distance `d` at sample size `n` between the table's levels.
/// Interpolation between rows is linear in n and only approximate.
pub fn ks_pvalue_lookup(table: &KsTable, n: usize, d: f64) -> Result<PValueBracket> {
    if !(0.0..=1.0).contains(&d) {
        return Err(domain("ks_pvalue_lookup", format!("distance {d} outside [0, 1]")));
    }
    if n == 0 {
        return Err(domain("ks_pvalue_lookup", "n must be positive"));
    }
    let crit = table.critical_values(n)?;
    let mut lower = 0.0;
    let mut upper: f64 = 1.0;
    for (&p, &c) in table.levels.iter().zip(&crit) {
        // 1 - 0.95 is not exactly 0.05 in binary
        let alpha = ((1.0 - p) * 1e12).round() / 1e12;
        if d >= c {
            upper = upper.min(alpha);
        } else {
            lower = f64::max(lower, alpha);
        }
    }
    Ok(PValueBracket { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_quantile() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 4.0);
        assert!((quantile_sorted(&xs, 0.5) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn published_lookup() {
        let t = PublishedTable::Table1.table();
        let b = ks_pvalue_lookup(&t, 200, 0.1).unwrap();
        assert!(
            (b.lower - 0.05).abs() < 1e-12 && (b.upper - 0.10).abs() < 1e-12,
            "{b:?}"
        );
        let b = ks_pvalue_lookup(&t, 5, 0.3).unwrap();
        assert!((b.lower - 0.2).abs() < 1e-12 && b.upper == 1.0);
        let b = ks_pvalue_lookup(&t, 5, 0.558).unwrap();
        assert!((b.upper - 0.05).abs() < 1e-12 && (b.lower - 0.01).abs() < 1e-12);
        assert!(ks_pvalue_lookup(&t, 3, 0.3).is_err());
        assert!(ks_pvalue_lookup(&t, 10, 1.5).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        for t in [PublishedTable::Table1.table(), PublishedTable::Table2.table()] {
            assert_eq!(KsTable::from_tsv(&t.to_tsv()).unwrap(), t);
        }
    }
}
