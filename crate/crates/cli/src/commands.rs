use std::f64::consts::SQRT_2;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use qlognorm::dist::{ContinuousDistribution, Mixture, MixtureParams, QLogNormal, QParams};
use qlognorm::infer::{
    fit_mle, ks_distance, ks_table_generate, FitOptions, FitReport, Model, PublishedTable, DEFAULT_LEVELS, MIN_REPLICAS,
};
use qlognorm::qalgebra::{Region, CLASSICAL_BAND};
use qlognorm::sample::{cascade_run, hill_tail_estimate, levy_alpha, CascadeBase, CascadeConfig, RngStream, Sample};
use qlognorm::specfun::erfc;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::ingest::{ingest, IngestOptions};
use crate::report::{
    emit, to_json, DatasetInfo, FitDocument, FitEntry, IngestDocument, Timing, Version, SCHEMA_VERSION,
};
use crate::{
    BaseArg, CascadeArgs, EvalArgs, FitArgs, Format, Function, Global, LawArgs, ModelArg, SampleArgs, TableArgs,
};

/// Shortest round-trip decimal, switching to exponent form for very small or large magnitudes.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn command_echo(g: &Global) -> Vec<String> {
    std::iter::once("qlognorm".to_owned())
        .chain(g.argv.iter().cloned())
        .collect()
}

pub fn ingest_check(g: &Global, path: &Path, options: &IngestOptions) -> Result<()> {
    let ds = ingest(path, options)?;
    if g.format == Some(Format::Tsv) {
        let mut body = String::new();
        for v in &ds.values {
            writeln!(body, "{}", fmt_f64(*v)).unwrap();
        }
        return emit(g.out.as_deref(), &body);
    }
    let n = ds.values.len() as f64;
    let doc = IngestDocument {
        version: Version::current(),
        command: command_echo(g),
        dataset: DatasetInfo::from(&ds),
        min: ds.values.iter().copied().fold(f64::INFINITY, f64::min),
        max: ds.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean: ds.values.iter().sum::<f64>() / n,
        positive: ds.values.iter().all(|&v| v > 0.0),
    };
    emit(g.out.as_deref(), &to_json(&doc))
}

fn model_of(m: ModelArg) -> Model {
    match m {
        ModelArg::QLogNormal => Model::QLogNormal,
        ModelArg::Mixture => Model::Mixture,
        ModelArg::LogNormal => Model::LogNormal,
        ModelArg::Gamma => Model::Gamma,
    }
}

/// Keeps the failure with the highest exit code, first one on ties.
fn note_failure(worst: &mut Option<CliError>, e: CliError) {
    if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
        *worst = Some(e);
    }
}

pub fn fit(g: &Global, a: &FitArgs) -> Result<()> {
    let start = Instant::now();
    if !(0.0..=1.0).contains(&a.f) {
        return Err(CliError::Usage(format!("mixture weight --f {} outside [0, 1]", a.f)));
    }
    let ds = ingest(&a.path, &a.data.options()?)?;
    let options = FitOptions {
        fixed_q: a.q,
        mixture_f: if a.free_f { None } else { Some(a.f) },
        ..FitOptions::default()
    };

    let mut models: Vec<Model> = Vec::new();
    for m in a.models.iter().map(|&m| model_of(m)) {
        if !models.contains(&m) {
            models.push(m);
        }
    }
    let mut entries = Vec::new();
    let mut fitted: Vec<FitReport> = Vec::new();
    let mut worst = None;
    for model in models {
        match fit_mle(&ds.values, model, &options) {
            Ok(r) => {
                if !r.converged {
                    note_failure(
                        &mut worst,
                        CliError::NonConvergence(format!("{} fit did not converge", model.name())),
                    );
                }
                entries.push(FitEntry {
                    model: model.name(),
                    params: Some(r.params),
                    loglik: Some(r.log_likelihood),
                    ks: Some(r.ks_distance),
                    aic: Some(r.aic),
                    converged: r.converged,
                    error: None,
                    trace: Some(r.trace.clone()),
                });
                fitted.push(r);
            }
            Err(e) => {
                entries.push(FitEntry {
                    model: model.name(),
                    params: None,
                    loglik: None,
                    ks: None,
                    aic: None,
                    converged: false,
                    error: Some(e.to_string()),
                    trace: None,
                });
                eprintln!("qlognorm: {} fit failed: {e}", model.name());
                note_failure(&mut worst, e.into());
            }
        }
    }
    let mut ranked: Vec<&FitReport> = fitted.iter().collect();
    ranked.sort_by(|x, y| x.aic.total_cmp(&y.aic));
    let doc = FitDocument {
        version: Version::current(),
        command: command_echo(g),
        seed: g.seed,
        dataset: DatasetInfo::from(&ds),
        fits: entries,
        ranking: ranked.iter().map(|r| r.model.name()).collect(),
        timing: Timing {
            elapsed_seconds: start.elapsed().as_secs_f64(),
        },
    };

    let table = cdf_table(&ds.values, &fitted);
    if let Some(path) = &a.cdf_table {
        emit(Some(path), &table)?;
    }
    match g.format {
        Some(Format::Tsv) => emit(g.out.as_deref(), &table)?,
        _ => emit(g.out.as_deref(), &to_json(&doc))?,
    }
    worst.map_or(Ok(()), Err)
}

/// x, empirical CDF i/n and one fitted CDF column per model.
fn cdf_table(data: &[f64], fits: &[FitReport]) -> String {
    let mut xs = data.to_vec();
    xs.sort_by(f64::total_cmp);
    let laws: Vec<_> = fits.iter().map(|r| r.params.law().ok()).collect();
    let mut out = format!("# qlognorm cdf schema {SCHEMA_VERSION}\nx\tF_emp");
    for r in fits {
        write!(out, "\t{}", r.model.name()).unwrap();
    }
    out.push('\n');
    let n = xs.len() as f64;
    for (i, &x) in xs.iter().enumerate() {
        write!(out, "{}\t{}", fmt_f64(x), fmt_f64((i + 1) as f64 / n)).unwrap();
        for law in &laws {
            match law.as_ref().map(|l| l.cdf(x)) {
                Some(Ok(c)) => write!(out, "\t{}", fmt_f64(c)).unwrap(),
                _ => out.push_str("\tNA"),
            }
        }
        out.push('\n');
    }
    out
}

enum Law {
    Single(QLogNormal),
    Mixture(Mixture),
}

impl Law {
    fn new(a: &LawArgs) -> Result<Self> {
        let p = QParams::new(a.q, a.mu, a.sigma)?;
        Ok(match a.f {
            None => Law::Single(QLogNormal::new(p)?),
            Some(f) => Law::Mixture(Mixture::new(MixtureParams::new(p, f)?)?),
        })
    }

    fn dist(&self) -> &dyn ContinuousDistribution {
        match self {
            Law::Single(d) => d,
            Law::Mixture(d) => d,
        }
    }

    fn raw_moment(&self, n: u32) -> qlognorm::Result<f64> {
        match self {
            Law::Single(d) => d.raw_moment(n),
            Law::Mixture(d) => {
                let (a, b) = d.branches();
                let f = d.params().f;
                let ma = if f > 0.0 { f * a.raw_moment(n)? } else { 0.0 };
                let mb = if f < 1.0 { (1.0 - f) * b.raw_moment(n)? } else { 0.0 };
                Ok(ma + mb)
            }
        }
    }

    fn char_fn(&self, k: f64) -> qlognorm::Result<(f64, f64)> {
        let c = match self {
            Law::Single(d) => d.char_fn(k)?,
            Law::Mixture(d) => d.char_fn(k)?,
        };
        Ok((c.re, c.im))
    }
}

pub fn sample(g: &Global, a: &SampleArgs) -> Result<()> {
    let law = Law::new(&a.law)?;
    let mut rng = RngStream::new(g.seed, 0);
    let draws = match &law {
        Law::Single(d) => d.draw_n(a.n, &mut rng),
        Law::Mixture(d) => d.draw_n(a.n, &mut rng),
    };
    let mut out = format!("# qlognorm sample schema {SCHEMA_VERSION}\n");
    match a.law.f {
        None => writeln!(out, "# model q_log_normal").unwrap(),
        Some(f) => writeln!(out, "# model mixture f {}", fmt_f64(f)).unwrap(),
    }
    writeln!(
        out,
        "# q {} mu {} sigma {}\n# seed {}\n# n {}",
        fmt_f64(a.law.q),
        fmt_f64(a.law.mu),
        fmt_f64(a.law.sigma),
        g.seed,
        a.n
    )
    .unwrap();
    for v in draws {
        writeln!(out, "{}", fmt_f64(v)).unwrap();
    }
    emit(g.out.as_deref(), &out)
}

pub fn table(g: &Global, a: &TableArgs) -> Result<()> {
    if a.replicas < MIN_REPLICAS {
        return Err(CliError::Usage(format!(
            "--replicas {} is below the minimum of {MIN_REPLICAS}",
            a.replicas
        )));
    }
    let params = QParams::new(a.q, a.mu, a.sigma)?;
    let ns: Vec<usize> = match &a.ns {
        Some(ns) => ns.clone(),
        None => PublishedTable::Table1.table().rows.keys().copied().collect(),
    };
    let levels = a.levels.clone().unwrap_or_else(|| DEFAULT_LEVELS.to_vec());
    let table = ks_table_generate(params, &ns, &levels, a.replicas, g.seed)?;
    match g.format {
        Some(Format::Json) => emit(g.out.as_deref(), &to_json(&table)),
        _ => emit(g.out.as_deref(), &table.to_tsv()),
    }
}

/// `a:b:n` (linear, inclusive), `log:a:b:n` (geometric) or a comma list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Usage(format!("bad grid '{spec}': expected a:b:n, log:a:b:n or a comma list"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let (log, body) = match spec.strip_prefix("log:") {
        Some(rest) => (true, rest),
        None => (false, spec),
    };
    let parts: Vec<&str> = body.split(':').collect();
    if parts.len() == 1 && !log {
        return body.split(',').map(num).collect();
    }
    if parts.len() != 3 {
        return Err(bad());
    }
    let (a, b) = (num(parts[0])?, num(parts[1])?);
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || (log && !(a > 0.0 && b > 0.0)) {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let step = |i: usize| i as f64 / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if log {
                (a.ln() + step(i) * (b / a).ln()).exp()
            } else {
                a + step(i) * (b - a)
            }
        })
        .collect())
}

#[derive(Serialize)]
struct EvalPoint {
    x: f64,
    value: Option<f64>,
    im: Option<f64>,
    error: Option<String>,
}

pub fn eval(g: &Global, a: &EvalArgs) -> Result<()> {
    let law = Law::new(&a.law)?;
    let grid = parse_grid(&a.grid)?;
    let d = law.dist();
    let mut points = Vec::with_capacity(grid.len());
    for &x in &grid {
        let r: qlognorm::Result<(f64, Option<f64>)> = match a.function {
            Function::Pdf => d.pdf(x).map(|v| (v, None)),
            Function::Cdf => d.cdf(x).map(|v| (v, None)),
            Function::Quantile => d.quantile(x).map(|v| (v, None)),
            Function::Moment => {
                if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
                    law.raw_moment(x as u32).map(|v| (v, None))
                } else {
                    Err(qlognorm::Error::InvalidParameter(format!(
                        "moment order {x} is not a non-negative integer"
                    )))
                }
            }
            Function::Charfn => law.char_fn(x).map(|(re, im)| (re, Some(im))),
        };
        points.push(match r {
            Ok((v, im)) => EvalPoint {
                x,
                value: Some(v),
                im,
                error: None,
            },
            Err(e) => {
                eprintln!("qlognorm: point {}: {e}", fmt_f64(x));
                EvalPoint {
                    x,
                    value: None,
                    im: None,
                    error: Some(e.to_string()),
                }
            }
        });
    }
    if g.format == Some(Format::Json) {
        return emit(g.out.as_deref(), &to_json(&points));
    }
    let mut out = String::from(match a.function {
        Function::Pdf => "x\tpdf\n",
        Function::Cdf => "x\tcdf\n",
        Function::Quantile => "p\tquantile\n",
        Function::Moment => "n\tmoment\n",
        Function::Charfn => "k\tre\tim\n",
    });
    let cell = |v: Option<f64>| v.map_or_else(|| "NA".to_owned(), fmt_f64);
    for p in &points {
        write!(out, "{}\t{}", fmt_f64(p.x), cell(p.value)).unwrap();
        if a.function == Function::Charfn {
            write!(out, "\t{}", cell(p.im)).unwrap();
        }
        out.push('\n');
    }
    emit(g.out.as_deref(), &out)
}

#[derive(Serialize)]
struct CascadeSummary {
    version: Version,
    command: Vec<String>,
    seed: u64,
    q: f64,
    factors: usize,
    ensemble: usize,
    regular: usize,
    cutoffs: usize,
    divergent: usize,
    /// Median over all finite outcomes, cut-off zeros included.
    median: Option<f64>,
    /// Median of ln x over the positive outcomes.
    log_median: Option<f64>,
    hill: Option<HillSummary>,
    log_normality: Option<NormalitySummary>,
    timing: Timing,
}

#[derive(Serialize)]
struct HillSummary {
    k: usize,
    estimate: Option<f64>,
    expected: f64,
    error: Option<String>,
}

#[derive(Serialize)]
struct NormalitySummary {
    ks: f64,
    critical: f64,
    alpha: f64,
    pass: bool,
}

fn median(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2]),
        _ => Some(0.5 * (sorted[n / 2 - 1] + sorted[n / 2])),
    }
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt())
}

pub fn cascade(g: &Global, a: &CascadeArgs) -> Result<()> {
    let start = Instant::now();
    let base = match a.base {
        BaseArg::Uniform => CascadeBase::Uniform { b: a.b },
        BaseArg::QLogNormal => CascadeBase::QLogNormal(QParams::new(a.base_q, a.mu, a.sigma)?),
    };
    let config = CascadeConfig {
        q: a.q,
        factors: a.factors,
        base,
        ensemble_size: a.ensemble,
    };
    let r = cascade_run(&config, &RngStream::new(g.seed, 0))?;

    if let Some(path) = &g.out {
        let mut out = format!(
            "# qlognorm cascade schema {SCHEMA_VERSION}\n# q {} factors {} ensemble {} base {:?}\n# seed {}\n# cutoffs {} divergent {}\nvalue\tregion\n",
            fmt_f64(a.q),
            a.factors,
            a.ensemble,
            config.base,
            g.seed,
            r.cutoffs,
            r.divergent
        );
        for o in &r.outcomes {
            let region = match o.region {
                Region::Regular => "regular",
                Region::CutoffZero => "cutoff_zero",
                Region::Divergent => "divergent",
            };
            writeln!(out, "{}\t{region}", fmt_f64(o.value)).unwrap();
        }
        emit(Some(path), &out)?;
    }

    let mut finite: Vec<f64> = r
        .outcomes
        .iter()
        .filter(|o| o.region != Region::Divergent && o.value.is_finite())
        .map(|o| o.value)
        .collect();
    finite.sort_by(f64::total_cmp);
    let mut logs = r.log_values();
    logs.sort_by(f64::total_cmp);

    let hill = (a.q > 1.5 && a.base == BaseArg::Uniform).then(|| {
        // the heavy tail of sum ln_q zeta lies on the left; fold it about the median
        let mut sums = r.q_log_values();
        sums.sort_by(f64::total_cmp);
        let k = a.hill_k.unwrap_or(sums.len() / 100);
        let expected = levy_alpha(a.q).expect("q > 3/2");
        let folded: Vec<f64> = match median(&sums) {
            Some(m) => sums.iter().map(|s| m - s).collect(),
            None => Vec::new(),
        };
        match hill_tail_estimate(&folded, k) {
            Ok(est) => HillSummary {
                k,
                estimate: Some(est),
                expected,
                error: None,
            },
            Err(e) => HillSummary {
                k,
                estimate: None,
                expected,
                error: Some(e.to_string()),
            },
        }
    });

    let log_normality = ((a.q - 1.0).abs() < CLASSICAL_BAND && logs.len() > 1).then(|| {
        let (m, s) = mean_sd(&logs);
        let ks = ks_distance(&logs, |x| 0.5 * erfc(-(x - m) / (s * SQRT_2))).expect("non-empty finite logs");
        let critical = 1.63 / (logs.len() as f64).sqrt();
        NormalitySummary {
            ks,
            critical,
            alpha: 0.01,
            pass: ks < critical,
        }
    });

    let summary = CascadeSummary {
        version: Version::current(),
        command: command_echo(g),
        seed: g.seed,
        q: a.q,
        factors: a.factors,
        ensemble: a.ensemble,
        regular: r.outcomes.len() - r.cutoffs - r.divergent,
        cutoffs: r.cutoffs,
        divergent: r.divergent,
        median: median(&finite),
        log_median: median(&logs),
        hill,
        log_normality,
        timing: Timing {
            elapsed_seconds: start.elapsed().as_secs_f64(),
        },
    };
    emit(a.summary.as_deref(), &to_json(&summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("1,2.5,-3").unwrap(), vec![1.0, 2.5, -3.0]);
        let g = parse_grid("log:0.01:100:5").unwrap();
        assert!((g[2] - 1.0).abs() < 1e-15 && (g[4] - 100.0).abs() < 1e-12);
        assert!(parse_grid("log:0:1:3").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn number_format_round_trips() {
        for v in [0.1, 1e-300, 123456.789, 2.5e17, -3.0, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
