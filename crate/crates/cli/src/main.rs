//! `qlognorm`: fit, sample, tabulate and evaluate q-log-Normal laws from the command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod ingest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::{CliError, Result};
use ingest::{IngestOptions, Transform};

#[derive(Debug, Parser)]
#[command(name = "qlognorm", version, about = "q-log-Normal fitting, sampling and KS tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read a data file, apply the transform and summarise the result.
    IngestCheck {
        path: PathBuf,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Maximum likelihood fits with KS distance, AIC and a ranking.
    Fit(FitArgs),
    /// Draw variates from a q-log-Normal law or mixture.
    Sample(SampleArgs),
    /// Monte Carlo quantile table of the KS statistic.
    Table(TableArgs),
    /// Evaluate pdf, cdf, quantile, raw moments or the characteristic function on a grid.
    Eval(EvalArgs),
    /// Simulate an ensemble of N-fold q-products.
    Cascade(CascadeArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Column name, or zero-based index; defaults to the first numeric column.
    #[arg(long)]
    column: Option<String>,
    /// Field delimiter; detected among comma, tab and semicolon when absent.
    #[arg(long)]
    delimiter: Option<char>,
    /// Treat the first row as a header.
    #[arg(long, conflicts_with = "no_header")]
    header: bool,
    /// Treat the first row as data.
    #[arg(long)]
    no_header: bool,
    #[arg(long, value_enum, default_value_t = Transform::None)]
    transform: Transform,
    /// Volatility window T in rows.
    #[arg(long, default_value_t = 5)]
    window: usize,
    /// Keep the inverse volatility unnormalised instead of dividing by its mean.
    #[arg(long)]
    raw_volatility: bool,
}

impl DataArgs {
    fn options(&self) -> Result<IngestOptions> {
        let delimiter = match self.delimiter {
            None => None,
            Some(c) if c.is_ascii() => Some(c as u8),
            Some(c) => return Err(CliError::Usage(format!("delimiter '{c}' is not ASCII"))),
        };
        let header = match (self.header, self.no_header) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        };
        Ok(IngestOptions {
            column: self.column.clone(),
            delimiter,
            header,
            transform: self.transform,
            window: self.window,
            normalize: !self.raw_volatility,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    QLogNormal,
    Mixture,
    LogNormal,
    Gamma,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    path: PathBuf,
    #[command(flatten)]
    data: DataArgs,
    /// Model to fit; repeat for several.
    #[arg(long = "model", value_enum, default_values_t = [ModelArg::QLogNormal, ModelArg::LogNormal])]
    models: Vec<ModelArg>,
    /// Mixture weight of the q branch.
    #[arg(long, default_value_t = 0.5, conflicts_with = "free_f")]
    f: f64,
    /// Fit the mixture weight as well.
    #[arg(long)]
    free_f: bool,
    /// Hold q fixed in the q-log-Normal and mixture fits.
    #[arg(long)]
    q: Option<f64>,
    /// Also write the empirical-vs-fitted CDF table here.
    #[arg(long)]
    cdf_table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LawArgs {
    #[arg(long, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Weight of the q branch in the two-branched mixture; a single law when absent.
    #[arg(long)]
    f: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    law: LawArgs,
    /// Number of draws.
    #[arg(long)]
    n: usize,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 100_000)]
    replicas: usize,
    /// Sample sizes; defaults to the published layout 5..100.
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<usize>>,
    /// Quantile levels; defaults to 0.80, 0.85, 0.90, 0.95, 0.99.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Function {
    Pdf,
    Cdf,
    Quantile,
    Moment,
    Charfn,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(value_enum)]
    function: Function,
    #[command(flatten)]
    law: LawArgs,
    /// Points: `a:b:n` (linear), `log:a:b:n` (logarithmic) or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    /// Uniform on (0, b).
    Uniform,
    /// q-log-Normal with --base-q, --mu, --sigma.
    QLogNormal,
}

#[derive(Debug, Args)]
pub struct CascadeArgs {
    /// Index of the q-product.
    #[arg(long, allow_negative_numbers = true)]
    q: f64,
    /// Factors per product.
    #[arg(long, default_value_t = 100)]
    factors: usize,
    /// Number of products.
    #[arg(long, default_value_t = 10_000)]
    ensemble: usize,
    #[arg(long, value_enum, default_value_t = BaseArg::Uniform)]
    base: BaseArg,
    /// Upper end of the uniform base.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    base_q: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Order statistics used by the Hill estimate; ensemble/100 when absent.
    #[arg(long)]
    hill_k: Option<usize>,
    /// Write the summary here instead of stdout.
    #[arg(long)]
    summary: Option<PathBuf>,
}

/// Settings shared by every command.
pub struct Global {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub argv: Vec<String>,
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("QLOGNORM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("QLOGNORM_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the worker pool: {e}")))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let global = Global {
        seed: cli.seed,
        out: cli.out,
        format: cli.format,
        argv: std::env::args().skip(1).collect(),
    };
    match cli.command {
        Command::IngestCheck { path, data } => commands::ingest_check(&global, &path, &data.options()?),
        Command::Fit(a) => commands::fit(&global, &a),
        Command::Sample(a) => commands::sample(&global, &a),
        Command::Table(a) => commands::table(&global, &a),
        Command::Eval(a) => commands::eval(&global, &a),
        Command::Cascade(a) => commands::cascade(&global, &a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qlognorm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
