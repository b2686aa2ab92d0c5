use crate::dist::{MixtureParams, QParams};
use crate::error::{Error, Result};

use super::gamma::fit_gamma;
use super::optim::{Minimum, Simplex};
use super::score::Branch;
use super::{check_data, FitReport, Model, ModelParams, OptimizerTrace};

/// Entropic indices used as simplex starting points.
pub const DEFAULT_Q_STARTS: [f64; 5] = [0.7, 0.9, 1.0, 1.1, 1.3];

/// Smallest sample accepted by `fit_mle`.
pub const MIN_FIT_SIZE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Multi-start lattice in q; (mu, sigma) start from the moments of ln_q x.
    pub q_starts: Vec<f64>,
    /// Hold q at this value and fit (mu, sigma) only.
    pub fixed_q: Option<f64>,
    /// Mixture weight; `None` fits it as well.
    pub mixture_f: Option<f64>,
    pub max_iter: usize,
    /// Relative tolerance on the mean negative log-likelihood across the simplex.
    pub ftol: f64,
    /// Absolute tolerance on the simplex diameter in (q, mu, ln sigma).
    pub xtol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        let s = Simplex::default();
        FitOptions {
            q_starts: DEFAULT_Q_STARTS.to_vec(),
            fixed_q: None,
            mixture_f: Some(0.5),
            max_iter: s.max_iter,
            ftol: s.ftol,
            xtol: s.xtol,
        }
    }
}

/// Maximum likelihood fit of `model` to positive `data`.
///
/// The q-log-Normal and mixture fits run a simplex search over (q, mu, ln sigma)
/// from every start in `options.q_starts` and keep the best. A fit whose best
/// start did not meet the tolerances is returned with `converged == false`.
pub fn fit_mle(data: &[f64], model: Model, options: &FitOptions) -> Result<FitReport> {
    check_data(data)?;
    if data.len() < MIN_FIT_SIZE {
        return Err(Error::InsufficientData(format!(
            "fit needs at least {MIN_FIT_SIZE} points, got {}",
            data.len()
        )));
    }
    if data.iter().all(|&x| x == data[0]) {
        return Err(Error::Degenerate("all data points are equal".into()));
    }
    match model {
        Model::Gamma => fit_gamma(data),
        Model::LogNormal => fit_log_normal(data),
        Model::QLogNormal => fit_simplex(data, options, None),
        Model::Mixture => {
            if let Some(f) = options.mixture_f {
                if !(0.0..=1.0).contains(&f) {
                    return Err(Error::InvalidParameter(format!("mixture weight f={f} outside [0, 1]")));
                }
            }
            fit_simplex(data, options, Some(options.mixture_f))
        }
    }
}

fn fit_log_normal(data: &[f64]) -> Result<FitReport> {
    let (mu, sigma) = mean_sd(data.iter().map(|x| x.ln()));
    let params = ModelParams::LogNormal { mu, sigma };
    let trace = OptimizerTrace {
        starts: 0,
        best_start: 0,
        iterations: 0,
        evaluations: 0,
    };
    FitReport::assemble(data, params, 2, true, trace)
}

fn mean_sd<I: Iterator<Item = f64> + Clone>(xs: I) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn ln_q_moments(logs: &[f64], q: f64) -> (f64, f64) {
    let w = 1.0 - q;
    if w == 0.0 {
        mean_sd(logs.iter().copied())
    } else {
        mean_sd(logs.iter().map(|&l| (w * l).exp_m1() / w))
    }
}

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Mean log-likelihood of the one-sided law or, with `f`, the mixture.
fn mean_ln_likelihood(logs: &[f64], p: &QParams, f: Option<f64>) -> f64 {
    let primary = Branch::new(p);
    let total: f64 = match f {
        None => logs.iter().map(|&l| primary.ln_pdf(l)).sum(),
        Some(f) => {
            let dual = Branch::new(&p.dual());
            let (ln_f, ln_g) = (f.ln(), (1.0 - f).ln());
            logs.iter()
                .map(|&l| {
                    let a = ln_f + primary.ln_pdf(l);
                    let b = ln_g + dual.ln_pdf(l);
                    let m = a.max(b);
                    m + ((a - m).exp() + (b - m).exp()).ln()
                })
                .sum()
        }
    };
    total / logs.len() as f64
}

/// `mixture`: `None` for the one-sided law, `Some(None)` for a mixture with
/// fitted weight, `Some(Some(f))` for a mixture with weight fixed at f.
fn fit_simplex(data: &[f64], options: &FitOptions, mixture: Option<Option<f64>>) -> Result<FitReport> {
    if let Some(q) = options.fixed_q {
        if !q.is_finite() {
            return Err(Error::InvalidParameter(format!("fixed q must be finite, got {q}")));
        }
    }
    let logs: Vec<f64> = data.iter().map(|x| x.ln()).collect();
    let simplex = Simplex {
        ftol: options.ftol,
        xtol: options.xtol,
        max_iter: options.max_iter,
    };
    let fit_f = matches!(mixture, Some(None));
    let symmetric = mixture == Some(Some(0.5));

    let starts: Vec<f64> = match options.fixed_q {
        Some(q) => vec![q],
        None if symmetric => {
            // q and 2 - q describe the same symmetric mixture
            let mut s: Vec<f64> = options.q_starts.iter().map(|&q| q.max(2.0 - q)).collect();
            s.sort_by(f64::total_cmp);
            s.dedup();
            s
        }
        None => options.q_starts.clone(),
    };
    if starts.is_empty() {
        return Err(Error::InvalidParameter("no starting values for q".into()));
    }

    // x = [q?, mu, ln sigma, logit f?]
    let unpack = |x: &[f64]| -> (QParams, Option<f64>) {
        let (q, rest) = match options.fixed_q {
            Some(q) => (q, x),
            None => (x[0], &x[1..]),
        };
        let p = QParams {
            q,
            mu: rest[0],
            sigma: rest[1].exp(),
        };
        let f = match mixture {
            None => None,
            Some(Some(f)) => Some(f),
            Some(None) => Some(logistic(rest[2])),
        };
        (p, f)
    };
    let objective = |x: &[f64]| -> f64 {
        let (p, f) = unpack(x);
        if !(p.sigma > 0.0) || !p.sigma.is_finite() || !p.q.is_finite() {
            return f64::INFINITY;
        }
        -mean_ln_likelihood(&logs, &p, f)
    };

    let mut best: Option<(usize, Minimum)> = None;
    let mut iterations = 0;
    let mut evaluations = 0;
    for (i, &q0) in starts.iter().enumerate() {
        let (mu0, sd0) = ln_q_moments(&logs, q0);
        if !(sd0 > 0.0) || !mu0.is_finite() || !sd0.is_finite() {
            continue;
        }
        let mut x0 = Vec::new();
        let mut steps = Vec::new();
        if options.fixed_q.is_none() {
            x0.push(q0);
            steps.push(0.05);
        }
        x0.extend([mu0, sd0.ln()]);
        steps.extend([0.1 * sd0, 0.1]);
        if fit_f {
            x0.push(0.0);
            steps.push(0.5);
        }
        let m = simplex.minimize(objective, &x0, &steps);
        iterations += m.iterations;
        evaluations += m.evaluations;
        if best.as_ref().is_none_or(|(_, b)| m.value < b.value) {
            best = Some((i, m));
        }
    }
    let (best_start, m) = best.ok_or_else(|| Error::Degenerate("no usable starting point".into()))?;
    if !m.value.is_finite() {
        return Err(Error::NonConvergence {
            routine: "fit_mle",
            evaluations,
            estimate: m.value,
        });
    }
    let (mut p, f) = unpack(&m.x);
    let trace = OptimizerTrace {
        starts: starts.len(),
        best_start,
        iterations,
        evaluations,
    };
    match mixture {
        None => FitReport::assemble(data, ModelParams::QLogNormal(p), 3, m.converged, trace),
        Some(_) => {
            let mut f = f.expect("mixture weight");
            if p.q < 1.0 {
                p = p.dual();
                f = 1.0 - f;
            }
            let k = if fit_f { 4 } else { 3 };
            FitReport::assemble(
                data,
                ModelParams::Mixture(MixtureParams { base: p, f }),
                k,
                m.converged,
                trace,
            )
        }
    }
}
