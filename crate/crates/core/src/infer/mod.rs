//! Maximum likelihood fitting, model comparison and Kolmogorov-Smirnov tables.

mod gamma;
mod kstable;
mod mle;
mod optim;
mod score;

pub use gamma::{fit_gamma, GammaLaw, GammaParams};
pub use kstable::{
    ks_pvalue_lookup, ks_table_generate, KsTable, PValueBracket, PublishedTable, ASYMPTOTIC_NS, DEFAULT_LEVELS,
    MIN_REPLICAS,
};
pub use mle::{fit_mle, FitOptions, DEFAULT_Q_STARTS, MIN_FIT_SIZE};
pub use score::{mixture_score_gradient, score_gradient};

use serde::{Deserialize, Serialize};

use crate::dist::{ContinuousDistribution, Mixture, MixtureParams, QLogNormal, QParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    QLogNormal,
    Mixture,
    LogNormal,
    Gamma,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::QLogNormal => "q_log_normal",
            Model::Mixture => "mixture",
            Model::LogNormal => "log_normal",
            Model::Gamma => "gamma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelParams {
    QLogNormal(QParams),
    Mixture(MixtureParams),
    LogNormal { mu: f64, sigma: f64 },
    Gamma(GammaParams),
}

/// A fitted or specified law, ready for evaluation.
#[derive(Debug, Clone, Copy)]
pub enum ModelLaw {
    Single(QLogNormal),
    Mixture(Mixture),
    Gamma(GammaLaw),
}

impl ModelParams {
    pub fn model(&self) -> Model {
        match self {
            ModelParams::QLogNormal(_) => Model::QLogNormal,
            ModelParams::Mixture(_) => Model::Mixture,
            ModelParams::LogNormal { .. } => Model::LogNormal,
            ModelParams::Gamma(_) => Model::Gamma,
        }
    }

    pub fn law(&self) -> Result<ModelLaw> {
        Ok(match *self {
            ModelParams::QLogNormal(p) => ModelLaw::Single(QLogNormal::new(p)?),
            ModelParams::Mixture(p) => ModelLaw::Mixture(Mixture::new(p)?),
            ModelParams::LogNormal { mu, sigma } => ModelLaw::Single(QLogNormal::new(QParams::new(1.0, mu, sigma)?)?),
            ModelParams::Gamma(p) => ModelLaw::Gamma(GammaLaw::new(p)?),
        })
    }
}

impl ContinuousDistribution for ModelLaw {
    fn ln_pdf(&self, x: f64) -> Result<f64> {
        match self {
            ModelLaw::Single(d) => d.ln_pdf(x),
            ModelLaw::Mixture(d) => d.ln_pdf(x),
            ModelLaw::Gamma(d) => d.ln_pdf(x),
        }
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        match self {
            ModelLaw::Single(d) => d.cdf(x),
            ModelLaw::Mixture(d) => d.cdf(x),
            ModelLaw::Gamma(d) => d.cdf(x),
        }
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        match self {
            ModelLaw::Single(d) => d.quantile(p),
            ModelLaw::Mixture(d) => d.quantile(p),
            ModelLaw::Gamma(d) => d.quantile(p),
        }
    }
}

/// Summary of the simplex search behind a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub starts: usize,
    pub best_start: usize,
    pub iterations: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: Model,
    pub params: ModelParams,
    pub log_likelihood: f64,
    pub ks_distance: f64,
    pub aic: f64,
    pub n: usize,
    pub converged: bool,
    pub trace: OptimizerTrace,
}

impl FitReport {
    /// Fills in likelihood, KS distance and AIC for `params` on `data`.
    /// `k` is the number of estimated parameters.
    pub(crate) fn assemble(
        data: &[f64],
        params: ModelParams,
        k: usize,
        converged: bool,
        trace: OptimizerTrace,
    ) -> Result<Self> {
        let law = params.law()?;
        let log_likelihood = log_likelihood(data, &law)?;
        let cdf = |x: f64| law.cdf(x).unwrap_or(f64::NAN);
        let ks_distance = ks_distance(data, cdf)?;
        let rss = rss_cdf(data, cdf)?;
        let aic = aic(k, data.len(), rss)?;
        Ok(FitReport {
            model: params.model(),
            params,
            log_likelihood,
            ks_distance,
            aic,
            n: data.len(),
            converged,
            trace,
        })
    }
}

pub(crate) fn check_data(data: &[f64]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    for (i, &x) in data.iter().enumerate() {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::UnsupportedPoint { index: i, value: x });
        }
    }
    Ok(())
}

/// Sum of ln pdf over the sample; -inf when some point has zero density.
pub fn log_likelihood<D: ContinuousDistribution>(data: &[f64], law: &D) -> Result<f64> {
    check_data(data)?;
    let mut total = 0.0;
    for (i, &x) in data.iter().enumerate() {
        let v = law
            .ln_pdf(x)
            .map_err(|_| Error::UnsupportedPoint { index: i, value: x })?;
        total += v;
    }
    Ok(total)
}

/// Akaike criterion 2k + n ln(RSS/n).
pub fn aic(k: usize, n: usize, rss: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InsufficientData("AIC needs n > 0".into()));
    }
    if !(rss > 0.0) || !rss.is_finite() {
        return Err(Error::Degenerate(format!(
            "AIC needs a positive residual sum of squares, got {rss}"
        )));
    }
    Ok(2.0 * k as f64 + n as f64 * (rss / n as f64).ln())
}

fn sorted(data: &[f64]) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    if let Some(i) = data.iter().position(|x| x.is_nan()) {
        return Err(Error::UnsupportedPoint {
            index: i,
            value: data[i],
        });
    }
    let mut xs = data.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    Ok(xs)
}

/// Residual sum of squares between the empirical CDF i/n and `cdf` at the sorted sample points.
pub fn rss_cdf<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> Result<f64> {
    let xs = sorted(data)?;
    let n = xs.len() as f64;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - cdf(x)).powi(2))
        .sum())
}

/// One-sample Kolmogorov-Smirnov distance sup |F_n - F|.
pub fn ks_distance<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> Result<f64> {
    let xs = sorted(data)?;
    Ok(ks_sorted(&xs, cdf))
}

pub(crate) fn ks_sorted<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> f64 {
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn likelihood_examples() {
        let law = QLogNormal::new(QParams::new(1.0, 0.0, 1.0).unwrap()).unwrap();
        let ll = log_likelihood(&[1.0], &law).unwrap();
        assert!((ll + 0.918_938_533_204_672_7).abs() < 1e-15);
        let data = [0.3, 1.7, 2.2];
        let twice = [0.3, 1.7, 2.2, 0.3, 1.7, 2.2];
        let a = log_likelihood(&data, &law).unwrap();
        assert!((log_likelihood(&twice, &law).unwrap() - 2.0 * a).abs() < 1e-14);
        assert!(matches!(
            log_likelihood(&[1.0, -2.0], &law),
            Err(Error::UnsupportedPoint { index: 1, .. })
        ));
    }

    #[test]
    fn aic_examples() {
        assert_eq!(aic(3, 1, 1.0).unwrap(), 6.0);
        let base = aic(3, 50, 0.4).unwrap();
        assert!((aic(6, 50, 0.4).unwrap() - base - 6.0).abs() < 1e-12);
        assert!(aic(3, 50, 0.0).is_err());
    }

    #[test]
    fn ks_examples() {
        let n = 20;
        let data: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
        assert!((ks_distance(&data, |x| x).unwrap() - 0.5 / n as f64).abs() < 1e-15);
        assert_eq!(ks_distance(&[0.0], |x| 0.5 + x).unwrap(), 0.5);
        let logs: Vec<f64> = data.iter().map(|x| x.ln()).collect();
        let a = ks_distance(&data, |x| x * x).unwrap();
        let b = ks_distance(&logs, |y| (2.0 * y).exp()).unwrap();
        assert!((a - b).abs() < 1e-15);
    }
}
