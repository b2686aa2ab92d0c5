use serde::{Deserialize, Serialize};

use super::{check_data, FitReport, ModelParams, OptimizerTrace};
use crate::dist::{check_probability, ContinuousDistribution};
use crate::error::{domain, Error, Result};
use crate::specfun::{digamma, gamma_p, ln_gamma, trigamma};

/// P(B) = theta^(-1-kappa) / Gamma(1+kappa) B^kappa exp(-B/theta): shape 1 + kappa, scale theta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub kappa: f64,
    pub theta: f64,
}

impl GammaParams {
    pub fn new(kappa: f64, theta: f64) -> Result<Self> {
        let p = GammaParams { kappa, theta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > -1.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kappa must exceed -1, got {}",
                self.kappa
            )));
        }
        if !(self.theta > 0.0) || !self.theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "theta must be positive, got {}",
                self.theta
            )));
        }
        Ok(())
    }

    pub fn shape(&self) -> f64 {
        1.0 + self.kappa
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GammaLaw {
    p: GammaParams,
    ln_norm: f64,
}

impl GammaLaw {
    pub fn new(p: GammaParams) -> Result<Self> {
        p.validate()?;
        let ln_norm = p.shape() * p.theta.ln() + ln_gamma(p.shape())?;
        Ok(GammaLaw { p, ln_norm })
    }

    pub fn params(&self) -> GammaParams {
        self.p
    }
}

impl ContinuousDistribution for GammaLaw {
    fn ln_pdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(domain("gamma_pdf", format!("x={x} outside [0, inf)")));
        }
        if x == 0.0 {
            return Ok(match self.p.kappa {
                k if k > 0.0 => f64::NEG_INFINITY,
                0.0 => -self.p.theta.ln(),
                _ => f64::INFINITY,
            });
        }
        Ok(self.p.kappa * x.ln() - x / self.p.theta - self.ln_norm)
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(domain("gamma_cdf", format!("x={x} outside [0, inf)")));
        }
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        gamma_p(self.p.shape(), x / self.p.theta)
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability("gamma_quantile", p)?;
        let mut hi = self.p.theta * self.p.shape().max(1.0);
        while self.cdf(hi)? < p {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                break;
            }
            if self.cdf(mid)? < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Gamma MLE: theta = mean / shape, with the shape solving ln k - psi(k) = ln(mean) - mean(ln x).
pub fn fit_gamma(data: &[f64]) -> Result<FitReport> {
    check_data(data)?;
    if data.len() < 2 {
        return Err(Error::InsufficientData("Gamma fit needs at least two points".into()));
    }
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let mean_ln = data.iter().map(|x| x.ln()).sum::<f64>() / n;
    let s = mean.ln() - mean_ln;
    if !(s > 0.0) {
        return Err(Error::Degenerate("all data points are equal".into()));
    }
    // Minka's starting value
    let mut k = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < 100 {
        iterations += 1;
        let f = k.ln() - digamma(k)? - s;
        let df = 1.0 / k - trigamma(k)?;
        let next = k - f / df;
        let next = if next > 0.0 { next } else { 0.5 * k };
        if (next - k).abs() <= 1e-14 * k {
            k = next;
            converged = true;
            break;
        }
        k = next;
    }
    let params = GammaParams::new(k - 1.0, mean / k)?;
    let trace = OptimizerTrace {
        starts: 1,
        best_start: 0,
        iterations,
        evaluations: iterations,
    };
    FitReport::assemble(data, ModelParams::Gamma(params), 2, converged, trace)
}
