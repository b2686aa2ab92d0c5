use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{RngStream, Sample};
use crate::dist::{QLogNormal, QParams};
use crate::error::{Error, Result};
use crate::qalgebra::{q_log, q_product_n, EntropicIndex, QProductOutcome, Region};

/// Distribution of the cascade factors.
#[derive(Clone)]
pub enum CascadeBase {
    /// Uniform on (0, b).
    Uniform {
        b: f64,
    },
    QLogNormal(QParams),
    /// Any sampler; it must be deterministic given the stream it is handed.
    Custom(Arc<dyn Fn(&mut RngStream) -> f64 + Send + Sync>),
}

impl fmt::Debug for CascadeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CascadeBase::Uniform { b } => write!(f, "Uniform {{ b: {b} }}"),
            CascadeBase::QLogNormal(p) => write!(f, "QLogNormal({p:?})"),
            CascadeBase::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CascadeConfig {
    pub q: f64,
    /// Number of factors N in each product.
    pub factors: usize,
    pub base: CascadeBase,
    pub ensemble_size: usize,
}

impl CascadeConfig {
    pub fn validate(&self) -> Result<()> {
        EntropicIndex::new(self.q)?;
        if self.factors == 0 {
            return Err(Error::InvalidParameter("cascade needs at least one factor".into()));
        }
        if self.ensemble_size == 0 {
            return Err(Error::InvalidParameter("ensemble size must be at least 1".into()));
        }
        match &self.base {
            CascadeBase::Uniform { b } if !(*b > 0.0 && b.is_finite()) => {
                Err(Error::InvalidParameter(format!("uniform base needs b > 0, got {b}")))
            }
            CascadeBase::QLogNormal(p) => p.validate(),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CascadeResult {
    pub q: f64,
    pub outcomes: Vec<QProductOutcome>,
    pub cutoffs: usize,
    pub divergent: usize,
}

impl CascadeResult {
    /// Values of the regular outcomes only.
    pub fn regular_values(&self) -> Vec<f64> {
        self.outcomes
            .iter()
            .filter(|o| o.region == Region::Regular)
            .map(|o| o.value)
            .collect()
    }

    /// ln of the strictly positive regular outcomes; zeros from the cut-off are left out.
    pub fn log_values(&self) -> Vec<f64> {
        self.outcomes
            .iter()
            .filter(|o| o.region == Region::Regular && o.value > 0.0)
            .map(|o| o.value.ln())
            .collect()
    }

    /// ln_q of the positive regular outcomes: the additive image sum_i ln_q zeta_i.
    pub fn q_log_values(&self) -> Vec<f64> {
        let q = EntropicIndex::new(self.q).expect("validated");
        self.outcomes
            .iter()
            .filter(|o| o.region == Region::Regular && o.value > 0.0)
            .filter_map(|o| q_log(o.value, q).ok())
            .collect()
    }
}

/// Runs `ensemble_size` independent N-fold q-products. Member `i` draws its
/// factors from `rng.substream(i)`, so results do not depend on the worker count.
pub fn cascade_run(config: &CascadeConfig, rng: &RngStream) -> Result<CascadeResult> {
    config.validate()?;
    let q = EntropicIndex::new(config.q)?;
    let law = match &config.base {
        CascadeBase::QLogNormal(p) => Some(QLogNormal::new(*p)?),
        _ => None,
    };
    let draw = |s: &mut RngStream| -> f64 {
        match &config.base {
            CascadeBase::Uniform { b } => b * s.uniform(),
            CascadeBase::QLogNormal(_) => law.as_ref().expect("built above").draw(s),
            CascadeBase::Custom(f) => f(s),
        }
    };
    let outcomes = (0..config.ensemble_size as u64)
        .into_par_iter()
        .map(|i| {
            let mut s = rng.substream(i);
            let factors: Vec<f64> = (0..config.factors).map(|_| draw(&mut s)).collect();
            q_product_n(&factors, q)
        })
        .collect::<Result<Vec<_>>>()?;
    let cutoffs = outcomes.iter().filter(|o| o.region == Region::CutoffZero).count();
    let divergent = outcomes.iter().filter(|o| o.region == Region::Divergent).count();
    Ok(CascadeResult {
        q: config.q,
        outcomes,
        cutoffs,
        divergent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_factor_reproduces_the_base() {
        let cfg = CascadeConfig {
            q: 0.7,
            factors: 1,
            base: CascadeBase::Uniform { b: 2.0 },
            ensemble_size: 50,
        };
        let rng = RngStream::new(11, 0);
        let r = cascade_run(&cfg, &rng).unwrap();
        for (i, o) in r.outcomes.iter().enumerate() {
            let expect = 2.0 * rng.substream(i as u64).uniform();
            assert_eq!(o.value, expect);
        }
        assert_eq!(r.cutoffs, 0);
    }

    #[test]
    fn classical_run_is_an_ordinary_product() {
        let cfg = CascadeConfig {
            q: 1.0,
            factors: 5,
            base: CascadeBase::Uniform { b: 1.0 },
            ensemble_size: 4,
        };
        let rng = RngStream::new(3, 9);
        let r = cascade_run(&cfg, &rng).unwrap();
        for (i, o) in r.outcomes.iter().enumerate() {
            let mut s = rng.substream(i as u64);
            let p: f64 = (0..5).map(|_| s.uniform()).product();
            assert!((o.value - p).abs() <= 1e-15 * p);
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let rng = RngStream::new(0, 0);
        let bad = CascadeConfig {
            q: 1.0,
            factors: 0,
            base: CascadeBase::Uniform { b: 1.0 },
            ensemble_size: 1,
        };
        assert!(cascade_run(&bad, &rng).is_err());
        let bad = CascadeConfig {
            q: 1.0,
            factors: 2,
            base: CascadeBase::Uniform { b: -1.0 },
            ensemble_size: 1,
        };
        assert!(cascade_run(&bad, &rng).is_err());
    }
}
