//! Random variates by inverse transform, multiplicative cascades and the
//! tail diagnostics used to check their attractors.

mod cascade;
mod compact;
mod rng;

pub use cascade::{cascade_run, CascadeBase, CascadeConfig, CascadeResult};
pub use compact::{compact_image_pdf, compact_image_support, compact_image_variance, hill_tail_estimate, levy_alpha};
pub use rng::RngStream;

use crate::dist::{
    ContinuousDistribution, Mixture, MixtureParams, QLogNormal, QParams, TruncatedNormal, TruncatedNormalParams,
};
use crate::error::Result;

/// One variate per call from a shared stream.
pub trait Sample {
    fn draw(&self, rng: &mut RngStream) -> f64;

    fn draw_n(&self, n: usize, rng: &mut RngStream) -> Vec<f64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }
}

// u lies strictly inside (0, 1), so the quantile functions cannot fail.
impl Sample for TruncatedNormal {
    fn draw(&self, rng: &mut RngStream) -> f64 {
        self.quantile(rng.uniform()).expect("open unit interval")
    }
}

impl Sample for QLogNormal {
    fn draw(&self, rng: &mut RngStream) -> f64 {
        self.quantile(rng.uniform()).expect("open unit interval")
    }
}

impl Sample for Mixture {
    fn draw(&self, rng: &mut RngStream) -> f64 {
        let (primary, dual) = self.branches();
        let f = self.params().f;
        // pure branches skip the selector so they replay the single-law stream
        if f == 1.0 || (f > 0.0 && rng.uniform() < f) {
            primary.draw(rng)
        } else {
            dual.draw(rng)
        }
    }
}

pub fn sample_truncnorm(params: TruncatedNormalParams, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    Ok(TruncatedNormal::new(params)?.draw_n(n, rng))
}

pub fn sample_qlognormal(params: QParams, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    Ok(QLogNormal::new(params)?.draw_n(n, rng))
}

pub fn sample_mixture(params: MixtureParams, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    Ok(Mixture::new(params)?.draw_n(n, rng))
}
