//! The q-log-Normal distribution family and the q-product algebra it is built on.
//!
//! * [`qalgebra`]: q-logarithm, q-exponential, q-product and q-division.
//! * [`specfun`]: error functions, Gamma, parabolic cylinder functions, quadrature.
//! * [`dist`]: one-sided q-log-Normal, the two-branched mixture and the
//!   truncated-normal representation in `ln_q` space.
//! * [`sample`]: reproducible random streams, variate generation and
//!   generalised multiplicative cascades.
//! * [`infer`]: likelihood, maximum-likelihood fits, AIC, Kolmogorov-Smirnov
//!   statistics and Monte Carlo KS quantile tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dist;
pub mod error;
pub mod infer;
pub mod qalgebra;
pub mod sample;
pub mod specfun;

pub use error::{Error, Result};
