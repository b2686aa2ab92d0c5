use crate::error::{domain, Error, Result};
use crate::qalgebra::{q_log, EntropicIndex};

/// Support [lo, hi] of y = ln_q x for x uniform on (0, b); `lo` is -inf for q >= 1.
pub fn compact_image_support(q: f64, b: f64) -> Result<(f64, f64)> {
    let idx = EntropicIndex::new(q)?;
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "b must be positive and finite, got {b}"
        )));
    }
    let hi = q_log(b, idx)?;
    let lo = if !idx.is_classical() && q < 1.0 {
        -1.0 / idx.one_minus()
    } else {
        f64::NEG_INFINITY
    };
    Ok((lo, hi))
}

/// Density of y = ln_q x for x uniform on (0, b): (1/b) [1 + (1-q) y]^(q/(1-q)).
pub fn compact_image_pdf(y: f64, q: f64, b: f64) -> Result<f64> {
    let (lo, hi) = compact_image_support(q, b)?;
    if y.is_nan() || y < lo || y > hi {
        return Err(domain("compact_image_pdf", format!("y={y} outside [{lo}, {hi}]")));
    }
    let idx = EntropicIndex::new(q)?;
    if idx.is_classical() {
        return Ok(y.exp() / b);
    }
    let omq = idx.one_minus();
    let base = 1.0 + omq * y;
    if base == 0.0 {
        // lower end for q < 1: the exponent q/(1-q) decides
        return Ok(match q {
            q if q > 0.0 => 0.0,
            0.0 => 1.0 / b,
            _ => f64::INFINITY,
        });
    }
    Ok((q / omq * base.ln()).exp() / b)
}

/// Variance of y = ln_q x for x uniform on (0, b): b^(2-2q) / ((3-2q)(2-q)^2),
/// finite only for q < 3/2.
pub fn compact_image_variance(q: f64, b: f64) -> Result<f64> {
    EntropicIndex::new(q)?;
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "b must be positive and finite, got {b}"
        )));
    }
    if q >= 1.5 {
        return Err(Error::Divergent(format!(
            "variance of the compact image diverges for q={q} >= 3/2"
        )));
    }
    Ok(b.powf(2.0 - 2.0 * q) / ((3.0 - 2.0 * q) * (2.0 - q) * (2.0 - q)))
}

/// Stable index alpha = 1/(q-1) of the attractor for q > 3/2.
pub fn levy_alpha(q: f64) -> Result<f64> {
    EntropicIndex::new(q)?;
    if !(q > 1.5) {
        return Err(domain("levy_alpha", format!("needs q > 3/2, got {q}")));
    }
    Ok(1.0 / (q - 1.0))
}

/// Hill estimator of the tail index from the `k` largest values.
///
/// Only the upper tail enters, so the `k + 1` largest values must be positive;
/// the rest of the sample may take any finite value.
pub fn hill_tail_estimate(samples: &[f64], k: usize) -> Result<f64> {
    let n = samples.len();
    if k < 10 || k > n / 10 {
        return Err(Error::InsufficientData(format!(
            "Hill estimator needs 10 <= k <= n/10, got k={k}, n={n}"
        )));
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::UnsupportedPoint {
            index: i,
            value: samples[i],
        });
    }
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| b.total_cmp(a));
    let threshold = xs[k];
    if !(threshold > 0.0) {
        return Err(Error::InsufficientData(format!(
            "the {}-th largest value {threshold} is not positive",
            k + 1
        )));
    }
    let sum: f64 = xs[..k].iter().map(|x| (x / threshold).ln()).sum();
    if sum == 0.0 {
        return Err(Error::Degenerate("top order statistics are all equal".into()));
    }
    Ok(k as f64 / sum)
}
