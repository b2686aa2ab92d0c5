//! Adaptive Gauss-Kronrod (7/15) quadrature with global error control.
//!
//! Semi-infinite and infinite ranges are mapped onto (0, 1] with
//! x = a + (1 - t)/t, which keeps algebraic tails integrable.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{domain, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of a converged integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Tolerances and evaluation budget for [`Quadrature::integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_evals: 1_000_000,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(domain("quadrature", format!("integrand is {v} at x={x}")))
        }
    };
    let fc = eval(c)?;
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    let mut abs_k = rk.abs();
    let mut fv = [(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = eval(c - dx)?;
        let f2 = eval(c + dx)?;
        fv[j] = (f1, f2);
        rk += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * rk;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let value = rk * h;
    let asc = asc * h.abs();
    let abs_k = abs_k * h.abs();
    let mut error = ((rk - rg) * h).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_k > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_k);
    }
    Ok(Panel { a, b, value, error })
}

impl Quadrature {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Quadrature {
            abs_tol,
            ..Default::default()
        }
    }

    pub fn with_tols(abs_tol: f64, rel_tol: f64) -> Self {
        Quadrature {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    /// Integrate `f` over [a, b]; either limit may be infinite.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<QuadratureResult> {
        if a.is_nan() || b.is_nan() {
            return Err(domain("quadrature", "NaN limit"));
        }
        if a == b {
            return Ok(QuadratureResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                evaluations: 0,
            });
        }
        if a > b {
            let r = self.integrate(f, b, a)?;
            return Ok(QuadratureResult { value: -r.value, ..r });
        }
        match (a.is_finite(), b.is_finite()) {
            (true, true) => self.finite(&f, a, b),
            (true, false) => self.finite(&|t: f64| f(a + (1.0 - t) / t) / (t * t), 0.0, 1.0),
            (false, true) => self.finite(&|t: f64| f(b - (1.0 - t) / t) / (t * t), 0.0, 1.0),
            (false, false) => self.finite(
                &|t: f64| {
                    let x = (1.0 - t) / t;
                    (f(x) + f(-x)) / (t * t)
                },
                0.0,
                1.0,
            ),
        }
    }

    /// Integrate over consecutive segments between `points` (sorted; ends may be infinite).
    pub fn integrate_over<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<QuadratureResult> {
        if points.len() < 2 {
            return Err(domain("quadrature", "need at least two break points"));
        }
        let share = Quadrature {
            abs_tol: self.abs_tol / (points.len() - 1) as f64,
            ..*self
        };
        let mut total = QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        };
        for w in points.windows(2) {
            let r = share.integrate(&f, w[0], w[1])?;
            total.value += r.value;
            total.abs_error_estimate += r.abs_error_estimate;
            total.evaluations += r.evaluations;
        }
        Ok(total)
    }

    fn finite<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> Result<QuadratureResult> {
        let first = kronrod(f, a, b)?;
        let mut evaluations = 15;
        let mut value = first.value;
        let mut error = first.error;
        let mut heap = BinaryHeap::new();
        // panels too narrow to split keep their error but leave the queue
        let mut frozen_error = 0.0;
        heap.push(first);
        loop {
            let tol = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= tol {
                return Ok(QuadratureResult {
                    value,
                    abs_error_estimate: error,
                    evaluations,
                });
            }
            let worst = match heap.pop() {
                Some(p) => p,
                None => break,
            };
            if evaluations + 30 > self.max_evals {
                heap.push(worst);
                break;
            }
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 4.0 * f64::EPSILON * mid.abs() {
                frozen_error += worst.error;
                if heap.is_empty() {
                    break;
                }
                continue;
            }
            let left = kronrod(f, worst.a, mid)?;
            let right = kronrod(f, mid, worst.b)?;
            evaluations += 30;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
        // recompute sums from scratch to shed accumulated rounding
        let value_sum: f64 = heap.iter().map(|p| p.value).sum::<f64>();
        let error_sum: f64 = heap.iter().map(|p| p.error).sum::<f64>() + frozen_error;
        let tol = self.abs_tol.max(self.rel_tol * value_sum.abs());
        if error_sum <= tol && !heap.is_empty() {
            return Ok(QuadratureResult {
                value,
                abs_error_estimate: error_sum,
                evaluations,
            });
        }
        Err(Error::NonConvergence {
            routine: "quadrature",
            evaluations,
            estimate: value,
        })
    }
}

/// Integrate with an absolute tolerance and the default budget.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<QuadratureResult> {
    Quadrature::with_abs_tol(abs_tol).integrate(f, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
        assert!(r.abs_error_estimate <= 1e-10);
    }

    #[test]
    fn infinite_ranges() {
        let g = |x: f64| (-x * x / 2.0).exp();
        let r = integrate(g, f64::NEG_INFINITY, f64::INFINITY, 1e-12).unwrap();
        assert!((r.value - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-11);
        let r = integrate(|x: f64| 1.0 / (x * x), 1.0, f64::INFINITY, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
        let r = integrate(|x: f64| x.exp(), f64::NEG_INFINITY, 0.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let q = Quadrature {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_evals: 100,
        };
        let r = q.integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn reversed_limits_negate() {
        let r = integrate(|x: f64| x, 2.0, 0.0, 1e-12).unwrap();
        assert!((r.value + 2.0).abs() < 1e-13);
    }
}
