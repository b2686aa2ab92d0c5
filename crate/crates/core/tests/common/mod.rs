#![allow(dead_code)]

use qlognorm::dist::{ContinuousDistribution, QLogNormal, QParams};
use qlognorm::specfun::Quadrature;

pub const QS: [f64; 7] = [0.5, 0.8, 0.95, 1.0, 1.05, 1.25, 1.5];
pub const MUS: [f64; 3] = [-1.0, 0.0, 1.0];
pub const SIGMAS: [f64; 3] = [0.5, 1.0, 2.0];

pub fn grid() -> Vec<QParams> {
    let mut v = Vec::new();
    for &q in &QS {
        for &mu in &MUS {
            for &sigma in &SIGMAS {
                v.push(QParams::new(q, mu, sigma).unwrap());
            }
        }
    }
    v
}

pub fn law(q: f64, mu: f64, sigma: f64) -> QLogNormal {
    QLogNormal::new(QParams::new(q, mu, sigma).unwrap()).unwrap()
}

/// Break points that keep adaptive quadrature away from trouble: the origin,
/// a few scales either side of 1 and infinity.
pub fn breaks_upto(x: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    for &p in &[1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 10.0, 1e3, 1e6] {
        if p < x {
            pts.push(p);
        }
    }
    pts.push(x);
    pts
}

/// Integral of `f` over [0, x] by adaptive quadrature, tolerance `tol`.
pub fn integrate_to<F: Fn(f64) -> f64>(f: F, x: f64, tol: f64) -> f64 {
    Quadrature {
        abs_tol: tol,
        rel_tol: 0.0,
        max_evals: 2_000_000,
    }
    .integrate_over(f, &breaks_upto(x))
    .unwrap()
    .value
}

pub fn pdf_mass<D: ContinuousDistribution>(d: &D, x: f64, tol: f64) -> f64 {
    integrate_to(|t| d.pdf(t).unwrap(), x, tol)
}

/// Root of a nondecreasing function by plain bisection.
pub fn bisect<F: Fn(f64) -> f64>(f: F, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One-sample Kolmogorov-Smirnov statistic, written out independently of the library.
pub fn ks<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Standard normal cdf through the library erfc (erfc itself is checked separately).
pub fn phi(z: f64) -> f64 {
    0.5 * qlognorm::specfun::erfc(-z / std::f64::consts::SQRT_2)
}
