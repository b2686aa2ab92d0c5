//! Faddeeva function w(z) = exp(-z^2) erfc(-iz) and the complex erfc built on it.
//!
//! w is evaluated in the upper half plane with Weideman's rational expansion
//! in Z = (L + iz)/(L - iz); the lower half plane follows from reflection.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{domain, Result};

const TERMS: usize = 40;

struct Expansion {
    l: f64,
    coeffs: [f64; TERMS],
}

fn expansion() -> &'static Expansion {
    static CELL: OnceLock<Expansion> = OnceLock::new();
    CELL.get_or_init(|| {
        let n = TERMS as f64;
        let m = 2 * TERMS;
        let l = (n / std::f64::consts::SQRT_2).sqrt();
        let samples: Vec<f64> = (1..m)
            .map(|k| {
                let t = l * (k as f64 * PI / (2 * m) as f64).tan();
                (-t * t).exp() * (l * l + t * t)
            })
            .collect();
        let f0 = l * l;
        let mut coeffs = [0.0; TERMS];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let order = (j + 1) as f64;
            let s: f64 = samples
                .iter()
                .enumerate()
                .map(|(i, &f)| f * (order * (i + 1) as f64 * PI / m as f64).cos())
                .sum();
            *c = (f0 + 2.0 * s) / (2 * m) as f64;
        }
        Expansion { l, coeffs }
    })
}

fn w_upper(z: Complex64) -> Complex64 {
    let e = expansion();
    let iz = Complex64::i() * z;
    let lm = Complex64::new(e.l, 0.0) - iz;
    let zz = (Complex64::new(e.l, 0.0) + iz) / lm;
    let mut p = Complex64::new(0.0, 0.0);
    for &c in e.coeffs.iter().rev() {
        p = p * zz + c;
    }
    2.0 * p / (lm * lm) + 1.0 / (PI.sqrt() * lm)
}

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
pub fn faddeeva_w(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(domain("faddeeva_w", format!("non-finite argument {z}")));
    }
    let w = if z.im >= 0.0 {
        w_upper(z)
    } else {
        // w(z) = 2 exp(-z^2) - w(-z)
        2.0 * (-z * z).exp() - w_upper(-z)
    };
    if w.re.is_finite() && w.im.is_finite() {
        Ok(w)
    } else {
        Err(domain("faddeeva_w", format!("overflow at {z}")))
    }
}

/// Complementary error function of a complex argument.
pub fn erfc_complex(z: Complex64) -> Result<Complex64> {
    let v = if z.re >= 0.0 {
        (-z * z).exp() * faddeeva_w(Complex64::i() * z)?
    } else {
        2.0 - erfc_complex(-z)?
    };
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(domain("erfc_complex", format!("overflow at {z}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::erfc;

    #[test]
    fn real_axis_matches_real_erfc() {
        for &x in &[-3.0, -0.4, 0.0, 0.6, 2.0, 5.0] {
            let c = erfc_complex(Complex64::new(x, 0.0)).unwrap();
            assert!((c.re - erfc(x)).abs() <= 1e-13 * erfc(x).max(1e-300), "x={x}");
            assert!(c.im.abs() < 1e-14);
        }
    }

    #[test]
    fn imaginary_axis() {
        // w(iy) = exp(y^2) erfc(y) for y > 0
        let w = faddeeva_w(Complex64::new(0.0, 1.0)).unwrap();
        assert!((w.re - 0.427_583_576_155_807).abs() < 1e-13);
        assert!(w.im.abs() < 1e-14);
    }
}
