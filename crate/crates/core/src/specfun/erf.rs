// The real erf/erfc kernels follow FreeBSD's s_erf.c, which carries this notice:
//
// ====================================================
// Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//
// Developed at SunPro, a Sun Microsystems, Inc. business.
// Permission to use, copy, modify, and distribute this
// software is freely granted, provided that this notice
// is preserved.
// ====================================================
//
// Interval split:
//   |x| < 0.84375        erf(x) = x + x*P(x^2)/Q(x^2)
//   0.84375 <= |x| < 1.25  erf(1+s) = erx + P1(s)/Q1(s)
//   1.25 <= |x| < 28     erfc(x) = exp(-x^2 - 0.5625 + R(1/x^2)/S(1/x^2)) / x
// with two (R, S) pairs split at 1/0.35.

#![allow(clippy::excessive_precision)]

use crate::error::{domain, Result};

const ERX: f64 = 8.45062911510467529297e-01;
const EFX: f64 = 1.28379167095512586316e-01;
const EFX8: f64 = 1.02703333676410069053e+00;

const PP: [f64; 5] = [
    1.28379167095512558561e-01,
    -3.25042107247001499370e-01,
    -2.84817495755985104766e-02,
    -5.77027029648944159157e-03,
    -2.37630166566501626084e-05,
];
const QQ: [f64; 5] = [
    3.97917223959155352819e-01,
    6.50222499887672944485e-02,
    5.08130628187576562776e-03,
    1.32494738004321644526e-04,
    -3.96022827877536812320e-06,
];

const PA: [f64; 7] = [
    -2.36211856075265944077e-03,
    4.14856118683748331666e-01,
    -3.72207876035701323847e-01,
    3.18346619901161753674e-01,
    -1.10894694282396677476e-01,
    3.54783043256182359371e-02,
    -2.16637559486879084300e-03,
];
const QA: [f64; 6] = [
    1.06420880400844228286e-01,
    5.40397917702171048937e-01,
    7.18286544141962662868e-02,
    1.26171219808761642112e-01,
    1.36370839120290507362e-02,
    1.19844998467991074170e-02,
];

const RA: [f64; 8] = [
    -9.86494403484714822705e-03,
    -6.93858572707181764372e-01,
    -1.05586262253232909814e+01,
    -6.23753324503260060396e+01,
    -1.62396669462573470355e+02,
    -1.84605092906711035994e+02,
    -8.12874355063065934246e+01,
    -9.81432934416914548592e+00,
];
const SA: [f64; 8] = [
    1.96512716674392571292e+01,
    1.37657754143519042600e+02,
    4.34565877475229228821e+02,
    6.45387271733267880336e+02,
    4.29008140027567833386e+02,
    1.08635005541779435134e+02,
    6.57024977031928170135e+00,
    -6.04244152148580987438e-02,
];

const RB: [f64; 7] = [
    -9.86494292470009928597e-03,
    -7.99283237680523006574e-01,
    -1.77579549177547519889e+01,
    -1.60636384855821916062e+02,
    -6.37566443368389627722e+02,
    -1.02509513161107724954e+03,
    -4.83519191608651397019e+02,
];
const SB: [f64; 7] = [
    3.03380607434824582924e+01,
    3.25792512996573918826e+02,
    1.53672958608443695994e+03,
    3.19985821950859553908e+03,
    2.55305040643316442583e+03,
    4.74528541206955367215e+02,
    -2.24409524465858183362e+01,
];

const VERY_TINY: f64 = 2.848094538889218e-306;
const SMALL: f64 = 3.725_290_298_461_914e-9; // 2^-28
const TINY: f64 = 1.387_778_780_781_445_7e-17; // 2^-56

pub(crate) const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

#[inline]
fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

#[inline]
fn horner1(c: &[f64], x: f64) -> f64 {
    1.0 + x * horner(c, x)
}

/// erf(x) - x on |x| < 0.84375, divided by x.
#[inline]
fn small_ratio(x: f64) -> f64 {
    let z = x * x;
    horner(&PP, z) / horner1(&QQ, z)
}

#[inline]
fn near_one(ax: f64) -> f64 {
    let s = ax - 1.0;
    horner(&PA, s) / horner1(&QA, s)
}

/// R/S for the exponent of the tail formula, valid for 1.25 <= x < 28.
#[inline]
fn tail_exponent(ax: f64) -> f64 {
    let s = 1.0 / (ax * ax);
    if ax < 1.0 / 0.35 {
        horner(&RA, s) / horner1(&SA, s)
    } else {
        horner(&RB, s) / horner1(&SB, s)
    }
}

/// erfc(|x|) for 1.25 <= |x| < 28.
#[inline]
fn tail(ax: f64) -> f64 {
    // split x^2 into a short head and a correction so exp(-x^2) keeps full precision
    let z = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
    (-z * z - 0.5625).exp() * ((z - ax) * (z + ax) + tail_exponent(ax)).exp() / ax
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let r = if ax < 0.84375 {
        if ax < SMALL {
            if ax < VERY_TINY {
                0.125 * (8.0 * ax + EFX8 * ax)
            } else {
                ax + EFX * ax
            }
        } else {
            ax + ax * small_ratio(ax)
        }
    } else if ax < 1.25 {
        ERX + near_one(ax)
    } else if ax >= 6.0 {
        1.0
    } else {
        1.0 - tail(ax)
    };
    r.copysign(x)
}

/// Complementary error function, 1 - erf(x), without cancellation for large x.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let neg = x < 0.0;
    let ax = x.abs();
    if ax < 0.84375 {
        let t = if ax < TINY {
            ax
        } else {
            let y = small_ratio(ax);
            if ax < 0.25 {
                ax + ax * y
            } else {
                0.5 + (ax * y + (ax - 0.5))
            }
        };
        return if neg { 1.0 + t } else { 1.0 - t };
    }
    if ax < 1.25 {
        let p = near_one(ax);
        return if neg { 1.0 + ERX + p } else { 1.0 - ERX - p };
    }
    if ax < 28.0 {
        if neg && ax > 6.0 {
            return 2.0;
        }
        let r = tail(ax);
        return if neg { 2.0 - r } else { r };
    }
    if neg {
        2.0
    } else {
        0.0
    }
}

/// Scaled complementary error function exp(x^2) erfc(x).
///
/// Finite for every x that does not make exp(x^2) overflow on the negative side.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 1.25 {
        erfc(x) * (x * x).exp()
    } else if x < 28.0 {
        (tail_exponent(x) - 0.5625).exp() / x
    } else if x.is_infinite() {
        0.0
    } else {
        // asymptotic series; terms shrink fast past 28
        let inv2 = 1.0 / (2.0 * x * x);
        let mut term: f64 = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term.abs() > 1e-17 {
            term *= -(2.0 * k - 1.0) * inv2;
            sum += term;
            k += 1.0;
        }
        FRAC_1_SQRT_PI * sum / x
    }
}

/// ln erfc(x), finite far into the right tail where erfc underflows.
pub fn ln_erfc(x: f64) -> f64 {
    if x < 1.25 {
        erfc(x).ln()
    } else {
        erfcx(x).ln() - x * x
    }
}

/// Standard normal quantile to about 1e-9 relative; seeds the Halley refinement below.
fn normal_quantile_seed(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    let tail = |p: f64| {
        let r = (-2.0 * p.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    };
    if p < P_LOW {
        tail(p)
    } else if p <= 1.0 - P_LOW {
        let r = p - 0.5;
        let s = r * r;
        (((((A[0] * s + A[1]) * s + A[2]) * s + A[3]) * s + A[4]) * s + A[5]) * r
            / (((((B[0] * s + B[1]) * s + B[2]) * s + B[3]) * s + B[4]) * s + 1.0)
    } else {
        -tail(1.0 - p)
    }
}

/// Inverse of erfc on (0, 2).
pub fn erfc_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 2.0) {
        return Err(domain("erfc_inv", format!("argument {p} outside (0, 2)")));
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    if p > 1.0 {
        return erfc_inv(2.0 - p).map(|x| -x);
    }
    // erfc(x) = 2 Phi(-sqrt2 x)
    let mut x = -normal_quantile_seed(0.5 * p) * std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..8 {
        let d = -FRAC_2_SQRT_PI * (-x * x).exp();
        if d == 0.0 {
            break;
        }
        let u = (erfc(x) - p) / d;
        let step = u / (1.0 + x * u);
        x -= step;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    Ok(x)
}

/// Inverse of erf on (-1, 1).
pub fn erf_inv(p: f64) -> Result<f64> {
    if !(p > -1.0 && p < 1.0) {
        return Err(domain("erf_inv", format!("argument {p} outside (-1, 1)")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p.abs() > 0.5 {
        return erfc_inv(1.0 - p.abs()).map(|x| x.copysign(p));
    }
    let mut x = normal_quantile_seed(0.5 * (1.0 + p)) * std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..8 {
        let d = FRAC_2_SQRT_PI * (-x * x).exp();
        let u = (erf(x) - p) / d;
        let step = u / (1.0 + x * u);
        x -= step;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn reference_values() {
        assert!(close(erf(1.0), 0.842_700_792_949_714_9, 1e-15));
        assert!(close(erf(0.3), 0.328_626_759_459_127_4, 1e-15));
        assert!(close(erfc(-1.0), 1.842_700_792_949_715, 1e-15));
        assert!(close(erfc(5.0), 1.537_459_794_428_035e-12, 1e-14));
        assert!(close(erfc(20.0), 5.395_865_611_607_901e-176, 1e-13));
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erfc(f64::INFINITY), 0.0);
        assert_eq!(erfc(f64::NEG_INFINITY), 2.0);
    }

    #[test]
    fn scaled_forms_agree() {
        for &x in &[-3.0, -0.5, 0.0, 0.7, 1.2, 1.3, 2.0, 5.0, 10.0, 26.0] {
            let direct = erfc(x) * (x * x).exp();
            assert!(close(erfcx(x), direct, 1e-13), "x={x}");
            assert!((ln_erfc(x) - erfc(x).ln()).abs() < 1e-13 * (1.0 + x * x));
        }
        // past the underflow of erfc
        assert!(close(erfcx(30.0), 0.018_795_888_861_416_75, 1e-13));
        assert!(close(erfcx(100.0), 0.005_641_613_782_989_433, 1e-13));
        assert!((ln_erfc(40.0) - (-1604.261_556_653_273_6)).abs() < 1e-10);
    }

    #[test]
    fn inverses_round_trip() {
        for &p in &[1e-300, 1e-30, 1e-5, 0.02, 0.3, 0.9999, 1.0, 1.5, 1.99] {
            let x = erfc_inv(p).unwrap();
            assert!(close(erfc(x), p, 1e-13), "p={p}");
        }
        for &p in &[-0.999_999, -0.5, -1e-12, 0.1, 0.49, 0.51, 0.95] {
            let x = erf_inv(p).unwrap();
            assert!((erf(x) - p).abs() <= 1e-15 * p.abs(), "p={p}");
        }
        assert!(erf_inv(1.0).is_err());
        assert!(erfc_inv(0.0).is_err());
        assert!(erfc_inv(2.0).is_err());
    }
}
