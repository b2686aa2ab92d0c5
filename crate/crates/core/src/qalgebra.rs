//! Deformed algebra primitives: q-logarithm, q-exponential, q-product and q-division.
//!
//! For `q != 1` the q-logarithm and q-exponential are evaluated as
//! `expm1((1-q) ln x) / (1-q)` and `exp(log1p((1-q) x) / (1-q))`, which keep
//! full relative precision as `q -> 1`. Within `CLASSICAL_BAND` of 1 the
//! ordinary `ln`/`exp`/`*` are used.
//!
//! The q-product is only defined where `|x|^(1-q) + |y|^(1-q) - 1 >= 0`. Outside
//! that set the q-exponential cut-off applies and the product is reported as
//! [`Region::CutoffZero`]; for `q > 1` the line `|x|^(1-q) + |y|^(1-q) = 1` is
//! reported as [`Region::Divergent`].

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// `|1 - q|` below which every operation uses its classical form.
pub const CLASSICAL_BAND: f64 = 1e-12;

/// Relative tolerance on `|x|^(1-q) + |y|^(1-q) = 1` for the divergence line.
pub const DIVERGENCE_TOL: f64 = 1e-12;

/// The deformation parameter `q`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EntropicIndex(f64);

impl EntropicIndex {
    pub const CLASSICAL: EntropicIndex = EntropicIndex(1.0);

    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() {
            Ok(EntropicIndex(q))
        } else {
            Err(Error::InvalidParameter(format!(
                "entropic index must be finite, got {q}"
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - q`.
    #[inline]
    pub fn one_minus(self) -> f64 {
        1.0 - self.0
    }

    #[inline]
    pub fn is_classical(self) -> bool {
        (1.0 - self.0).abs() < CLASSICAL_BAND
    }

    /// The dual index `2 - q`.
    pub fn dual(self) -> EntropicIndex {
        EntropicIndex(2.0 - self.0)
    }
}

impl TryFrom<f64> for EntropicIndex {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        EntropicIndex::new(q)
    }
}

impl From<EntropicIndex> for f64 {
    fn from(q: EntropicIndex) -> f64 {
        q.0
    }
}

/// Where a q-product landed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Regular,
    CutoffZero,
    Divergent,
}

/// Value of a q-product or q-division together with the region it fell in.
///
/// A `CutoffZero` outcome always carries `value == 0`; a `Divergent` outcome
/// carries an infinite value that must not be used as a number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QProductOutcome {
    pub value: f64,
    pub region: Region,
}

impl QProductOutcome {
    fn regular(value: f64) -> Self {
        QProductOutcome {
            value,
            region: Region::Regular,
        }
    }

    fn cutoff() -> Self {
        QProductOutcome {
            value: 0.0,
            region: Region::CutoffZero,
        }
    }

    fn divergent(sign: f64) -> Self {
        QProductOutcome {
            value: sign * f64::INFINITY,
            region: Region::Divergent,
        }
    }

    pub fn is_regular(&self) -> bool {
        self.region == Region::Regular
    }

    /// The value, unless the outcome is divergent.
    pub fn finite_value(&self) -> Option<f64> {
        match self.region {
            Region::Divergent => None,
            _ => Some(self.value),
        }
    }
}

// Unchecked kernels shared with the distribution code. Callers pass exactly 0
// for indices inside the classical band.

#[inline]
pub(crate) fn ln_q_raw(x: f64, one_minus_q: f64) -> f64 {
    if one_minus_q == 0.0 {
        return x.ln();
    }
    (one_minus_q * x.ln()).exp_m1() / one_minus_q
}

#[inline]
pub(crate) fn exp_q_raw(x: f64, one_minus_q: f64) -> f64 {
    if one_minus_q == 0.0 {
        return x.exp();
    }
    let t = one_minus_q * x;
    if t <= -1.0 {
        return 0.0;
    }
    (t.ln_1p() / one_minus_q).exp()
}

/// `ln_q(x) = (x^(1-q) - 1) / (1 - q)`, `ln x` at `q = 1`.
pub fn q_log(x: f64, q: EntropicIndex) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(domain("q_log", format!("argument must be positive, got {x}")));
    }
    if q.is_classical() {
        Ok(x.ln())
    } else {
        Ok(ln_q_raw(x, q.one_minus()))
    }
}

/// `exp_q(x) = [1 + (1-q) x]^(1/(1-q))`, zero where `1 + (1-q) x <= 0`.
pub fn q_exp(x: f64, q: EntropicIndex) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("q_exp", "argument is NaN"));
    }
    if q.is_classical() {
        Ok(x.exp())
    } else {
        Ok(exp_q_raw(x, q.one_minus()))
    }
}

fn check_finite(func: &'static str, x: f64, y: f64) -> Result<()> {
    if x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(domain(func, format!("operands must be finite, got ({x}, {y})")))
    }
}

/// Classifies `1 + s` where `s = (1-q)(ln_q|x| +/- ln_q|y|)` is the q-exponential argument
/// scaled by `1-q`, and `positive_terms` is the sum of the positive power terms of the
/// constraint (used to scale the divergence tolerance).
fn resolve(s: f64, one_minus_q: f64, positive_terms: f64, sign: f64) -> QProductOutcome {
    let constraint = 1.0 + s;
    if one_minus_q < 0.0 && constraint.abs() <= DIVERGENCE_TOL * positive_terms.max(1.0) {
        return QProductOutcome::divergent(sign);
    }
    if constraint < 0.0 {
        return QProductOutcome::cutoff();
    }
    let magnitude = (s.ln_1p() / one_minus_q).exp();
    if magnitude.is_infinite() {
        return QProductOutcome::divergent(sign);
    }
    QProductOutcome::regular(sign * magnitude)
}

/// `x (*)_q 0`: zero for `q >= 1`; for `q < 1` zero on `|x| <= 1` (a cut-off when
/// `|x| < 1`) and `(|x|^(1-q) - 1)^(1/(1-q))` otherwise, carrying the sign of `x`.
fn product_with_zero(x: f64, q: EntropicIndex) -> QProductOutcome {
    let a = x.abs();
    if q.value() >= 1.0 || q.is_classical() {
        return QProductOutcome::regular(0.0);
    }
    let omq = q.one_minus();
    if a < 1.0 {
        return QProductOutcome::cutoff();
    }
    if a == 1.0 {
        return QProductOutcome::regular(0.0);
    }
    // (a^(1-q) - 1)^(1/(1-q)) = exp(ln(expm1((1-q) ln a)) / (1-q))
    let base = (omq * a.ln()).exp_m1();
    QProductOutcome::regular(x.signum() * (base.ln() / omq).exp())
}

/// `x (*)_q y = sign(xy) exp_q[ln_q|x| + ln_q|y|]`.
pub fn q_product(x: f64, y: f64, q: EntropicIndex) -> Result<QProductOutcome> {
    check_finite("q_product", x, y)?;
    if q.is_classical() {
        return Ok(QProductOutcome::regular(x * y));
    }
    if x == 0.0 {
        return Ok(product_with_zero(y, q));
    }
    if y == 0.0 {
        return Ok(product_with_zero(x, q));
    }
    let omq = q.one_minus();
    let (ax, ay) = (x.abs(), y.abs());
    let sign = x.signum() * y.signum();
    let s = omq * (ln_q_raw(ax, omq) + ln_q_raw(ay, omq));
    let positive_terms = ax.powf(omq) + ay.powf(omq);
    Ok(resolve(s, omq, positive_terms, sign))
}

/// Inverse of the q-product: `(x (*)_q y) (/)_q y = x` on the regular region.
pub fn q_divide(x: f64, y: f64, q: EntropicIndex) -> Result<QProductOutcome> {
    check_finite("q_divide", x, y)?;
    if y == 0.0 {
        return Err(domain("q_divide", "division by zero"));
    }
    if q.is_classical() {
        return Ok(QProductOutcome::regular(x / y));
    }
    let omq = q.one_minus();
    let (ax, ay) = (x.abs(), y.abs());
    let sign = if x == 0.0 { 1.0 } else { x.signum() * y.signum() };
    let lx = if x == 0.0 {
        if omq > 0.0 {
            -1.0 / omq
        } else {
            f64::NEG_INFINITY
        }
    } else {
        ln_q_raw(ax, omq)
    };
    let s = omq * (lx - ln_q_raw(ay, omq));
    let positive_terms = ax.powf(omq) + 1.0;
    Ok(resolve(s, omq, positive_terms, sign))
}

/// Left fold of [`q_product`] over `xs`. Cut-off and divergent outcomes are absorbing.
///
/// On the regular region this equals `[sum |x_i|^(1-q) - (N-1)]^(1/(1-q))` with the
/// product of signs.
pub fn q_product_n(xs: &[f64], q: EntropicIndex) -> Result<QProductOutcome> {
    let (first, rest) = xs
        .split_first()
        .ok_or_else(|| domain("q_product_n", "empty sequence"))?;
    if !first.is_finite() {
        return Err(domain("q_product_n", format!("operand must be finite, got {first}")));
    }
    let mut acc = QProductOutcome::regular(*first);
    for &x in rest {
        acc = q_product(acc.value, x, q)?;
        if !acc.is_regular() {
            // absorbing
            return Ok(acc);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> EntropicIndex {
        EntropicIndex::new(v).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn q_log_examples() {
        assert_eq!(q_log(1.0, q(0.3)).unwrap(), 0.0);
        assert!(close(q_log(4.0, q(0.5)).unwrap(), 2.0, 1e-15));
        assert!(close(q_log(std::f64::consts::E, q(1.0)).unwrap(), 1.0, 1e-15));
        assert!(q_log(0.0, q(0.5)).is_err());
        assert!(q_log(-1.0, q(1.5)).is_err());
        assert!(q_log(f64::NAN, q(1.5)).is_err());
        assert!(EntropicIndex::new(f64::NAN).is_err());
        assert!(EntropicIndex::new(f64::INFINITY).is_err());
    }

    #[test]
    fn q_exp_examples() {
        assert_eq!(q_exp(0.0, q(2.7)).unwrap(), 1.0);
        assert_eq!(q_exp(-3.0, q(0.5)).unwrap(), 0.0);
        // exactly on the cut-off
        assert_eq!(q_exp(-2.0, q(0.5)).unwrap(), 0.0);
        assert!(q_exp(f64::NAN, q(0.5)).is_err());
        for &qq in &[-1.0, 0.2, 0.9, 1.0, 1.3, 2.5] {
            for &x in &[0.01, 0.5, 1.0, 3.0, 40.0] {
                let back = q_exp(q_log(x, q(qq)).unwrap(), q(qq)).unwrap();
                assert!(close(back, x, 1e-13), "q={qq} x={x} back={back}");
            }
        }
    }

    #[test]
    fn near_classical_is_continuous() {
        for &x in &[0.1, 0.7, 2.0, 10.0] {
            for &eps in &[1e-4, 1e-7, 1e-9, 1e-11, 1e-13] {
                for qq in [1.0 + eps, 1.0 - eps] {
                    let d = (q_log(x, q(qq)).unwrap() - x.ln()).abs();
                    assert!(d <= 2.0 * eps * x.ln().powi(2) + 1e-15, "x={x} q={qq} d={d}");
                }
            }
        }
    }

    #[test]
    fn q_product_examples() {
        let r = q_product(2.0, 3.0, q(1.0)).unwrap();
        assert_eq!(r, QProductOutcome::regular(6.0));

        let r = q_product(2.0, 3.0, q(0.5)).unwrap();
        let expected = (2f64.sqrt() + 3f64.sqrt() - 1.0).powi(2);
        assert!(r.is_regular());
        assert!(close(r.value, expected, 1e-14));
        assert!(close(r.value, 4.6065, 1e-4));

        let r = q_product(0.5, 0.4, q(0.0)).unwrap();
        assert_eq!(r.region, Region::CutoffZero);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn q_product_sign_extension() {
        let p = q_product(2.0, 3.0, q(0.5)).unwrap().value;
        assert!(close(q_product(-2.0, 3.0, q(0.5)).unwrap().value, -p, 1e-15));
        assert!(close(q_product(-2.0, -3.0, q(0.5)).unwrap().value, p, 1e-15));
    }

    #[test]
    fn divergence_line_for_q_above_one() {
        // q = 2: |x|^-1 + |y|^-1 = 1 at x = y = 2
        let r = q_product(2.0, 2.0, q(2.0)).unwrap();
        assert_eq!(r.region, Region::Divergent);
        assert!(r.finite_value().is_none());
        // beyond the line: cut-off
        let r = q_product(3.0, 3.0, q(2.0)).unwrap();
        assert_eq!(r.region, Region::CutoffZero);
        // inside: regular, 1 / (1/1.5 + 1/1.5 - 1) = 3
        let r = q_product(1.5, 1.5, q(2.0)).unwrap();
        assert!(r.is_regular());
        assert!(close(r.value, 3.0, 1e-14));
    }

    #[test]
    fn zero_rule() {
        for &qq in &[1.0, 1.2, 3.0] {
            for &x in &[0.0, 0.3, 1.0, 5.0] {
                let r = q_product(x, 0.0, q(qq)).unwrap();
                assert_eq!(r.value, 0.0, "q={qq} x={x}");
                assert!(r.is_regular());
            }
        }
        // q < 1, 0 <= x <= 1 -> 0
        assert_eq!(q_product(0.5, 0.0, q(0.5)).unwrap().value, 0.0);
        assert_eq!(q_product(1.0, 0.0, q(0.5)).unwrap().value, 0.0);
        assert_eq!(q_product(0.0, 0.0, q(0.5)).unwrap().value, 0.0);
        // q < 1, x > 1 -> (x^(1-q) - 1)^(1/(1-q))
        let r = q_product(4.0, 0.0, q(0.5)).unwrap();
        assert!(close(r.value, 1.0, 1e-15));
        let r = q_product(0.0, 9.0, q(0.5)).unwrap();
        assert!(close(r.value, 4.0, 1e-14));
        let r = q_product(-9.0, 0.0, q(0.5)).unwrap();
        assert!(close(r.value, -4.0, 1e-14));
    }

    #[test]
    fn q_divide_examples() {
        let p = q_product(2.0, 3.0, q(0.8)).unwrap().value;
        assert!(close(q_divide(p, 3.0, q(0.8)).unwrap().value, 2.0, 1e-14));
        assert_eq!(q_divide(6.0, 3.0, q(1.0)).unwrap().value, 2.0);
        let r = q_divide(4.6065, 3.0, q(0.5)).unwrap();
        // 4.6065 is a rounded product, so the quotient is only close to 2
        assert!((r.value - 2.0).abs() < 1e-4);
        let exact = (2f64.sqrt() + 3f64.sqrt() - 1.0).powi(2);
        assert!((q_divide(exact, 3.0, q(0.5)).unwrap().value - 2.0).abs() <= 1e-10);
        assert!(q_divide(1.0, 0.0, q(0.5)).is_err());
    }

    #[test]
    fn q_product_n_examples() {
        assert_eq!(q_product_n(&[2.5], q(0.3)).unwrap().value, 2.5);
        assert_eq!(q_product_n(&[2.0, 3.0, 4.0], q(1.0)).unwrap().value, 24.0);
        let r = q_product_n(&[2.0, 3.0, 4.0], q(0.5)).unwrap();
        let closed = (2f64.sqrt() + 3f64.sqrt() + 2.0 - 2.0).powi(2);
        assert!(close(r.value, closed, 1e-14));
        assert!(close(r.value, 9.899, 1e-4));
        assert!(q_product_n(&[], q(0.5)).is_err());
    }

    #[test]
    fn cutoff_is_absorbing() {
        // 0.5 (*)_0 0.4 is cut off; multiplying by a large factor afterwards does not revive it
        let r = q_product_n(&[0.5, 0.4, 100.0], q(0.0)).unwrap();
        assert_eq!(r.region, Region::CutoffZero);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn neutral_element_and_duality() {
        for &qq in &[-0.5, 0.3, 0.9, 1.4, 2.2] {
            for &x in &[0.2, 1.7, 6.0] {
                let r = q_product(x, 1.0, q(qq)).unwrap();
                assert!(close(r.value, x, 1e-14));
                let y = 1.3;
                let a = q_product(x, y, q(qq)).unwrap();
                let b = q_product(1.0 / x, 1.0 / y, q(2.0 - qq)).unwrap();
                if a.is_regular() && b.is_regular() && a.value != 0.0 {
                    assert!(close(1.0 / a.value, b.value, 1e-12), "q={qq} x={x}");
                }
            }
        }
    }
}
