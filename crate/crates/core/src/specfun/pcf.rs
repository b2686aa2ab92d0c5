//! Parabolic cylinder function D_a(z) for real order and argument.
//!
//! Negative orders use
//!   D_{-nu}(z) = exp(-z^2/4) / Gamma(nu) * int_0^inf t^(nu-1) exp(-t^2/2 - z t) dt,
//! integrated after shifting the exponent by its maximum so that large |z|
//! and large nu stay representable. Positive orders climb the recurrence
//! D_{a+1} = z D_a - a D_{a-1}.

use crate::error::{domain, Result};
use crate::specfun::gamma::ln_gamma;
use crate::specfun::quad::Quadrature;

/// ln D_{-nu}(z) for nu > 0.
pub fn ln_pcf_d_neg(nu: f64, z: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(domain("pcf_d", format!("order -nu needs nu > 0, got nu={nu}")));
    }
    if !z.is_finite() {
        return Err(domain("pcf_d", format!("non-finite argument {z}")));
    }
    let a = nu - 1.0;
    let exponent = |t: f64| {
        let lead = if a == 0.0 { 0.0 } else { a * t.ln() };
        lead - 0.5 * t * t - z * t
    };
    // peak of the integrand
    let peak = if a > 0.0 {
        let disc = (z * z + 4.0 * a).sqrt();
        if z < 0.0 {
            0.5 * (disc - z)
        } else {
            2.0 * a / (z + disc)
        }
    } else {
        (-z).max(0.0)
    };
    let shift = if peak > 0.0 { exponent(peak) } else { 0.0 };
    let quad = Quadrature {
        abs_tol: 1e-300,
        rel_tol: 1e-13,
        max_evals: 1_000_000,
    };
    let integral = if a < 0.0 {
        // t = u^(1/nu) absorbs the t^(nu-1) singularity at the origin
        let kernel = |u: f64| {
            if u <= 0.0 {
                return (-shift).exp();
            }
            let t = u.powf(1.0 / nu);
            (-0.5 * t * t - z * t - shift).exp()
        };
        let pts: Vec<f64> = if peak > 0.0 {
            vec![0.0, peak.powf(nu), f64::INFINITY]
        } else {
            vec![0.0, 1.0, f64::INFINITY]
        };
        quad.integrate_over(kernel, &pts)?.value / nu
    } else {
        let integrand = |t: f64| if t <= 0.0 { 0.0 } else { (exponent(t) - shift).exp() };
        if peak > 0.0 {
            quad.integrate_over(integrand, &[0.0, peak, f64::INFINITY])?.value
        } else {
            quad.integrate(integrand, 0.0, f64::INFINITY)?.value
        }
    };
    Ok(-0.25 * z * z - ln_gamma(nu)? + shift + integral.ln())
}

/// D_{-nu}(z) for nu > 0.
pub fn pcf_d_neg(nu: f64, z: f64) -> Result<f64> {
    ln_pcf_d_neg(nu, z).map(f64::exp)
}

/// D_a(z) for any real order a.
pub fn pcf_d(order: f64, z: f64) -> Result<f64> {
    if !order.is_finite() {
        return Err(domain("pcf_d", format!("non-finite order {order}")));
    }
    if order == 0.0 {
        return Ok((-0.25 * z * z).exp());
    }
    if order < 0.0 {
        return pcf_d_neg(-order, z);
    }
    let base = order - order.ceil();
    let mut prev = pcf_d_neg(1.0 - base, z)?;
    let mut cur = if base == 0.0 {
        (-0.25 * z * z).exp()
    } else {
        pcf_d_neg(-base, z)?
    };
    let mut a = base;
    while a < order - 0.5 {
        let next = z * cur - a * prev;
        prev = cur;
        cur = next;
        a += 1.0;
    }
    Ok(cur)
}
