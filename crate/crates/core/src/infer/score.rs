use std::f64::consts::{PI, SQRT_2};

use crate::dist::{MixtureParams, QParams};
use crate::error::{Error, Result};
use crate::qalgebra::CLASSICAL_BAND;
use crate::specfun::{erfcx, ln_erfc};

use super::check_data;

/// Log-density of one q-log-Normal branch as a function of L = ln x, with
/// the parameter-only terms precomputed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Branch {
    q: f64,
    omq: f64,
    mu: f64,
    sigma: f64,
    ln_z: f64,
    /// sign taking B to the erfc argument: +1 for q < 1, -1 for q > 1
    side: f64,
    /// d ln erfc(a) / da at the erfc argument a
    d_ln_erfc: f64,
    big_b: f64,
}

impl Branch {
    pub fn new(p: &QParams) -> Self {
        let omq = 1.0 - p.q;
        let sigma = p.sigma;
        if omq.abs() < CLASSICAL_BAND {
            return Branch {
                q: p.q,
                omq: 0.0,
                mu: p.mu,
                sigma,
                ln_z: 0.5 * (2.0 * PI).ln() + sigma.ln(),
                side: 0.0,
                d_ln_erfc: 0.0,
                big_b: 0.0,
            };
        }
        let big_b = (-1.0 / omq - p.mu) / (SQRT_2 * sigma);
        let side = if omq > 0.0 { 1.0 } else { -1.0 };
        let a = side * big_b;
        Branch {
            q: p.q,
            omq,
            mu: p.mu,
            sigma,
            ln_z: 0.5 * (0.5 * PI).ln() + sigma.ln() + ln_erfc(a),
            side,
            d_ln_erfc: -2.0 / (PI.sqrt() * erfcx(a)),
            big_b,
        }
    }

    fn y(&self, l: f64) -> f64 {
        if self.omq == 0.0 {
            l
        } else {
            (self.omq * l).exp_m1() / self.omq
        }
    }

    /// d y / d q at fixed x.
    fn dy_dq(&self, l: f64) -> f64 {
        let w = self.omq;
        let t = w * l;
        let dy_dw = if t.abs() < 0.1 {
            // L^2 sum_k k t^(k-1) / (k+1)!
            let mut sum = 0.0;
            let mut pow = 1.0;
            let mut fact = 2.0;
            for k in 1..=20 {
                sum += k as f64 * pow / fact;
                pow *= t;
                fact *= (k + 2) as f64;
            }
            l * l * sum
        } else {
            (t * t.exp() - t.exp_m1()) / (w * w)
        };
        -dy_dw
    }

    pub fn ln_pdf(&self, l: f64) -> f64 {
        let d = (self.y(l) - self.mu) / self.sigma;
        -0.5 * d * d - self.q * l - self.ln_z
    }

    /// ln p and its gradient in (q, mu, sigma).
    pub fn ln_pdf_grad(&self, l: f64) -> (f64, [f64; 3]) {
        let y = self.y(l);
        let s2 = self.sigma * self.sigma;
        let r = y - self.mu;
        let lnp = -0.5 * r * r / s2 - self.q * l - self.ln_z;
        let (db_dq, db_dmu, db_dsigma) = if self.omq == 0.0 {
            (0.0, 0.0, 0.0)
        } else {
            let c = SQRT_2 * self.sigma;
            (-1.0 / (self.omq * self.omq * c), -1.0 / c, -self.big_b / self.sigma)
        };
        let k = self.d_ln_erfc * self.side;
        let g_q = -r / s2 * self.dy_dq(l) - l - k * db_dq;
        let g_mu = r / s2 - k * db_dmu;
        let g_sigma = r * r / (s2 * self.sigma) - 1.0 / self.sigma - k * db_dsigma;
        (lnp, [g_q, g_mu, g_sigma])
    }
}

fn check_interior(p: &QParams) -> Result<()> {
    p.validate()?;
    let b = Branch::new(p);
    if !b.ln_z.is_finite() || !b.d_ln_erfc.is_finite() {
        return Err(Error::Degenerate(format!(
            "parameters {p:?} lie on the boundary of the feasible region"
        )));
    }
    Ok(())
}

/// Gradient (d/dq, d/dmu, d/dsigma) of the q-log-Normal log-likelihood summed over `data`.
pub fn score_gradient(data: &[f64], params: &QParams) -> Result<[f64; 3]> {
    check_data(data)?;
    check_interior(params)?;
    let b = Branch::new(params);
    let mut g = [0.0; 3];
    for &x in data {
        let (_, gi) = b.ln_pdf_grad(x.ln());
        for j in 0..3 {
            g[j] += gi[j];
        }
    }
    Ok(g)
}

/// Gradient in (q, mu, sigma) of the mixture log-likelihood at fixed weight f.
/// The 2 - q branch contributes with a reversed q-derivative.
pub fn mixture_score_gradient(data: &[f64], params: &MixtureParams) -> Result<[f64; 3]> {
    check_data(data)?;
    params.validate()?;
    check_interior(&params.base)?;
    check_interior(&params.base.dual())?;
    let primary = Branch::new(&params.base);
    let dual = Branch::new(&params.base.dual());
    let (ln_f, ln_g) = (params.f.ln(), (1.0 - params.f).ln());
    let mut g = [0.0; 3];
    for &x in data {
        let l = x.ln();
        let (a, ga) = primary.ln_pdf_grad(l);
        let (b, gb) = dual.ln_pdf_grad(l);
        let (a, b) = (a + ln_f, b + ln_g);
        let m = a.max(b);
        let (wa, wb) = ((a - m).exp(), (b - m).exp());
        let (wa, wb) = (wa / (wa + wb), wb / (wa + wb));
        g[0] += wa * ga[0] - wb * gb[0];
        g[1] += wa * ga[1] + wb * gb[1];
        g[2] += wa * ga[2] + wb * gb[2];
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{ContinuousDistribution, QLogNormal};

    #[test]
    fn branch_matches_law() {
        for &(q, mu, s) in &[(0.8, 0.0, 1.0), (1.25, 0.3, 0.7), (1.0, -1.0, 2.0), (0.3, 1.0, 0.5)] {
            let p = QParams::new(q, mu, s).unwrap();
            let law = QLogNormal::new(p).unwrap();
            let b = Branch::new(&p);
            for &x in &[0.05, 0.7, 1.0, 3.0, 40.0] {
                let want = law.ln_pdf(x).unwrap();
                assert!((b.ln_pdf(x.ln()) - want).abs() < 1e-12 * want.abs().max(1.0), "{q} {x}");
                assert!((b.ln_pdf_grad(x.ln()).0 - want).abs() < 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn mu_sign() {
        let p = QParams::new(1.25, -0.5, 1.0).unwrap();
        let data = [0.8, 1.1, 1.6, 2.5, 0.9];
        assert!(score_gradient(&data, &p).unwrap()[1] > 0.0);
    }

    #[test]
    fn dy_dq_series_matches_closed_form() {
        let b = Branch::new(&QParams::new(0.9, 0.0, 1.0).unwrap());
        for &l in &[0.9999, 1.0001, -0.99] {
            let t = b.omq * l;
            let closed = -(t * t.exp() - t.exp_m1()) / (b.omq * b.omq);
            assert!((b.dy_dq(l) - closed).abs() < 1e-10 * closed.abs());
        }
    }
}
