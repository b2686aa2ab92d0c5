//! Nelder-Mead simplex minimisation.

pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) struct Simplex {
    pub ftol: f64,
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for Simplex {
    fn default() -> Self {
        Simplex {
            ftol: 1e-13,
            xtol: 1e-9,
            max_iter: 4000,
        }
    }
}

impl Simplex {
    /// Minimises `f` from `start`, with initial edge lengths `steps`. Non-finite
    /// values are treated as +inf so the simplex retreats from infeasible points.
    pub fn minimize<F: Fn(&[f64]) -> f64>(&self, f: F, start: &[f64], steps: &[f64]) -> Minimum {
        let n = start.len();
        let eval = |x: &[f64]| {
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };
        let mut pts: Vec<Vec<f64>> = vec![start.to_vec()];
        for i in 0..n {
            let mut p = start.to_vec();
            p[i] += steps[i];
            pts.push(p);
        }
        let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();
        let mut evaluations = n + 1;
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            iterations += 1;
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            pts = order.iter().map(|&i| pts[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();

            let spread = (vals[n] - vals[0]).abs();
            let diameter = pts[1..]
                .iter()
                .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread <= self.ftol * (vals[0].abs() + 1e-300) && diameter <= self.xtol {
                converged = true;
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (pts[n][j] - centroid[j])).collect() };

            let xr = along(-1.0);
            let fr = eval(&xr);
            evaluations += 1;
            if fr < vals[0] {
                let xe = along(-2.0);
                let fe = eval(&xe);
                evaluations += 1;
                if fe < fr {
                    pts[n] = xe;
                    vals[n] = fe;
                } else {
                    pts[n] = xr;
                    vals[n] = fr;
                }
                continue;
            }
            if fr < vals[n - 1] {
                pts[n] = xr;
                vals[n] = fr;
                continue;
            }
            let (xc, fc) = if fr < vals[n] {
                let x = along(-0.5);
                let v = eval(&x);
                (x, v)
            } else {
                let x = along(0.5);
                let v = eval(&x);
                (x, v)
            };
            evaluations += 1;
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
                continue;
            }
            // shrink towards the best vertex
            for i in 1..=n {
                let p: Vec<f64> = (0..n).map(|j| pts[0][j] + 0.5 * (pts[i][j] - pts[0][j])).collect();
                vals[i] = eval(&p);
                pts[i] = p;
            }
            evaluations += n;
        }
        let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
        Minimum {
            x: pts[best].clone(),
            value: vals[best],
            evaluations,
            iterations,
            converged,
        }
    }
}
