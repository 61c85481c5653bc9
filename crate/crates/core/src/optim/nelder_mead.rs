//! Nelder-Mead simplex search with dimension-adaptive coefficients.

use super::{Budgeted, SearchResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop when the simplex spread in f is at most this...
    pub f_tol: f64,
    /// ...and the spread in x is at most this.
    pub x_tol: f64,
    /// Restart the simplex around the best point after convergence, up to
    /// this many times, while that still improves f by more than `f_tol`.
    pub max_rebuilds: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 5000,
            f_tol: 1e-6,
            x_tol: 1e-6,
            max_rebuilds: 1,
        }
    }
}

fn initial_simplex(x0: &[f64]) -> Vec<Vec<f64>> {
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] = if v[i] != 0.0 { 1.05 * v[i] } else { 0.00025 };
        simplex.push(v);
    }
    simplex
}

/// Minimize `f` from `x0`. Never fails; `converged` is false when the
/// evaluation budget ran out first.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> SearchResult {
    let mut b = Budgeted::new(&mut f, opts.max_evals);
    let mut best_x = x0.to_vec();
    let mut best_f = b.call(x0);
    let mut converged = false;
    let mut start = x0.to_vec();
    for round in 0..=opts.max_rebuilds {
        let (x, fx, conv) = run_simplex(&mut b, &start, opts);
        let improvement = best_f - fx;
        if fx <= best_f {
            best_f = fx;
            best_x = x.clone();
        }
        converged = conv;
        if !conv || (round > 0 && improvement <= opts.f_tol) {
            break;
        }
        start = best_x.clone();
    }
    SearchResult {
        x: best_x,
        f: best_f,
        evals: b.evals,
        converged,
    }
}

fn run_simplex<F: FnMut(&[f64]) -> f64>(
    b: &mut Budgeted<'_, F>,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    if n == 0 {
        let v = b.call(x0);
        return (Vec::new(), v, true);
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut pts = initial_simplex(x0);
    let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
    for p in &pts {
        if b.exhausted() {
            vals.push(f64::INFINITY);
        } else {
            vals.push(b.call(p));
        }
    }

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let f_spread = vals[1..]
            .iter()
            .map(|v| (v - vals[0]).abs())
            .fold(0.0, f64::max);
        let x_spread = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, c)| (a - c).abs()))
            .fold(0.0, f64::max);
        if f_spread <= opts.f_tol && x_spread <= opts.x_tol {
            return (pts[0].clone(), vals[0], true);
        }
        if b.exhausted() {
            return (pts[0].clone(), vals[0], false);
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| pts[..n].iter().map(|p| p[k]).sum::<f64>() / nf)
            .collect();
        let toward = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n])
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = toward(alpha);
        let fr = b.call(&xr);
        if fr < vals[0] {
            let xe = toward(alpha * gamma);
            let fe = b.call(&xe);
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
        let (xc, fc, accept) = if fr < vals[n] {
            let xc = toward(alpha * rho);
            let fc = b.call(&xc);
            let ok = fc <= fr;
            (xc, fc, ok)
        } else {
            let xc = toward(-rho);
            let fc = b.call(&xc);
            let ok = fc < vals[n];
            (xc, fc, ok)
        };
        if accept {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let shrunk: Vec<f64> = pts[0]
                .iter()
                .zip(&pts[i])
                .map(|(a, x)| a + sigma * (x - a))
                .collect();
            vals[i] = b.call(&shrunk);
            pts[i] = shrunk;
            if b.exhausted() {
                break;
            }
        }
    }
}
