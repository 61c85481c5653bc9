//! Trust-region search on quadratic interpolation models. The model passes
//! through 2n+1 points; each new point changes its Hessian by the least
//! Frobenius norm that restores interpolation.

use nalgebra::{DMatrix, DVector};

use super::{Budgeted, SearchResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustRegionOptions {
    pub max_evals: usize,
    /// Initial trust radius, also the spacing of the first interpolation set.
    pub rho_begin: f64,
    /// Final radius; reaching it counts as convergence.
    pub rho_end: f64,
}

impl Default for TrustRegionOptions {
    fn default() -> Self {
        Self {
            max_evals: 5000,
            rho_begin: 0.5,
            rho_end: 1e-6,
        }
    }
}

/// Smallest update denominator accepted without a full refresh.
const MIN_DENOMINATOR: f64 = 1e-8;

/// Scaled residual of an updated inverse column above which the inverse is rebuilt.
const INVERSE_CHECK: f64 = 1e-4;

/// The expansion point moves to the best point once `|y_opt|² > SHIFT_RATIO·Δ²`;
/// far from the points, `½(y_i·y_j)²` loses the digits that carry geometry.
const SHIFT_RATIO: f64 = 1000.0;

fn kernel(a: f64) -> f64 {
    0.5 * a * a
}

/// Interpolation set, quadratic model and the inverse of the KKT matrix
/// `[[A, Xᵀ], [X, 0]]` with `A_ij = ½(y_i·y_j)²`, `X = [1; y_i]`.
struct Model {
    n: usize,
    m: usize,
    base: DVector<f64>,
    /// Points relative to `base`, one per column.
    pts: DMatrix<f64>,
    vals: Vec<f64>,
    kopt: usize,
    c: f64,
    g: DVector<f64>,
    h: DMatrix<f64>,
    binv: DMatrix<f64>,
    since_refresh: usize,
}

impl Model {
    fn value(&self, y: &DVector<f64>) -> f64 {
        self.c + self.g.dot(y) + 0.5 * y.dot(&(&self.h * y))
    }

    fn point(&self, k: usize) -> DVector<f64> {
        self.pts.column(k).into_owned()
    }

    fn yopt(&self) -> DVector<f64> {
        self.point(self.kopt)
    }

    /// `[½(y_k·y)²; 1; y]`.
    fn phi(&self, y: &DVector<f64>) -> DVector<f64> {
        let dots = self.pts.tr_mul(y);
        let mut v = DVector::zeros(self.m + self.n + 1);
        for k in 0..self.m {
            v[k] = kernel(dots[k]);
        }
        v[self.m] = 1.0;
        v.rows_mut(self.m + 1, self.n).copy_from(y);
        v
    }

    /// Column `t` of the KKT matrix if point `t` were `y`.
    fn column_for(&self, t: usize, y: &DVector<f64>) -> DVector<f64> {
        let mut v = self.phi(y);
        v[t] = kernel(y.norm_squared());
        v
    }

    fn kkt(&self) -> DMatrix<f64> {
        let (n, m) = (self.n, self.m);
        let mut w = DMatrix::zeros(m + n + 1, m + n + 1);
        let gram = self.pts.tr_mul(&self.pts);
        for i in 0..m {
            for j in 0..m {
                w[(i, j)] = kernel(gram[(i, j)]);
            }
            w[(i, m)] = 1.0;
            w[(m, i)] = 1.0;
            for j in 0..n {
                w[(i, m + 1 + j)] = self.pts[(j, i)];
                w[(m + 1 + j, i)] = self.pts[(j, i)];
            }
        }
        w
    }

    fn lagrange_gradient(&self, t: usize, y: &DVector<f64>) -> DVector<f64> {
        let col = self.binv.column(t);
        let dots = self.pts.tr_mul(y);
        let weights = DVector::from_fn(self.m, |k, _| col[k] * dots[k]);
        col.rows(self.m + 1, self.n).into_owned() + &self.pts * weights
    }

    /// Change the model by `D` with `D(y_k) = r_k` and least-norm Hessian change.
    fn absorb(&mut self, coef: &DVector<f64>) {
        let (m, n) = (self.m, self.n);
        self.c += coef[m];
        self.g += coef.rows(m + 1, n);
        let mut scaled = self.pts.clone();
        for k in 0..m {
            scaled.column_mut(k).scale_mut(coef[k]);
        }
        self.h += &scaled * self.pts.transpose();
    }

    fn reset_kopt(&mut self) {
        let mut k = 0;
        for i in 1..self.m {
            if self.vals[i] < self.vals[k] {
                k = i;
            }
        }
        self.kopt = k;
    }

    /// `D` with `W = D W' D`, where `W'` is the KKT matrix in units where
    /// the points have length about one: `diag(σ²·1_m, σ⁻², σ⁻¹·1_n)`.
    fn unit_scales(&self) -> Option<DVector<f64>> {
        let (m, n) = (self.m, self.n);
        let sigma = self.pts.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !(sigma > 0.0) || !sigma.is_finite() {
            return None;
        }
        Some(DVector::from_fn(m + n + 1, |i, _| {
            if i < m {
                sigma * sigma
            } else if i == m {
                1.0 / (sigma * sigma)
            } else {
                1.0 / sigma
            }
        }))
    }

    /// Recompute the inverse KKT matrix and remove accumulated interpolation
    /// error. False when the interpolation set is singular.
    fn refresh(&mut self) -> bool {
        let size = self.m + self.n + 1;
        let Some(scale) = self.unit_scales() else {
            return false;
        };
        let w = self.kkt();
        let unit = DMatrix::from_fn(size, size, |i, j| w[(i, j)] / (scale[i] * scale[j]));
        let Some(inv) = unit.lu().try_inverse() else {
            return false;
        };
        let inv = DMatrix::from_fn(size, size, |i, j| {
            0.5 * (inv[(i, j)] + inv[(j, i)]) / (scale[i] * scale[j])
        });
        if inv.iter().any(|v| !v.is_finite()) {
            return false;
        }
        self.binv = inv;
        let mut r = DVector::zeros(self.m + self.n + 1);
        for k in 0..self.m {
            r[k] = self.vals[k] - self.value(&self.point(k));
        }
        let coef = &self.binv * r;
        self.absorb(&coef);
        self.since_refresh = 0;
        true
    }

    /// Move the expansion point to the best point when it has drifted far
    /// relative to the trust radius.
    fn maybe_shift(&mut self, delta: f64) -> bool {
        let s = self.yopt();
        if s.norm_squared() <= SHIFT_RATIO * delta * delta {
            return true;
        }
        self.c = self.value(&s);
        self.g += &self.h * &s;
        self.base += &s;
        for mut col in self.pts.column_iter_mut() {
            col -= &s;
        }
        self.refresh()
    }

    /// Put `(y, f)` in slot `t` and update the model to interpolate it.
    fn replace(&mut self, t: usize, y: DVector<f64>, f: f64) -> bool {
        let residual = f - self.value(&y);
        let delta_col = self.column_for(t, &y) - self.column_for(t, &self.point(t));
        let mut u = delta_col;
        u[t] *= 0.5;
        let bt = self.binv.column(t).into_owned();
        let bu = &self.binv * &u;
        let s00 = bt[t];
        let s01 = 1.0 + bu[t];
        let s11 = u.dot(&bu);
        let det = s00 * s11 - s01 * s01;
        self.pts.set_column(t, &y);
        self.vals[t] = f;
        self.reset_kopt();
        self.since_refresh += 1;
        if det.abs() <= MIN_DENOMINATOR || self.since_refresh >= self.m {
            return self.refresh();
        }
        let (i00, i01, i11) = (s11 / det, -s01 / det, s00 / det);
        self.binv.ger(-i00, &bt, &bt, 1.0);
        self.binv.ger(-i01, &bt, &bu, 1.0);
        self.binv.ger(-i01, &bu, &bt, 1.0);
        self.binv.ger(-i11, &bu, &bu, 1.0);
        if !self.column_is_inverted(t) {
            return self.refresh();
        }
        let coef = self.binv.column(t).scale(residual);
        self.absorb(&coef);
        true
    }

    /// Whether the updated inverse maps column `t` of the KKT matrix to
    /// `e_t`, measured in unit scaling.
    fn column_is_inverted(&self, t: usize) -> bool {
        let Some(scale) = self.unit_scales() else {
            return false;
        };
        let mut r = &self.binv * self.column_for(t, &self.point(t));
        r[t] -= 1.0;
        r.iter()
            .zip(scale.iter())
            .all(|(v, s)| (v * s / scale[t]).abs() <= INVERSE_CHECK)
    }

    fn farthest(&self) -> (usize, f64) {
        let yopt = self.yopt();
        let mut best = (self.kopt, 0.0);
        for k in 0..self.m {
            let d = (self.pts.column(k) - &yopt).norm();
            if d > best.1 {
                best = (k, d);
            }
        }
        best
    }

    /// Denominators `σ_k = α_k β + τ_k²` of the inverse update for putting
    /// `y` in each slot `k`; `τ_k` is the Lagrange value `l_k(y)`.
    fn denominators(&self, y: &DVector<f64>) -> DVector<f64> {
        let w = self.phi(y);
        let bw = &self.binv * &w;
        let beta = kernel(y.norm_squared()) - w.dot(&bw);
        DVector::from_fn(self.m, |k, _| self.binv[(k, k)] * beta + bw[k] * bw[k])
    }

    /// Slot to give up for a new point at `y`: a large denominator keeps the
    /// update well conditioned, distance from the best point favors
    /// dropping stale points.
    fn drop_slot(&self, y: &DVector<f64>, improved: bool, delta: f64) -> Option<usize> {
        let sigma = self.denominators(y);
        let center = if improved { y.clone() } else { self.yopt() };
        let mut best: Option<(usize, f64)> = None;
        for k in 0..self.m {
            if !improved && k == self.kopt {
                continue;
            }
            let d2 = (self.pts.column(k) - &center).norm_squared() / (delta * delta);
            let score = sigma[k].abs() * (d2 * d2).max(1.0);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((k, score));
            }
        }
        best.filter(|&(k, _)| sigma[k].abs() > MIN_DENOMINATOR)
            .map(|(k, _)| k)
    }

    /// Point within `radius` of the best point, along the gradient of `l_t`
    /// or toward another interpolation point, that makes `|l_t|` largest.
    fn geometry_point(&self, t: usize, radius: f64) -> DVector<f64> {
        let (m, n) = (self.m, self.n);
        let yopt = self.yopt();
        let col = self.binv.column(t);
        let lam = col.rows(0, m);
        let cy = col.rows(m + 1, n);
        // Along y = yopt + s·dir, the dot products with the points are a + s·b.
        let a = self.pts.tr_mul(&yopt);
        let base_value = col[m] + cy.dot(&yopt);
        let line_value = |b: &DVector<f64>, cy_dir: f64, s: f64| {
            let quad: f64 = (0..m).map(|i| lam[i] * kernel(a[i] + s * b[i])).sum();
            quad + base_value + s * cy_dir
        };
        let mut best = (yopt.clone(), -1.0);
        let mut consider = |dir: DVector<f64>, b: DVector<f64>, norm: f64| {
            if norm <= 0.0 {
                return;
            }
            let cy_dir = cy.dot(&dir);
            for s in [radius / norm, -radius / norm] {
                let v = line_value(&b, cy_dir, s).abs();
                if v > best.1 {
                    best = (&yopt + dir.scale(s), v);
                }
            }
        };
        let grad = self.lagrange_gradient(t, &yopt);
        let b = self.pts.tr_mul(&grad);
        let norm = grad.norm();
        consider(grad, b, norm);
        let gram = self.pts.tr_mul(&self.pts);
        for k in 0..m {
            if k == self.kopt {
                continue;
            }
            let dir = self.pts.column(k) - &yopt;
            let b = gram.column(k) - &a;
            let norm = dir.norm();
            consider(dir, b, norm);
        }
        best.0
    }
}

/// Approximate minimizer of `g·d + ½dᵀHd` over `|d| ≤ delta` by truncated
/// conjugate gradients.
fn steihaug(g: &DVector<f64>, h: &DMatrix<f64>, delta: f64) -> DVector<f64> {
    let n = g.len();
    let mut d = DVector::zeros(n);
    let g_norm = g.norm();
    if g_norm == 0.0 {
        return d;
    }
    let to_boundary = |d: &DVector<f64>, p: &DVector<f64>| {
        let a = p.norm_squared();
        let b = 2.0 * d.dot(p);
        let c = d.norm_squared() - delta * delta;
        let tau = (-b + (b * b - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a);
        d + p.scale(tau)
    };
    let mut r = -g;
    let mut p = r.clone();
    let mut rr = r.norm_squared();
    for _ in 0..2 * n {
        let hp = h * &p;
        let curv = p.dot(&hp);
        if curv <= 1e-14 * p.norm_squared() {
            return to_boundary(&d, &p);
        }
        let alpha = rr / curv;
        let next = &d + p.scale(alpha);
        if next.norm() >= delta {
            return to_boundary(&d, &p);
        }
        d = next;
        r -= hp.scale(alpha);
        let rr_new = r.norm_squared();
        if rr_new.sqrt() <= 1e-10 * g_norm {
            break;
        }
        p = &r + p.scale(rr_new / rr);
        rr = rr_new;
    }
    d
}

fn shrink(rho: &mut f64, delta: &mut f64, rho_end: f64) {
    let ratio = *rho / rho_end;
    let next = if ratio <= 16.0 {
        rho_end
    } else if ratio <= 250.0 {
        (*rho * rho_end).sqrt()
    } else {
        0.1 * *rho
    };
    *delta = (0.5 * *rho).max(next);
    *rho = next;
}

/// Minimize `f` from `x0`. Never fails; `converged` is false when the
/// evaluation budget ran out before the radius reached `rho_end`.
pub fn trust_region<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &TrustRegionOptions,
) -> SearchResult {
    let n = x0.len();
    let mut b = Budgeted::new(&mut f, opts.max_evals);
    let mut best_x = x0.to_vec();
    let mut best_f = b.call(x0);
    if n == 0 {
        return SearchResult {
            x: best_x,
            f: best_f,
            evals: b.evals,
            converged: true,
        };
    }
    let rho_end = opts.rho_end.min(opts.rho_begin);
    let mut rho = opts.rho_begin;
    let mut delta = rho;
    let m = 2 * n + 1;
    let base = DVector::from_column_slice(x0);
    let mut pts = DMatrix::zeros(n, m);
    let mut vals = vec![best_f; m];
    for i in 0..n {
        for (slot, step) in [(2 * i + 1, rho), (2 * i + 2, -rho)] {
            if b.exhausted() {
                return SearchResult {
                    x: best_x,
                    f: best_f,
                    evals: b.evals,
                    converged: false,
                };
            }
            pts[(i, slot)] = step;
            let mut x = x0.to_vec();
            x[i] += step;
            vals[slot] = b.call(&x);
            if vals[slot] < best_f {
                best_f = vals[slot];
                best_x = x;
            }
        }
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return SearchResult {
            x: best_x,
            f: best_f,
            evals: b.evals,
            converged: false,
        };
    }
    let f0 = vals[0];
    let mut g = DVector::zeros(n);
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        let (fp, fm) = (vals[2 * i + 1], vals[2 * i + 2]);
        g[i] = (fp - fm) / (2.0 * rho);
        h[(i, i)] = (fp + fm - 2.0 * f0) / (rho * rho);
    }
    let mut model = Model {
        n,
        m,
        base,
        pts,
        vals,
        kopt: 0,
        c: f0,
        g,
        h,
        binv: DMatrix::zeros(m + n + 1, m + n + 1),
        since_refresh: 0,
    };
    model.reset_kopt();
    if !model.refresh() {
        return SearchResult {
            x: best_x,
            f: best_f,
            evals: b.evals,
            converged: false,
        };
    }

    let mut converged = false;
    let mut geometry_due = false;
    let mut recovered = false;
    let record = |x: &DVector<f64>, fx: f64, best_x: &mut Vec<f64>, best_f: &mut f64| {
        if fx < *best_f {
            *best_f = fx;
            *best_x = x.as_slice().to_vec();
        }
    };
    while !b.exhausted() {
        if !model.maybe_shift(delta) {
            break;
        }
        let yopt = model.yopt();
        let fopt = model.vals[model.kopt];

        if geometry_due {
            geometry_due = false;
            let (t, dist) = model.farthest();
            if dist > 2.0 * delta {
                let radius = (0.1 * dist).min(0.5 * delta).max(rho);
                let y = model.geometry_point(t, radius);
                let x = &model.base + &y;
                let fy = b.call(x.as_slice());
                record(&x, fy, &mut best_x, &mut best_f);
                if !fy.is_finite() || !model.replace(t, y, fy) {
                    break;
                }
                continue;
            }
        }

        let gopt = &model.g + &model.h * &yopt;
        let d = steihaug(&gopt, &model.h, delta);
        let dn = d.norm();
        if !dn.is_finite() {
            if recovered || !model.refresh() {
                break;
            }
            recovered = true;
            continue;
        }
        recovered = false;
        if dn < 0.5 * rho {
            let (t, dist) = model.farthest();
            if dist > 2.0 * delta && t != model.kopt {
                geometry_due = true;
                continue;
            }
            if rho <= rho_end {
                converged = true;
                break;
            }
            shrink(&mut rho, &mut delta, rho_end);
            continue;
        }
        let predicted = -(gopt.dot(&d) + 0.5 * d.dot(&(&model.h * &d)));
        let y = &yopt + &d;
        let x = &model.base + &y;
        let fy = b.call(x.as_slice());
        record(&x, fy, &mut best_x, &mut best_f);
        if !fy.is_finite() {
            delta = 0.5 * dn;
            if delta <= 1.5 * rho {
                delta = rho;
            }
            continue;
        }
        let ratio = if predicted > 0.0 {
            (fopt - fy) / predicted
        } else {
            -1.0
        };
        delta = if ratio <= 0.1 {
            0.5 * dn
        } else if ratio <= 0.7 {
            (0.5 * delta).max(dn)
        } else {
            (0.5 * delta).max(2.0 * dn)
        };
        if delta <= 1.5 * rho {
            delta = rho;
        }
        match model.drop_slot(&y, fy < fopt, delta) {
            Some(t) => {
                if !model.replace(t, y, fy) {
                    break;
                }
            }
            None => {
                if !model.refresh() {
                    break;
                }
                geometry_due = true;
            }
        }
        if ratio <= 0.1 {
            if model.farthest().1 > 2.0 * delta {
                geometry_due = true;
            } else if delta <= rho {
                if rho <= rho_end {
                    converged = true;
                    break;
                }
                shrink(&mut rho, &mut delta, rho_end);
            }
        }
    }
    SearchResult {
        x: best_x,
        f: best_f,
        evals: b.evals,
        converged,
    }
}
