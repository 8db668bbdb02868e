//! Minimum-norm nonnegative solutions of `G λ = b`.
//!
//! The QP `min ½‖λ‖²  s.t.  Gλ = b, λ ≥ 0` has the dual
//! `min_w ½‖(Gᵀw)₊‖² − bᵀw` with `λ = (Gᵀw)₊`. The dual is piecewise
//! quadratic and C¹, so a semismooth Newton method with an Armijo line search
//! converges in a handful of steps when the QP is feasible. When it is not,
//! Lawson–Hanson NNLS supplies the least-squares residual.

use crate::contact::ContactJacobian;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct QpOutcome {
    pub lambda: Vec<f64>,
    /// `‖Gλ − b‖ / ‖b‖` (absolute when `b = 0`).
    pub residual: f64,
    /// Whether the Newton iteration reached the requested tolerance.
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for QpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_iter: 80,
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn solve_spd(mut h: DMatrix<f64>, rhs: &[f64], ridge: f64) -> Vec<f64> {
    let n = h.nrows();
    for i in 0..n {
        h[(i, i)] += ridge;
    }
    let mut r = ridge;
    loop {
        if let Some(ch) = h.clone().cholesky() {
            return ch.solve(&DVector::from_column_slice(rhs)).as_slice().to_vec();
        }
        for i in 0..n {
            h[(i, i)] += 9.0 * r;
        }
        r *= 10.0;
    }
}

/// Semismooth Newton on the dual, started from the least-squares multiplier.
pub fn min_norm_newton(g: &ContactJacobian, b: &[f64], o: &QpOptions) -> QpOutcome {
    let n = g.n_rows;
    let bnorm = norm(b);
    if bnorm == 0.0 || n == 0 {
        let residual = bnorm;
        return QpOutcome {
            lambda: vec![0.0; g.n_cols()],
            residual,
            converged: residual == 0.0,
            iterations: 0,
        };
    }
    let full = g.weighted_gram(|_| 1.0);
    let ridge = ridge_of(&full);
    let w0 = solve_spd(full, b, ridge);
    let out = dual_newton(g, b, w0, o.tol, o.max_iter, ridge);
    QpOutcome {
        converged: out.residual <= o.tol.max(crate::tolerances::EQUILIBRIUM_RESIDUAL),
        ..out
    }
}

fn ridge_of(gram: &DMatrix<f64>) -> f64 {
    let n = gram.nrows();
    let trace: f64 = (0..n).map(|i| gram[(i, i)]).sum();
    1e-13 * trace / n.max(1) as f64 + f64::MIN_POSITIVE
}

/// Minimises `½‖(Gᵀw)₊‖² − bᵀw` by semismooth Newton with an Armijo search.
/// Returns the iterate with the smallest primal residual.
fn dual_newton(g: &ContactJacobian, b: &[f64], mut w: Vec<f64>, tol: f64, max_iter: usize, ridge: f64) -> QpOutcome {
    let bnorm = norm(b);
    let mut best = (f64::INFINITY, vec![0.0; g.n_cols()]);
    let mut iterations = 0;
    for it in 0..=max_iter {
        iterations = it;
        let s = g.tmul(&w);
        let lambda: Vec<f64> = s.iter().map(|v| v.max(0.0)).collect();
        let mut grad = g.mul(&lambda);
        for (gi, bi) in grad.iter_mut().zip(b) {
            *gi -= bi;
        }
        let res = norm(&grad) / bnorm;
        if res < best.0 {
            best = (res, lambda);
        }
        if res <= tol || it == max_iter {
            break;
        }
        let h = g.weighted_gram(|j| if s[j] > 0.0 { 1.0 } else { 0.0 });
        let mut d = solve_spd(h, &grad, ridge);
        d.iter_mut().for_each(|v| *v = -*v);
        let slope: f64 = grad.iter().zip(&d).map(|(a, b)| a * b).sum();
        // the objective change is formed term by term: when ‖w‖ is large,
        // ½‖s₊‖² and bᵀw are both huge and their difference is lost to
        // cancellation, which stalls the search
        let e = g.tmul(&d);
        let bd: f64 = b.iter().zip(&d).map(|(x, y)| x * y).sum();
        let change = |t: f64| -> f64 {
            let quad: f64 = s
                .iter()
                .zip(&e)
                .map(|(&sj, &ej)| {
                    let new = sj + t * ej;
                    match (sj > 0.0, new > 0.0) {
                        (true, true) => t * ej * (sj + 0.5 * t * ej),
                        (true, false) => -0.5 * sj * sj,
                        (false, true) => 0.5 * new * new,
                        (false, false) => 0.0,
                    }
                })
                .sum();
            quad - t * bd
        };
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-14 {
            if change(t) <= 1e-4 * t * slope {
                w.iter_mut().zip(&d).for_each(|(a, b)| *a += t * b);
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let (residual, lambda) = best;
    QpOutcome {
        lambda,
        residual,
        converged: residual <= tol,
        iterations,
    }
}

/// Lawson–Hanson active-set NNLS: `min ‖Gλ − b‖  s.t.  λ ≥ 0`.
pub fn nnls(g: &ContactJacobian, b: &[f64], max_iter: usize) -> QpOutcome {
    let (m, nc) = (g.n_rows, g.n_cols());
    let bnorm = norm(b);
    let scale = if bnorm > 0.0 { bnorm } else { 1.0 };
    let col = |j: usize| -> DVector<f64> {
        let mut v = DVector::zeros(m);
        for (r, x) in g.columns[j].entries() {
            v[r] += x;
        }
        v
    };
    let mut x = vec![0.0; nc];
    let mut passive: Vec<usize> = Vec::new();
    let tol = 1e-12 * scale * g.columns.iter().map(|c| c.norm1()).fold(1.0, f64::max);
    let ls = |set: &[usize]| -> Vec<f64> {
        let a = DMatrix::from_columns(&set.iter().map(|&j| col(j)).collect::<Vec<_>>());
        let bb = DVector::from_column_slice(b);
        let svd = a.svd(true, true);
        svd.solve(&bb, 1e-12).map(|v| v.as_slice().to_vec()).unwrap_or_else(|_| vec![0.0; set.len()])
    };
    let mut iters = 0;
    while iters < max_iter {
        let mut r = g.mul(&x);
        r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
        let wv = g.tmul(&r);
        let cand = (0..nc)
            .filter(|j| !passive.contains(j))
            .max_by(|&i, &j| wv[i].total_cmp(&wv[j]).then(j.cmp(&i)));
        let Some(t) = cand.filter(|&j| wv[j] > tol) else { break };
        passive.push(t);
        loop {
            iters += 1;
            let z = ls(&passive);
            if z.iter().all(|&v| v > 0.0) {
                for (k, &j) in passive.iter().enumerate() {
                    x[j] = z[k];
                }
                break;
            }
            let mut alpha = 1.0f64;
            for (k, &j) in passive.iter().enumerate() {
                if z[k] <= 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - z[k]));
                }
            }
            for (k, &j) in passive.iter().enumerate() {
                x[j] += alpha * (z[k] - x[j]);
            }
            passive.retain(|&j| x[j] > 1e-15 * scale);
            for j in 0..nc {
                if !passive.contains(&j) {
                    x[j] = 0.0;
                }
            }
            if passive.is_empty() || iters >= max_iter {
                break;
            }
        }
    }
    let mut r = g.mul(&x);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri -= bi);
    QpOutcome {
        residual: norm(&r) / scale,
        lambda: x,
        converged: iters < max_iter,
        iterations: iters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::JacobianColumn;

    fn z_column(x: f64, y: f64) -> JacobianColumn {
        // contact under a unit cube at (x, y, −0.5) from its centroid
        JacobianColumn::from_pair(
            &crate::Vec3::z(),
            &crate::Vec3::zeros(),
            &crate::Vec3::new(x, y, -0.5),
            None,
            Some(0),
        )
    }

    #[test]
    fn corner_contacts_share_the_weight() {
        let cols = [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)].map(|(x, y)| z_column(x, y));
        let g = ContactJacobian::from_columns(6, cols.to_vec());
        let w = 10.0;
        let b = [0.0, 0.0, w, 0.0, 0.0, 0.0];
        let out = min_norm_newton(&g, &b, &QpOptions::default());
        assert!(out.converged, "{out:?}");
        for l in &out.lambda {
            assert!((l - w / 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn lateral_push_is_infeasible() {
        let g = ContactJacobian::from_columns(6, vec![z_column(0.0, 0.0)]);
        let b = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!(!min_norm_newton(&g, &b, &QpOptions::default()).converged);
        let out = nnls(&g, &b, 100);
        assert!((out.residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nnls_matches_known_solution() {
        let cols = [(0.5, 0.0), (-0.5, 0.0)].map(|(x, y)| z_column(x, y));
        let g = ContactJacobian::from_columns(6, cols.to_vec());
        // weight 2 with its line of action at x = 0.25
        let b = [0.0, 0.0, 2.0, 0.0, -0.5, 0.0];
        let out = nnls(&g, &b, 100);
        assert!(out.residual < 1e-12);
        assert!((out.lambda[0] - 1.5).abs() < 1e-12 && (out.lambda[1] - 0.5).abs() < 1e-12);
    }
}
