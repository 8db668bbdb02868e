//! Brute-force reference solvers and random micro-instances shared by the
//! integration tests. Everything here is deliberately naive: enumeration of
//! vertices, orthants and active sets with dense linear algebra.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tia_core::contact::{ContactJacobian, JacobianColumn};

/// Dense columns of a Jacobian.
pub fn dense_columns(g: &ContactJacobian) -> Vec<Vec<f64>> {
    g.columns
        .iter()
        .map(|c| {
            let mut v = vec![0.0; g.n_rows];
            for (i, x) in c.entries() {
                v[i] += x;
            }
            v
        })
        .collect()
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Solves the square system when it is well conditioned.
fn solve_square(rows: &[&[f64]], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let lu = m.full_piv_lu();
    let u = lu.u();
    let big = (0..n).map(|k| u[(k, k)].abs()).fold(0.0, f64::max);
    if (0..n).any(|k| u[(k, k)].abs() <= 1e-10 * big.max(1e-300)) {
        return None;
    }
    lu.solve(&DVector::from_column_slice(rhs)).map(|v| v.as_slice().to_vec())
}

/// `max cᵀx  s.t.  aᵢ·x ≥ βᵢ` over a bounded polytope containing the origin,
/// by enumerating every basic solution.
pub fn polytope_max(c: &[f64], cons: &[(Vec<f64>, f64)]) -> f64 {
    let n = c.len();
    let mut best = 0.0f64;
    for_each_subset(cons.len(), n, |s| {
        let rows: Vec<&[f64]> = s.iter().map(|&i| cons[i].0.as_slice()).collect();
        let rhs: Vec<f64> = s.iter().map(|&i| cons[i].1).collect();
        let Some(x) = solve_square(&rows, &rhs) else { return };
        let ok = cons
            .iter()
            .all(|(a, b)| a.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() >= b - 1e-9);
        if ok {
            best = best.max(c.iter().zip(&x).map(|(p, q)| p * q).sum());
        }
    });
    best
}

/// `max 1ᵀGᵀx  s.t.  Gᵀx ≥ 0, ‖x‖∞ ≤ 1`.
pub fn opening_oracle(cols: &[Vec<f64>], n: usize) -> f64 {
    let mut c = vec![0.0; n];
    for col in cols {
        for i in 0..n {
            c[i] += col[i];
        }
    }
    let mut cons: Vec<(Vec<f64>, f64)> = cols.iter().map(|g| (g.clone(), 0.0)).collect();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        cons.push((e.clone(), -1.0));
        e[i] = -1.0;
        cons.push((e, -1.0));
    }
    polytope_max(&c, &cons)
}

/// `max fᵀx  s.t.  Gᵀx ≥ 0, ‖x‖₁ ≤ 1`, one orthant at a time.
pub fn work_rate_oracle(cols: &[Vec<f64>], f: &[f64]) -> f64 {
    let n = f.len();
    let mut best = 0.0f64;
    for mask in 0..(1u32 << n) {
        let sigma: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let mut cons: Vec<(Vec<f64>, f64)> = cols.iter().map(|g| (g.clone(), 0.0)).collect();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = sigma[i];
            cons.push((e, 0.0));
        }
        cons.push((sigma.iter().map(|s| -s).collect(), -1.0));
        best = best.max(polytope_max(f, &cons));
    }
    best
}

/// `min ½‖λ‖²  s.t.  Gλ = b, λ ≥ 0` by enumerating supports. On its support
/// the optimum is the minimum-norm solution of the reduced system.
pub fn qp_oracle(cols: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let (n, nc) = (b.len(), cols.len());
    let bv = DVector::from_column_slice(b);
    let bnorm = bv.norm().max(1.0);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << nc) {
        let support: Vec<usize> = (0..nc).filter(|j| mask >> j & 1 == 1).collect();
        let lam_s = if support.is_empty() {
            DVector::zeros(0)
        } else {
            let gs = DMatrix::from_fn(n, support.len(), |i, k| cols[support[k]][i]);
            match gs.svd(true, true).solve(&bv, 1e-12) {
                Ok(v) => v,
                Err(_) => continue,
            }
        };
        if lam_s.iter().any(|v| *v < -1e-12) {
            continue;
        }
        let mut lam = vec![0.0; nc];
        for (k, &j) in support.iter().enumerate() {
            lam[j] = lam_s[k].max(0.0);
        }
        let mut r = -bv.clone();
        for j in 0..nc {
            for i in 0..n {
                r[i] += cols[j][i] * lam[j];
            }
        }
        if r.norm() > 1e-9 * bnorm {
            continue;
        }
        let nrm: f64 = lam.iter().map(|v| v * v).sum();
        if best.as_ref().map_or(true, |(bn, _)| nrm < *bn) {
            best = Some((nrm, lam));
        }
    }
    best.map(|(_, l)| l)
}

/// A random statics instance with one free body (six DOFs).
pub struct MicroInstance {
    pub g: ContactJacobian,
    pub f: Vec<f64>,
    /// A load known to be balanced by nonnegative contact forces.
    pub balanced: Vec<f64>,
}

/// Odd seeds give contacts between a unit cube and fixed surroundings (a
/// physical Jacobian); even seeds give unstructured random columns.
pub fn micro_instance(seed: u64) -> MicroInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nc = rng.gen_range(3..=12usize);
    let columns: Vec<JacobianColumn> = if seed % 2 == 1 {
        let c = Vector3::new(0.5, 0.5, 0.5);
        (0..nc)
            .map(|_| {
                let axis = rng.gen_range(0..3);
                let side = if rng.gen_bool(0.5) { 1.0 } else { 0.0 };
                let mut p = Vector3::new(rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>());
                p[axis] = side;
                // outward normal of the cube face, which is the normal from
                // the fixed neighbour into the free body reversed
                let mut out = Vector3::zeros();
                out[axis] = if side == 1.0 { 1.0 } else { -1.0 };
                let n = -out;
                JacobianColumn::from_pair(&n, &Vector3::zeros(), &(p - c), None, Some(0))
            })
            .collect()
    } else {
        (0..nc)
            .map(|_| {
                let mut vs = [0.0; 6];
                for v in &mut vs {
                    *v = rng.gen_range(-1.0..1.0);
                }
                JacobianColumn {
                    m: None,
                    s: Some(0),
                    vm: [0.0; 6],
                    vs,
                }
            })
            .collect()
    };
    let g = ContactJacobian::from_columns(6, columns);
    let f: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let lam0: Vec<f64> = (0..nc)
        .map(|_| if rng.gen_bool(0.6) { rng.gen_range(0.0..2.0) } else { 0.0 })
        .collect();
    let balanced: Vec<f64> = g.mul(&lam0).iter().map(|v| -v).collect();
    MicroInstance { g, f, balanced }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}
