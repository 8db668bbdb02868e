//! Small dense kernels used by the LP and QP solvers.

use nalgebra::{DMatrix, SymmetricEigen};

/// LU factorisation `P·A = L·U` with partial pivoting, row-major storage.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    /// Factorises the `n × n` row-major matrix `a`. Returns `None` when a
    /// pivot falls below `tol` times the largest entry.
    pub fn factor(n: usize, mut a: Vec<f64>, tol: f64) -> Option<Self> {
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if pv <= tol * scale {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let d = a[k * n + k];
            let (head, tail) = a.split_at_mut((k + 1) * n);
            let row_k = &head[k * n..];
            for i in 0..(n - k - 1) {
                let row = &mut tail[i * n..(i + 1) * n];
                let f = row[k] / d;
                if f == 0.0 {
                    continue;
                }
                row[k] = f;
                for j in (k + 1)..n {
                    row[j] -= f * row_k[j];
                }
            }
        }
        Some(Self { n, lu: a, perm })
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / row[i];
        }
        b.copy_from_slice(&x);
    }

    /// Solves `Aᵀ x = b` in place.
    pub fn solve_transpose(&self, b: &mut [f64]) {
        let n = self.n;
        // Uᵀ z = b
        let mut z = b.to_vec();
        for i in 0..n {
            let zi = z[i] / self.lu[i * n + i];
            z[i] = zi;
            if zi != 0.0 {
                let row = &self.lu[i * n..(i + 1) * n];
                for j in (i + 1)..n {
                    z[j] -= row[j] * zi;
                }
            }
        }
        // Lᵀ w = z
        for i in (0..n).rev() {
            let wi = z[i];
            if wi != 0.0 {
                let row = &self.lu[i * n..i * n + i];
                for (j, l) in row.iter().enumerate() {
                    z[j] -= l * wi;
                }
            }
        }
        // x = Pᵀ w
        for (i, &p) in self.perm.iter().enumerate() {
            b[p] = z[i];
        }
    }
}

/// Numerical rank of a symmetric positive semidefinite matrix: eigenvalues
/// above `rel_tol` times the largest one.
pub fn psd_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.nrows() == 0 {
        return 0;
    }
    let eig = SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if max == 0.0 {
        return 0;
    }
    eig.eigenvalues.iter().filter(|&&v| v > rel_tol * max).count()
}
