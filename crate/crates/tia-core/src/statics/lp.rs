//! Bounded-variable revised primal simplex.
//!
//! Solves `min cᵀx  s.t.  A x = b,  lb ≤ x ≤ ub` with a two-phase method
//! (artificial variables), Harris' two-pass ratio test, product-form basis
//! updates on top of a dense LU, and a fall-back to Bland's rule when the
//! objective stalls.

use crate::linalg::DenseLu;

/// Sparse matrix in compressed-column form.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CscMatrix {
    pub n_rows: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CscMatrix {
    pub fn new(n_rows: usize) -> Self {
        Self {
            n_rows,
            col_ptr: vec![0],
            row_idx: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn push_col(&mut self, entries: impl IntoIterator<Item = (usize, f64)>) {
        for (r, v) in entries {
            debug_assert!(r < self.n_rows);
            if v != 0.0 {
                self.row_idx.push(r);
                self.vals.push(v);
            }
        }
        self.col_ptr.push(self.row_idx.len());
    }

    pub fn n_cols(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.row_idx[s..e], &self.vals[s..e])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub a: CscMatrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Row duals: reduced costs are `c_j − a_jᵀ y`.
    pub y: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("LP infeasible (phase-1 objective {0:.3e})")]
    Infeasible(f64),
    #[error("LP unbounded after {0} iterations")]
    Unbounded(usize),
    #[error("LP iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("singular basis at iteration {0}")]
    SingularBasis(usize),
    #[error("malformed LP: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    pub max_iter: usize,
    pub refactor_every: usize,
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub pivot_tol: f64,
    /// Iterations without objective progress before switching to Bland's rule.
    pub stall_limit: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            max_iter: 200_000,
            refactor_every: 64,
            feas_tol: 1e-9,
            opt_tol: 1e-9,
            pivot_tol: 1e-9,
            stall_limit: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stat {
    Basic,
    Lower,
    Upper,
    Zero,
}

struct Simplex<'a> {
    p: &'a LpProblem,
    o: LpOptions,
    m: usize,
    n: usize,
    art_sign: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    stat: Vec<Stat>,
    basis: Vec<usize>,
    col_norm: Vec<f64>,
    lu: Option<DenseLu>,
    etas: Vec<(usize, Vec<f64>)>,
    iters: usize,
}

pub fn solve(p: &LpProblem, o: &LpOptions) -> Result<LpSolution, LpError> {
    let (m, n) = (p.a.n_rows, p.a.n_cols());
    if p.b.len() != m || p.c.len() != n || p.lb.len() != n || p.ub.len() != n {
        return Err(LpError::Malformed("dimension mismatch".into()));
    }
    if p.lb.iter().zip(&p.ub).any(|(l, u)| l > u || l.is_nan() || u.is_nan()) {
        return Err(LpError::Malformed("inconsistent bounds".into()));
    }
    let mut s = Simplex::new(p, *o);
    s.run_phase()?;
    let infeas: f64 = (n..n + m).map(|j| s.x[j].abs()).sum();
    let bscale = p.b.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if infeas > 1e3 * o.feas_tol * bscale {
        return Err(LpError::Infeasible(infeas));
    }
    for j in n..n + m {
        s.ub[j] = 0.0;
        s.cost[j] = 0.0;
        if s.stat[j] != Stat::Basic {
            s.x[j] = 0.0;
            s.stat[j] = Stat::Lower;
        }
    }
    s.cost[..n].copy_from_slice(&p.c);
    s.run_phase()?;
    s.refactor()?;
    let y = s.duals();
    let x = s.x[..n].to_vec();
    let objective = p.c.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        x,
        y,
        objective,
        iterations: s.iters,
    })
}

impl<'a> Simplex<'a> {
    fn new(p: &'a LpProblem, o: LpOptions) -> Self {
        let (m, n) = (p.a.n_rows, p.a.n_cols());
        let mut lb = p.lb.clone();
        let mut ub = p.ub.clone();
        lb.extend(std::iter::repeat(0.0).take(m));
        ub.extend(std::iter::repeat(f64::INFINITY).take(m));
        let mut x = vec![0.0; n + m];
        let mut stat = vec![Stat::Zero; n + m];
        for j in 0..n {
            if lb[j].is_finite() {
                x[j] = lb[j];
                stat[j] = Stat::Lower;
            } else if ub[j].is_finite() {
                x[j] = ub[j];
                stat[j] = Stat::Upper;
            }
        }
        let mut r = p.b.clone();
        for j in 0..n {
            if x[j] != 0.0 {
                let (ri, rv) = p.a.col(j);
                for (i, v) in ri.iter().zip(rv) {
                    r[*i] -= v * x[j];
                }
            }
        }
        let art_sign: Vec<f64> = r.iter().map(|v| if *v < 0.0 { -1.0 } else { 1.0 }).collect();
        // crash: a sign-compatible singleton column at a zero lower bound
        // replaces the artificial of its row
        let mut basis: Vec<usize> = (n..n + m).collect();
        for j in 0..n {
            let (ri, rv) = p.a.col(j);
            if ri.len() != 1 || lb[j] != 0.0 || ub[j] != f64::INFINITY || rv[0] == 0.0 {
                continue;
            }
            let i = ri[0];
            let v = r[i] / rv[0];
            if basis[i] >= n && v >= 0.0 {
                basis[i] = j;
                x[j] = v;
                stat[j] = Stat::Basic;
            }
        }
        for i in 0..m {
            if basis[i] == n + i {
                x[n + i] = r[i].abs();
                stat[n + i] = Stat::Basic;
            } else {
                stat[n + i] = Stat::Lower;
            }
        }
        let mut cost = vec![0.0; n + m];
        for c in &mut cost[n..] {
            *c = 1.0;
        }
        let col_norm = (0..n)
            .map(|j| (1.0 + p.a.col(j).1.iter().map(|v| v * v).sum::<f64>()).sqrt())
            .chain(std::iter::repeat(2f64.sqrt()).take(m))
            .collect();
        let mut s = Self {
            p,
            o,
            m,
            n,
            art_sign,
            lb,
            ub,
            cost,
            x,
            stat,
            basis,
            col_norm,
            lu: None,
            etas: Vec::new(),
            iters: 0,
        };
        s.factor_only().expect("crash basis is diagonal");
        s
    }

    fn column(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if j < self.n {
            let (ri, rv) = self.p.a.col(j);
            for (i, v) in ri.iter().zip(rv) {
                out[*i] = *v;
            }
        } else {
            out[j - self.n] = self.art_sign[j - self.n];
        }
    }

    fn col_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            let (ri, rv) = self.p.a.col(j);
            ri.iter().zip(rv).map(|(i, v)| v * y[*i]).sum()
        } else {
            self.art_sign[j - self.n] * y[j - self.n]
        }
    }

    fn factor_only(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut dense = vec![0.0; m * m];
        let mut col = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            self.column(j, &mut col);
            for i in 0..m {
                dense[i * m + k] = col[i];
            }
        }
        self.etas.clear();
        match DenseLu::factor(m, dense.clone(), 1e-13) {
            Some(lu) => {
                self.lu = Some(lu);
                Ok(())
            }
            None => {
                self.repair(dense)?;
                let mut dense = vec![0.0; m * m];
                for (k, &j) in self.basis.iter().enumerate() {
                    self.column(j, &mut col);
                    for i in 0..m {
                        dense[i * m + k] = col[i];
                    }
                }
                self.lu = Some(
                    DenseLu::factor(m, dense, 1e-13).ok_or(LpError::SingularBasis(self.iters))?,
                );
                Ok(())
            }
        }
    }

    /// Swaps numerically dependent basic columns for artificials covering the
    /// rows they leave unspanned. Dropped columns stay nonbasic at their value.
    fn repair(&mut self, dense: Vec<f64>) -> Result<(), LpError> {
        let m = self.m;
        let b = nalgebra::DMatrix::from_row_slice(m, m, &dense);
        let lu = b.full_piv_lu();
        let u = lu.u();
        let pivot0 = u[(0, 0)].abs();
        let rank = (0..m)
            .take_while(|&k| u[(k, k)].abs() > 1e-11 * pivot0.max(1e-300))
            .count();
        let mut rows = nalgebra::DVector::from_iterator(m, (0..m).map(|i| i as f64));
        lu.p().permute_rows(&mut rows);
        let mut cols = nalgebra::RowDVector::from_iterator(m, (0..m).map(|i| i as f64));
        lu.q().permute_columns(&mut cols);
        for k in rank..m {
            let pos = cols[k] as usize;
            let row = rows[k] as usize;
            let art = self.n + row;
            if self.stat[art] == Stat::Basic {
                return Err(LpError::SingularBasis(self.iters));
            }
            let out = self.basis[pos];
            self.stat[out] = if self.x[out] <= self.lb[out] {
                self.x[out] = self.lb[out];
                Stat::Lower
            } else if self.x[out] >= self.ub[out] {
                self.x[out] = self.ub[out];
                Stat::Upper
            } else {
                Stat::Zero
            };
            self.basis[pos] = art;
            self.stat[art] = Stat::Basic;
        }
        Ok(())
    }

    /// Fresh factorisation and basic values recomputed from the nonbasics.
    fn refactor(&mut self) -> Result<(), LpError> {
        self.factor_only()?;
        let mut rhs = self.p.b.clone();
        for j in 0..self.n + self.m {
            if self.stat[j] != Stat::Basic && self.x[j] != 0.0 {
                if j < self.n {
                    let (ri, rv) = self.p.a.col(j);
                    for (i, v) in ri.iter().zip(rv) {
                        rhs[*i] -= v * self.x[j];
                    }
                } else {
                    rhs[j - self.n] -= self.art_sign[j - self.n] * self.x[j];
                }
            }
        }
        self.ftran(&mut rhs);
        for (k, &j) in self.basis.iter().enumerate() {
            self.x[j] = rhs[k];
        }
        Ok(())
    }

    fn ftran(&self, v: &mut [f64]) {
        self.lu.as_ref().expect("factorised").solve(v);
        for (r, eta) in &self.etas {
            let vr = v[*r];
            if vr == 0.0 {
                continue;
            }
            for (i, e) in eta.iter().enumerate() {
                if i == *r {
                    v[i] = e * vr;
                } else {
                    v[i] += e * vr;
                }
            }
        }
    }

    fn btran(&self, v: &mut [f64]) {
        for (r, eta) in self.etas.iter().rev() {
            v[*r] = eta.iter().zip(v.iter()).map(|(e, x)| e * x).sum();
        }
        self.lu.as_ref().expect("factorised").solve_transpose(v);
    }

    fn duals(&self) -> Vec<f64> {
        let mut y: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
        self.btran(&mut y);
        y
    }

    fn objective(&self) -> f64 {
        self.cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    /// Entering candidate: index and direction (+1 increase, −1 decrease).
    fn price(&self, y: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.n + self.m {
            let st = self.stat[j];
            if st == Stat::Basic || self.lb[j] == self.ub[j] {
                continue;
            }
            let d = self.cost[j] - self.col_dot(j, y);
            let dir = match st {
                Stat::Lower if d < 0.0 => 1.0,
                Stat::Upper if d > 0.0 => -1.0,
                Stat::Zero if d != 0.0 => -d.signum(),
                _ => continue,
            };
            let score = d.abs() / self.col_norm[j];
            if score <= self.o.opt_tol {
                continue;
            }
            if bland {
                return Some((j, dir));
            }
            if best.map_or(true, |b| score > b.2) {
                best = Some((j, dir, score));
            }
        }
        best.map(|(j, d, _)| (j, d))
    }

    fn run_phase(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        let mut best_obj = self.objective();
        let mut stalled = 0usize;
        loop {
            if self.iters >= self.o.max_iter {
                return Err(LpError::IterationLimit(self.iters));
            }
            if self.etas.len() >= self.o.refactor_every {
                self.refactor()?;
            }
            let bland = stalled >= self.o.stall_limit;
            let y = self.duals();
            let Some((q, dir)) = self.price(&y, bland) else {
                return Ok(());
            };
            self.iters += 1;
            self.column(q, &mut alpha);
            self.ftran(&mut alpha);

            let amax = alpha.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let ptol = self.o.pivot_tol.max(1e-11 * amax);
            // Harris pass 1: relaxed step bound
            let mut relaxed = f64::INFINITY;
            for (i, &j) in self.basis.iter().enumerate() {
                let a = alpha[i];
                if a.abs() < ptol {
                    continue;
                }
                let rate = -dir * a;
                let lim = if rate < 0.0 {
                    (self.x[j] - self.lb[j] + self.o.feas_tol) / -rate
                } else {
                    (self.ub[j] - self.x[j] + self.o.feas_tol) / rate
                };
                relaxed = relaxed.min(lim);
            }
            // pass 2: largest pivot among rows blocking within the relaxed step
            let mut leave: Option<(usize, f64, f64)> = None;
            for (i, &j) in self.basis.iter().enumerate() {
                let a = alpha[i];
                if a.abs() < ptol {
                    continue;
                }
                let rate = -dir * a;
                let lim = if rate < 0.0 {
                    (self.x[j] - self.lb[j]) / -rate
                } else {
                    (self.ub[j] - self.x[j]) / rate
                };
                if lim.is_finite() && lim <= relaxed {
                    let better = match leave {
                        None => true,
                        Some((bi, _, ba)) => {
                            if bland {
                                j < self.basis[bi]
                            } else {
                                a.abs() > ba
                            }
                        }
                    };
                    if better {
                        leave = Some((i, lim.max(0.0), a.abs()));
                    }
                }
            }
            let flip = if dir > 0.0 {
                self.ub[q] - self.x[q]
            } else {
                self.x[q] - self.lb[q]
            };
            let step_leave = leave.map_or(f64::INFINITY, |l| l.1);
            if flip.is_finite() && flip <= step_leave {
                // bound flip of the entering variable, basis unchanged
                if dir > 0.0 {
                    self.x[q] = self.ub[q];
                    self.stat[q] = Stat::Upper;
                } else {
                    self.x[q] = self.lb[q];
                    self.stat[q] = Stat::Lower;
                }
                for (i, &j) in self.basis.iter().enumerate() {
                    self.x[j] -= dir * flip * alpha[i];
                }
            } else {
                let Some((r, theta, _)) = leave else {
                    return Err(LpError::Unbounded(self.iters));
                };
                self.x[q] += dir * theta;
                for (i, &j) in self.basis.iter().enumerate() {
                    self.x[j] -= dir * theta * alpha[i];
                }
                let out = self.basis[r];
                if -dir * alpha[r] < 0.0 {
                    self.x[out] = self.lb[out];
                    self.stat[out] = Stat::Lower;
                } else {
                    self.x[out] = self.ub[out];
                    self.stat[out] = Stat::Upper;
                }
                self.stat[q] = Stat::Basic;
                self.basis[r] = q;
                let ar = alpha[r];
                let eta: Vec<f64> = alpha
                    .iter()
                    .enumerate()
                    .map(|(i, v)| if i == r { 1.0 / ar } else { -v / ar })
                    .collect();
                self.etas.push((r, eta));
            }
            let obj = self.objective();
            if obj < best_obj - 1e-12 * (1.0 + best_obj.abs()) {
                best_obj = obj;
                stalled = 0;
            } else {
                stalled += 1;
            }
        }
    }
}
