//! Kinematic classification and contact-force equilibrium.
//!
//! With `G` the contact Jacobian, the admissible first-order motions form the
//! cone `K = {δq : Gᵀδq ≥ 0}`. An assembly is locked when `K = {0}`. We test
//! this with two well-posed pieces:
//!
//! * the opening LP `z = max 1ᵀGᵀδq  s.t.  δq ∈ K, ‖δq‖∞ ≤ 1`, which is
//!   positive iff some admissible motion opens a contact, solved through its
//!   dual `min ‖Gμ‖₁  s.t.  μ ≥ 1`;
//! * the sliding dimension `N − rank G`, the number of independent motions
//!   that keep every contact closed.
//!
//! `K = {0}` iff both vanish. Mechanisms are then classified by the work
//! rates `γ_max/min = max/min fᵀδq` over `K ∩ {‖δq‖₁ ≤ 1}`, computed via the
//! duals `±min_{λ≥0} ‖±f + Gλ‖∞`.

pub mod lp;
pub mod qp;

use crate::contact::{ContactJacobian, ContactPair};
use crate::geometry::Assembly;
use crate::linalg::psd_rank;
use crate::tolerances::{EQUILIBRIUM_RESIDUAL, EXPLOSION_REL, GAMMA_REL, OPENING_REL, RANK_REL};
use crate::{Error, Result, Vec3};
use lp::{CscMatrix, LpOptions, LpProblem};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Locked,
    Activated,
    Neutral,
    Suppressed,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Locked => "locked",
            Self::Activated => "activated",
            Self::Neutral => "neutral",
            Self::Suppressed => "suppressed",
        }
    }

    /// Whether a contact-force equilibrium is computed for this state.
    pub fn carries_load(&self) -> bool {
        matches!(self, Self::Locked | Self::Suppressed)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Classification {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "locked" => Self::Locked,
            "activated" => Self::Activated,
            "neutral" => Self::Neutral,
            "suppressed" => Self::Suppressed,
            _ => return Err(Error::InvalidParams(format!("unknown classification {s:?}"))),
        })
    }
}

/// Result of the cone test.
#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    /// Optimal value of the opening LP.
    pub z_star: f64,
    /// `N − rank G`.
    pub sliding_dim: usize,
    /// Maximiser of the opening LP, `‖δq‖∞ ≤ 1`.
    pub mechanism: Vec<f64>,
    /// Zero threshold applied to `z_star`.
    pub z_tol: f64,
}

impl Feasibility {
    pub fn locked(&self) -> bool {
        self.z_star <= self.z_tol && self.sliding_dim == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KinematicReport {
    pub z_star: f64,
    pub sliding_dim: usize,
    pub gamma_max: Option<f64>,
    pub gamma_min: Option<f64>,
    pub mechanism: Option<Vec<f64>>,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub lambdas: Vec<f64>,
    pub residual: f64,
    pub feasible: bool,
}

fn lp_err(what: &str, e: lp::LpError) -> Error {
    Error::Solver(format!("{what}: {e}"))
}

fn g_csc(g: &ContactJacobian, copies: usize) -> CscMatrix {
    let mut a = CscMatrix::new(copies * g.n_rows);
    for c in &g.columns {
        a.push_col((0..copies).flat_map(|k| c.entries().map(move |(r, v)| (k * g.n_rows + r, v))));
    }
    a
}

/// Opening LP through its dual `min ‖Gμ‖₁, μ ≥ 1`; returns `(z, δq)`.
pub fn opening_lp(g: &ContactJacobian) -> Result<(f64, Vec<f64>)> {
    let (n, nc) = (g.n_rows, g.n_cols());
    if n == 0 {
        return Ok((0.0, Vec::new()));
    }
    let mut a = g_csc(g, 1);
    for i in 0..n {
        a.push_col([(i, -1.0)]);
    }
    for i in 0..n {
        a.push_col([(i, 1.0)]);
    }
    let inf = f64::INFINITY;
    let mut c = vec![0.0; nc];
    c.extend(std::iter::repeat(1.0).take(2 * n));
    let mut lb = vec![1.0; nc];
    lb.extend(std::iter::repeat(0.0).take(2 * n));
    let p = LpProblem {
        a,
        b: vec![0.0; n],
        c,
        lb,
        ub: vec![inf; nc + 2 * n],
    };
    let sol = lp::solve(&p, &LpOptions::default()).map_err(|e| lp_err("opening LP", e))?;
    let mech = sol.y.iter().map(|v| -v).collect();
    Ok((sol.objective.max(0.0), mech))
}

/// `min_{λ≥0} ‖f + Gλ‖∞` and the corresponding primal maximiser of
/// `fᵀδq` over `K ∩ {‖δq‖₁ ≤ 1}`.
fn work_rate_lp(g: &ContactJacobian, f: &[f64]) -> Result<(f64, Vec<f64>)> {
    let (n, nc) = (g.n_rows, g.n_cols());
    if n == 0 {
        return Ok((0.0, Vec::new()));
    }
    let mut a = g_csc(g, 2);
    a.push_col((0..n).map(|i| (i, -1.0)).chain((0..n).map(|i| (n + i, 1.0))));
    for i in 0..n {
        a.push_col([(i, 1.0)]);
    }
    for i in 0..n {
        a.push_col([(n + i, -1.0)]);
    }
    let nv = nc + 1 + 2 * n;
    let mut c = vec![0.0; nv];
    c[nc] = 1.0;
    let b: Vec<f64> = f.iter().chain(f).map(|v| -v).collect();
    let p = LpProblem {
        a,
        b,
        c,
        lb: vec![0.0; nv],
        ub: vec![f64::INFINITY; nv],
    };
    let sol = lp::solve(&p, &LpOptions::default()).map_err(|e| lp_err("activation LP", e))?;
    let mech = (0..n).map(|i| -(sol.y[i] + sol.y[n + i])).collect();
    Ok((sol.objective.max(0.0), mech))
}

/// `γ_max = max fᵀδq` over `K ∩ {‖δq‖₁ ≤ 1}`, with a maximiser.
pub fn mechanism_activation(g: &ContactJacobian, f: &[f64]) -> Result<(f64, Vec<f64>)> {
    work_rate_lp(g, f)
}

/// `γ_min = min fᵀδq` over `K ∩ {‖δq‖₁ ≤ 1}`, with a minimiser.
pub fn mechanism_suppression(g: &ContactJacobian, f: &[f64]) -> Result<(f64, Vec<f64>)> {
    let neg: Vec<f64> = f.iter().map(|v| -v).collect();
    let (v, x) = work_rate_lp(g, &neg)?;
    Ok((-v, x))
}

/// `N − rank G`, from the eigenvalues of `G Gᵀ`.
pub fn sliding_dimension(g: &ContactJacobian) -> usize {
    g.n_rows - psd_rank(&g.weighted_gram(|_| 1.0), RANK_REL)
}

pub fn kinematic_feasibility(g: &ContactJacobian) -> Result<Feasibility> {
    let mass: f64 = g.columns.iter().map(|c| c.norm1()).sum();
    let z_tol = OPENING_REL * mass.max(1.0);
    let sliding_dim = sliding_dimension(g);
    if sliding_dim == 0 {
        if let Some(z_star) = self_stress_certificate(g, z_tol) {
            return Ok(Feasibility {
                z_star,
                sliding_dim,
                mechanism: vec![0.0; g.n_rows],
                z_tol,
            });
        }
    }
    let (z_star, mechanism) = opening_lp(g)?;
    Ok(Feasibility {
        z_star,
        sliding_dim,
        mechanism,
        z_tol,
    })
}

/// Looks for `μ = 1 + ν`, `ν ≥ 0` with `Gμ = 0` through the equilibrium QP
/// under the load `G·1`. Returns `‖Gμ‖₁` when it is within `z_tol`; the
/// opening LP is then unnecessary since its optimum lies in `[0, ‖Gμ‖₁]`.
fn self_stress_certificate(g: &ContactJacobian, z_tol: f64) -> Option<f64> {
    if g.n_rows == 0 || g.n_cols() == 0 {
        return None;
    }
    let ones = vec![1.0; g.n_cols()];
    let g1 = g.mul(&ones);
    let b: Vec<f64> = g1.iter().map(|v| -v).collect();
    let out = qp::min_norm_newton(g, &b, &qp::QpOptions::default());
    let mu: Vec<f64> = out.lambda.iter().map(|v| 1.0 + v.max(0.0)).collect();
    let z: f64 = g.mul(&mu).iter().map(|v| v.abs()).sum();
    (z <= z_tol).then_some(z)
}

/// Zero threshold for work rates.
pub fn gamma_eps(f: &[f64]) -> f64 {
    GAMMA_REL * f.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn classify(locked: bool, gamma_max: f64, gamma_min: f64, eps: f64) -> Classification {
    if locked {
        Classification::Locked
    } else if gamma_max > eps {
        Classification::Activated
    } else if gamma_min < -eps {
        Classification::Suppressed
    } else {
        Classification::Neutral
    }
}

/// Cone test followed, for unlocked assemblies, by both work-rate LPs.
/// Extremal work rates over unit admissible mechanisms.
#[derive(Debug, Clone)]
pub struct WorkRates {
    pub gamma_max: f64,
    pub x_max: Vec<f64>,
    pub gamma_min: f64,
    pub x_min: Vec<f64>,
}

/// Both work-rate programs; with no applied load every mechanism does zero
/// work, so the programs are skipped and `fallback` is reported.
pub fn work_rates(g: &ContactJacobian, f: &[f64], fallback: &[f64]) -> Result<WorkRates> {
    if f.iter().all(|v| *v == 0.0) {
        return Ok(WorkRates {
            gamma_max: 0.0,
            x_max: fallback.to_vec(),
            gamma_min: 0.0,
            x_min: fallback.to_vec(),
        });
    }
    let (gamma_max, x_max) = mechanism_activation(g, f)?;
    let (gamma_min, x_min) = mechanism_suppression(g, f)?;
    Ok(WorkRates {
        gamma_max,
        x_max,
        gamma_min,
        x_min,
    })
}

pub fn analyze_kinematics(g: &ContactJacobian, f: &[f64]) -> Result<KinematicReport> {
    let feas = kinematic_feasibility(g)?;
    if feas.locked() {
        return Ok(KinematicReport {
            z_star: feas.z_star,
            sliding_dim: 0,
            gamma_max: None,
            gamma_min: None,
            mechanism: None,
            classification: Classification::Locked,
        });
    }
    let w = work_rates(g, f, &feas.mechanism)?;
    let (gmax, xmax, gmin) = (w.gamma_max, w.x_max, w.gamma_min);
    let classification = classify(false, gmax, gmin, gamma_eps(f));
    let mechanism = if classification == Classification::Activated {
        xmax
    } else {
        feas.mechanism
    };
    Ok(KinematicReport {
        z_star: feas.z_star,
        sliding_dim: feas.sliding_dim,
        gamma_max: Some(gmax),
        gamma_min: Some(gmin),
        mechanism: Some(mechanism),
        classification,
    })
}

/// Minimum-norm contact forces with `Gλ + f = 0, λ ≥ 0`.
///
/// Only defined for locked and suppressed assemblies.
pub fn solve_contact_forces(
    g: &ContactJacobian,
    f: &[f64],
    class: Classification,
) -> Result<EquilibriumReport> {
    if !class.carries_load() {
        return Err(Error::Contract(format!(
            "contact forces requested for a {class} assembly"
        )));
    }
    Ok(solve_contact_forces_unchecked(g, f))
}

/// As [`solve_contact_forces`], without the classification gate.
pub fn solve_contact_forces_unchecked(g: &ContactJacobian, f: &[f64]) -> EquilibriumReport {
    let b: Vec<f64> = f.iter().map(|v| -v).collect();
    let out = qp::min_norm_newton(g, &b, &qp::QpOptions::default());
    if out.residual <= EQUILIBRIUM_RESIDUAL {
        return EquilibriumReport {
            lambdas: out.lambda,
            residual: out.residual,
            feasible: true,
        };
    }
    let ls = qp::nnls(g, &b, 3 * g.n_rows + 10);
    let feasible = ls.residual <= EQUILIBRIUM_RESIDUAL;
    let (lambdas, residual) = if ls.residual < out.residual {
        (ls.lambda, ls.residual)
    } else {
        (out.lambda, out.residual)
    };
    EquilibriumReport {
        lambdas,
        residual,
        feasible,
    }
}

fn radial(c: &Vec3) -> Vec3 {
    let h = Vec3::new(c.x, c.y, 0.0);
    let n = h.norm();
    if n > 0.0 {
        h / n
    } else {
        Vec3::zeros()
    }
}

/// First-order gap changes of all interior pairs when every interior block
/// translates radially outward by one unit.
pub fn explosion_gap_rates(asm: &Assembly, pairs: &[ContactPair]) -> Vec<f64> {
    pairs
        .iter()
        .filter(|p| !asm.bodies[p.master_body].is_frame && !asm.bodies[p.slave_body].is_frame)
        .map(|p| {
            let dm = radial(&asm.bodies[p.master_body].centroid);
            let ds = radial(&asm.bodies[p.slave_body].centroid);
            p.normal.dot(&(ds - dm))
        })
        .collect()
}

/// True when simultaneous outward radial translation of all interior blocks
/// violates no interior contact.
pub fn explosion_check(asm: &Assembly, pairs: &[ContactPair]) -> bool {
    let eps = EXPLOSION_REL * asm.r_i;
    explosion_gap_rates(asm, pairs).iter().all(|&v| v >= -eps)
}
