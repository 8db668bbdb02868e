//! Numerical thresholds shared across the pipeline. All are recorded in the
//! sweep sidecar so that a results file states the tests it was produced under.

use serde::Serialize;

/// Contact centroid matching tolerance, relative to the inner radius.
pub const CONTACT_MATCH_REL: f64 = 1e-6;
/// Angular tolerance (rad) for opposing face normals.
pub const CONTACT_ANGLE: f64 = 1e-6;
/// Equilibrium residual ‖Gλ + f‖/‖f‖ below which a load is carried.
pub const EQUILIBRIUM_RESIDUAL: f64 = 1e-6;
/// Zero test for activation work rates, relative to ‖f‖₂.
pub const GAMMA_REL: f64 = 1e-9;
/// Zero test for the opening LP value, relative to Σ_j ‖g_j‖₁.
pub const OPENING_REL: f64 = 1e-9;
/// Relative eigenvalue cut-off for the numerical rank of G.
pub const RANK_REL: f64 = 1e-10;
/// Explosion test threshold, relative to the inner radius.
pub const EXPLOSION_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub contact_match_rel: f64,
    pub contact_angle: f64,
    pub equilibrium_residual: f64,
    pub gamma_rel: f64,
    pub opening_rel: f64,
    pub rank_rel: f64,
    pub explosion_rel: f64,
}

pub const ALL: Tolerances = Tolerances {
    contact_match_rel: CONTACT_MATCH_REL,
    contact_angle: CONTACT_ANGLE,
    equilibrium_residual: EQUILIBRIUM_RESIDUAL,
    gamma_rel: GAMMA_REL,
    opening_rel: OPENING_REL,
    rank_rel: RANK_REL,
    explosion_rel: EXPLOSION_REL,
};
