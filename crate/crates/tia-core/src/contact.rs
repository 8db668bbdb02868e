//! Face-pair contact detection, gap functions and the contact Jacobian.

use crate::geometry::Assembly;
use crate::tolerances::{CONTACT_ANGLE, CONTACT_MATCH_REL};
use crate::{Error, Result, Vec3};
use nalgebra::{DMatrix, Matrix3};
use std::collections::HashMap;

/// A matched pair of opposing surface faces.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactPair {
    pub master_body: usize,
    pub slave_body: usize,
    pub master_face: usize,
    pub slave_face: usize,
    /// Unit normal from the master body toward the slave body.
    pub normal: Vec3,
    pub area: f64,
    pub centroid: Vec3,
    pub lever_m: Vec3,
    pub lever_s: Vec3,
}

/// Exponential map of `[θ]×` (Rodrigues).
pub fn rotation(theta: &Vec3) -> Matrix3<f64> {
    let angle = theta.norm();
    let k = Matrix3::new(
        0.0, -theta.z, theta.y, //
        theta.z, 0.0, -theta.x, //
        -theta.y, theta.x, 0.0,
    );
    // series for small angles keeps the coefficients accurate
    let (a, b) = if angle < 1e-4 {
        let a2 = angle * angle;
        (1.0 - a2 / 6.0 + a2 * a2 / 120.0, 0.5 - a2 / 24.0 + a2 * a2 / 720.0)
    } else {
        (angle.sin() / angle, (1.0 - angle.cos()) / (angle * angle))
    };
    Matrix3::identity() + k * a + k * k * b
}

/// Generalised coordinates of one body: translation and rotation vector.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BodyCoords {
    pub t: Vec3,
    pub theta: Vec3,
}

/// Signed normal separation of a pair for body coordinates `qm`, `qs`.
/// Points rotate about their own body centroid: `r = c + t + R(θ)·(P − c)`.
pub fn gap(pair: &ContactPair, qm: &BodyCoords, qs: &BodyCoords) -> f64 {
    let cm = pair.centroid - pair.lever_m;
    let cs = pair.centroid - pair.lever_s;
    let rm = cm + qm.t + rotation(&qm.theta) * pair.lever_m;
    let rs = cs + qs.t + rotation(&qs.theta) * pair.lever_s;
    pair.normal.dot(&(rs - rm))
}

/// Finds all conforming face pairs of an assembly. Faces match when their
/// centroids coincide within `tol` and their normals are opposite.
pub fn detect_contacts(asm: &Assembly, tol: f64) -> Result<Vec<ContactPair>> {
    struct Face {
        body: usize,
        face: usize,
        c: Vec3,
        n: Vec3,
    }
    let mut faces = Vec::new();
    for b in &asm.bodies {
        for k in 0..b.mesh.surface_faces.len() {
            faces.push(Face {
                body: b.id,
                face: k,
                c: b.mesh.face_centroid(k),
                n: b.mesh.face_normal(k),
            });
        }
    }
    let key = |c: &Vec3| -> [i64; 3] { [c.x, c.y, c.z].map(|v| (v / tol).floor() as i64) };
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        grid.entry(key(&f.c)).or_default().push(i);
    }
    let cos_tol = CONTACT_ANGLE.cos();
    let mut pairs = Vec::new();
    for f in &faces {
        let k = key(&f.c);
        let mut found: Vec<usize> = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(cands) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) else {
                        continue;
                    };
                    for &j in cands {
                        let g = &faces[j];
                        if g.body != f.body && (g.c - f.c).norm() <= tol && f.n.dot(&g.n) <= -cos_tol {
                            found.push(j);
                        }
                    }
                }
            }
        }
        if found.len() > 1 {
            return Err(Error::AmbiguousPairing {
                body: f.body,
                face: f.face,
                candidates: found.len(),
            });
        }
        let Some(&j) = found.first() else { continue };
        let g = &faces[j];
        if f.body > g.body {
            continue;
        }
        let (bm, bs) = (&asm.bodies[f.body], &asm.bodies[g.body]);
        let centroid = 0.5 * (f.c + g.c);
        pairs.push(ContactPair {
            master_body: f.body,
            slave_body: g.body,
            master_face: f.face,
            slave_face: g.face,
            normal: f.n,
            area: bm.mesh.face_area(f.face),
            centroid,
            lever_m: centroid - bm.centroid,
            lever_s: centroid - bs.centroid,
        });
    }
    Ok(pairs)
}

/// Detection with the default tolerance `1e-6·r_i`.
pub fn detect_contacts_default(asm: &Assembly) -> Result<Vec<ContactPair>> {
    detect_contacts(asm, CONTACT_MATCH_REL * asm.r_i)
}

/// Role of a body in a statics problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyState {
    Free,
    Fixed,
    /// Removed from the problem together with all its contacts.
    Absent,
}

/// Maps bodies to their 6-DOF block in the free coordinate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub state: Vec<BodyState>,
    pub offset: Vec<Option<usize>>,
    pub n_free: usize,
}

impl DofMap {
    pub fn new(state: Vec<BodyState>) -> Self {
        let mut offset = Vec::with_capacity(state.len());
        let mut n_free = 0;
        for s in &state {
            if *s == BodyState::Free {
                offset.push(Some(6 * n_free));
                n_free += 1;
            } else {
                offset.push(None);
            }
        }
        Self { state, offset, n_free }
    }

    /// Frame bodies fixed, everything else free.
    pub fn frames_fixed(asm: &Assembly) -> Self {
        Self::new(
            asm.bodies
                .iter()
                .map(|b| if b.is_frame { BodyState::Fixed } else { BodyState::Free })
                .collect(),
        )
    }

    /// Bottom frame fixed, top frame free.
    pub fn top_frame_released(asm: &Assembly) -> Self {
        Self::new(
            (0..asm.bodies.len())
                .map(|b| {
                    if asm.bodies[b].is_frame && !asm.is_top_frame(b) {
                        BodyState::Fixed
                    } else {
                        BodyState::Free
                    }
                })
                .collect(),
        )
    }

    /// Bottom frame fixed, top frame removed.
    pub fn top_frame_absent(asm: &Assembly) -> Self {
        Self::new(
            (0..asm.bodies.len())
                .map(|b| {
                    if asm.is_top_frame(b) {
                        BodyState::Absent
                    } else if asm.bodies[b].is_frame {
                        BodyState::Fixed
                    } else {
                        BodyState::Free
                    }
                })
                .collect(),
        )
    }

    pub fn n_dof(&self) -> usize {
        6 * self.n_free
    }

    /// Whether a pair contributes a column: no absent body, at least one free.
    pub fn keeps(&self, m: usize, s: usize) -> bool {
        let (a, b) = (self.state[m], self.state[s]);
        a != BodyState::Absent && b != BodyState::Absent && (a == BodyState::Free || b == BodyState::Free)
    }
}

/// One column of G in sparse form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianColumn {
    pub m: Option<usize>,
    pub s: Option<usize>,
    pub vm: [f64; 6],
    pub vs: [f64; 6],
}

impl JacobianColumn {
    /// Column built from a normal and lever arms, with both body slots given.
    pub fn from_pair(n: &Vec3, lever_m: &Vec3, lever_s: &Vec3, m: Option<usize>, s: Option<usize>) -> Self {
        let tm = lever_m.cross(n);
        let ts = lever_s.cross(n);
        Self {
            m,
            s,
            vm: [-n.x, -n.y, -n.z, -tm.x, -tm.y, -tm.z],
            vs: [n.x, n.y, n.z, ts.x, ts.y, ts.z],
        }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        if let Some(o) = self.m {
            acc += (0..6).map(|k| self.vm[k] * x[o + k]).sum::<f64>();
        }
        if let Some(o) = self.s {
            acc += (0..6).map(|k| self.vs[k] * x[o + k]).sum::<f64>();
        }
        acc
    }

    /// `y += alpha · column`
    pub fn axpy(&self, alpha: f64, y: &mut [f64]) {
        if let Some(o) = self.m {
            for k in 0..6 {
                y[o + k] += alpha * self.vm[k];
            }
        }
        if let Some(o) = self.s {
            for k in 0..6 {
                y[o + k] += alpha * self.vs[k];
            }
        }
    }

    /// Nonzero entries as (row, value).
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let a = self.m.into_iter().flat_map(move |o| (0..6).map(move |k| (o + k, self.vm[k])));
        let b = self.s.into_iter().flat_map(move |o| (0..6).map(move |k| (o + k, self.vs[k])));
        a.chain(b)
    }

    pub fn norm1(&self) -> f64 {
        self.entries().map(|(_, v)| v.abs()).sum()
    }
}

/// Contact Jacobian restricted to free DOFs, one column per retained pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactJacobian {
    pub n_rows: usize,
    pub columns: Vec<JacobianColumn>,
    /// Index into the pair list for each column.
    pub pair_of_column: Vec<usize>,
}

impl ContactJacobian {
    pub fn from_columns(n_rows: usize, columns: Vec<JacobianColumn>) -> Self {
        let pair_of_column = (0..columns.len()).collect();
        Self {
            n_rows,
            columns,
            pair_of_column,
        }
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// `G λ`
    pub fn mul(&self, lambda: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        for (c, &l) in self.columns.iter().zip(lambda) {
            if l != 0.0 {
                c.axpy(l, &mut y);
            }
        }
        y
    }

    /// `Gᵀ x`
    pub fn tmul(&self, x: &[f64]) -> Vec<f64> {
        self.columns.iter().map(|c| c.dot(x)).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.n_rows, self.n_cols());
        for (j, c) in self.columns.iter().enumerate() {
            for (r, v) in c.entries() {
                g[(r, j)] += v;
            }
        }
        g
    }

    /// `Σ_{j ∈ active} w_j g_j g_jᵀ` accumulated into a dense matrix.
    pub fn weighted_gram(&self, weight: impl Fn(usize) -> f64) -> DMatrix<f64> {
        let n = self.n_rows;
        let mut h = DMatrix::zeros(n, n);
        for (j, c) in self.columns.iter().enumerate() {
            let w = weight(j);
            if w == 0.0 {
                continue;
            }
            let e: Vec<(usize, f64)> = c.entries().collect();
            for &(r, vr) in &e {
                for &(q, vq) in &e {
                    h[(r, q)] += w * vr * vq;
                }
            }
        }
        h
    }
}

/// Jacobian with frame bodies fixed.
pub fn assemble_jacobian(asm: &Assembly, pairs: &[ContactPair]) -> ContactJacobian {
    assemble_jacobian_with(pairs, &DofMap::frames_fixed(asm))
}

/// Jacobian for an arbitrary body-state map. Pairs between two non-free
/// bodies, or touching an absent body, are dropped.
pub fn assemble_jacobian_with(pairs: &[ContactPair], dof: &DofMap) -> ContactJacobian {
    let mut columns = Vec::new();
    let mut pair_of_column = Vec::new();
    for (k, p) in pairs.iter().enumerate() {
        if !dof.keeps(p.master_body, p.slave_body) {
            continue;
        }
        columns.push(JacobianColumn::from_pair(
            &p.normal,
            &p.lever_m,
            &p.lever_s,
            dof.offset[p.master_body],
            dof.offset[p.slave_body],
        ));
        pair_of_column.push(k);
    }
    ContactJacobian {
        n_rows: dof.n_dof(),
        columns,
        pair_of_column,
    }
}
