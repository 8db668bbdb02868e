//! Generalised external loads for the five boundary value problems.
//!
//! Surface pressure `p0` on a face with outward vector area `S` exerts the
//! force `−p0·S` on the body (it pushes into the material); shaft tractions
//! act tangentially. Each face force acts at the face centroid and adds the
//! torque `(c_face − c_body) × F`.

use crate::contact::DofMap;
use crate::geometry::{Assembly, FaceTag};
use crate::{Error, Result, Vec3};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bvp {
    Pipe,
    Tunnel,
    Pillar,
    Beam,
    Shaft,
}

impl Bvp {
    pub const ALL: [Bvp; 5] = [Bvp::Pipe, Bvp::Tunnel, Bvp::Pillar, Bvp::Beam, Bvp::Shaft];

    pub fn as_str(&self) -> &'static str {
        match self {
            Bvp::Pipe => "pipe",
            Bvp::Tunnel => "tunnel",
            Bvp::Pillar => "pillar",
            Bvp::Beam => "beam",
            Bvp::Shaft => "shaft",
        }
    }
}

impl fmt::Display for Bvp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Bvp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Bvp::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown BVP {s:?}")))
    }
}

/// How the axial pillar load enters the assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PillarMode {
    /// Load the top frame and release it, so the load flows through the tube.
    #[default]
    ReleaseTopFrame,
    /// Remove the top frame and load the top faces of the last interior layer.
    TopInteriorLayer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gravity {
    /// Density in kg/mm³.
    pub rho: f64,
    /// Gravitational acceleration in mm/s².
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadCase {
    pub kind: Bvp,
    /// Pressure in MPa.
    pub p0: f64,
    /// Loaded layer for beam and shaft; `None` selects `ceil(L/2) + 1`.
    pub target_layer: Option<usize>,
    pub gravity: Option<Gravity>,
    pub pillar_mode: PillarMode,
}

impl LoadCase {
    pub fn new(kind: Bvp, p0: f64) -> Self {
        Self {
            kind,
            p0,
            target_layer: None,
            gravity: None,
            pillar_mode: PillarMode::default(),
        }
    }

    /// Loaded layer, 1-based as in "the seventh layer" (`L = 12`).
    pub fn layer_for(&self, layers: usize) -> usize {
        self.target_layer.unwrap_or(layers.div_ceil(2) + 1)
    }

    pub fn validate(&self, layers: usize) -> Result<()> {
        if !(self.p0.is_finite() && self.p0 > 0.0) {
            return Err(Error::InvalidParams(format!("p0 = {} must be positive", self.p0)));
        }
        if matches!(self.kind, Bvp::Beam | Bvp::Shaft) {
            let l = self.layer_for(layers);
            if l < 1 || l > layers {
                return Err(Error::InvalidParams(format!(
                    "target layer {l} outside 1..={layers}"
                )));
            }
        }
        Ok(())
    }

    /// Body-state map under which this case is solved for equilibrium.
    pub fn equilibrium_dofs(&self, asm: &Assembly) -> DofMap {
        match (self.kind, self.pillar_mode) {
            (Bvp::Pillar, PillarMode::ReleaseTopFrame) => DofMap::top_frame_released(asm),
            (Bvp::Pillar, PillarMode::TopInteriorLayer) => DofMap::top_frame_absent(asm),
            _ => DofMap::frames_fixed(asm),
        }
    }

    /// Body-state map for the kinematic classification (frames fixed, except
    /// that an absent top frame stays absent).
    pub fn kinematic_dofs(&self, asm: &Assembly) -> DofMap {
        match (self.kind, self.pillar_mode) {
            (Bvp::Pillar, PillarMode::TopInteriorLayer) => DofMap::top_frame_absent(asm),
            _ => DofMap::frames_fixed(asm),
        }
    }
}

/// Force (N) and torque about the body centroid (N·mm) per body.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedLoad {
    pub per_body: Vec<[f64; 6]>,
}

impl GeneralizedLoad {
    pub fn force(&self, b: usize) -> Vec3 {
        let w = &self.per_body[b];
        Vec3::new(w[0], w[1], w[2])
    }

    pub fn torque(&self, b: usize) -> Vec3 {
        let w = &self.per_body[b];
        Vec3::new(w[3], w[4], w[5])
    }

    /// Entries of the free bodies, in DOF order.
    pub fn to_free_vector(&self, dof: &DofMap) -> Vec<f64> {
        let mut f = vec![0.0; dof.n_dof()];
        for (b, off) in dof.offset.iter().enumerate() {
            if let Some(o) = off {
                f[*o..*o + 6].copy_from_slice(&self.per_body[b]);
            }
        }
        f
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            per_body: self.per_body.iter().map(|w| w.map(|v| alpha * v)).collect(),
        }
    }

    /// Net force and net torque about the origin.
    pub fn resultant(&self, asm: &Assembly) -> (Vec3, Vec3) {
        let mut f = Vec3::zeros();
        let mut m = Vec3::zeros();
        for (b, body) in asm.bodies.iter().enumerate() {
            let fb = self.force(b);
            f += fb;
            m += self.torque(b) + body.centroid.cross(&fb);
        }
        (f, m)
    }
}

/// Assembles the generalised load vector of `case` on every body.
pub fn assemble_load(asm: &Assembly, case: &LoadCase) -> Result<GeneralizedLoad> {
    case.validate(asm.layers)?;
    let mut per_body = vec![[0.0; 6]; asm.bodies.len()];
    let top = asm.layers as i32;
    let target = case.layer_for(asm.layers) as i32 - 1;
    let mut loaded_faces = 0usize;
    for (b, body) in asm.bodies.iter().enumerate() {
        let mesh = &body.mesh;
        let want: Option<FaceTag> = match case.kind {
            Bvp::Pipe if !body.is_frame => Some(FaceTag::Inner),
            Bvp::Tunnel if !body.is_frame => Some(FaceTag::Outer),
            Bvp::Beam if body.layer == target && body.slot == 0 => Some(FaceTag::Outer),
            Bvp::Shaft if body.layer == target => Some(FaceTag::Outer),
            Bvp::Pillar => match case.pillar_mode {
                PillarMode::ReleaseTopFrame if body.layer == top => Some(FaceTag::FrameExposed),
                PillarMode::TopInteriorLayer if body.layer == top - 1 => Some(FaceTag::Top),
                _ => None,
            },
            _ => None,
        };
        let Some(tag) = want else { continue };
        let mut force = Vec3::zeros();
        let mut torque = Vec3::zeros();
        for (k, t) in mesh.face_tags.iter().enumerate() {
            if *t != tag {
                continue;
            }
            loaded_faces += 1;
            let s = mesh.face_vector_area(k);
            let c = mesh.face_centroid(k);
            let fk = match case.kind {
                Bvp::Shaft => {
                    let r = Vec3::new(c.x, c.y, 0.0);
                    let e_phi = Vec3::new(-c.y, c.x, 0.0) / r.norm();
                    case.p0 * s.norm() * e_phi
                }
                Bvp::Pillar => -case.p0 * s.norm() * Vec3::z(),
                _ => -case.p0 * s,
            };
            force += fk;
            torque += (c - body.centroid).cross(&fk);
        }
        per_body[b] = [force.x, force.y, force.z, torque.x, torque.y, torque.z];
    }
    if loaded_faces == 0 {
        return Err(Error::Tagging(format!("no faces carry the {} load", case.kind)));
    }
    if let Some(gr) = case.gravity {
        for (b, body) in asm.bodies.iter().enumerate() {
            per_body[b][2] -= gr.rho * body.volume * gr.g;
        }
    }
    Ok(GeneralizedLoad { per_body })
}
