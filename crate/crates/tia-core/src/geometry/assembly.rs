use super::BlockMesh;
use crate::Vec3;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Sine,
    Hexagon,
}

/// One rigid block of an assembly.
#[derive(Debug, Clone)]
pub struct Body {
    pub id: usize,
    pub mesh: BlockMesh,
    pub centroid: Vec3,
    pub volume: f64,
    /// Layer index: `-1` is the bottom frame, `L` the top frame.
    pub layer: i32,
    pub slot: usize,
    pub is_frame: bool,
}

impl Body {
    pub fn new(id: usize, mesh: BlockMesh, layer: i32, slot: usize, is_frame: bool) -> Self {
        let (volume, centroid) = mesh.volume_centroid();
        Self {
            id,
            mesh,
            centroid,
            volume,
            layer,
            slot,
            is_frame,
        }
    }
}

/// Layered tube about the z-axis.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub bodies: Vec<Body>,
    pub r_i: f64,
    pub r_o: f64,
    pub kind: BlockKind,
    /// Blocks per layer.
    pub n: usize,
    /// Interior layers (frames excluded).
    pub layers: usize,
    pub layer_height: f64,
}

impl Assembly {
    pub fn is_top_frame(&self, b: usize) -> bool {
        self.bodies[b].is_frame && self.bodies[b].layer == self.layers as i32
    }

    pub fn is_bottom_frame(&self, b: usize) -> bool {
        self.bodies[b].layer < 0
    }

    /// Body at interior `layer` and `slot`.
    pub fn body_at(&self, layer: i32, slot: usize) -> Option<&Body> {
        self.bodies.iter().find(|b| b.layer == layer && b.slot == slot)
    }

    /// Assembly made of arbitrary bodies (used for small test scenes).
    pub fn from_bodies(bodies: Vec<Body>, r_i: f64) -> Self {
        Self {
            bodies,
            r_i,
            r_o: r_i,
            kind: BlockKind::Sine,
            n: 1,
            layers: 0,
            layer_height: 0.0,
        }
    }
}
