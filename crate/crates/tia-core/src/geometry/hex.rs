use super::mesh::Side;
use super::sine::{cylinder_point, layer_parity};
use super::{block_length, Assembly, BlockKind, BlockMesh, Body, FaceTag, MeshResolution};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Hexagon-based block THB(n, r_i, r_o).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexBlockParams {
    pub n: usize,
    pub r_i: f64,
    pub r_o: f64,
    #[serde(rename = "L")]
    pub layers: usize,
}

impl HexBlockParams {
    /// THB 0 of the reference study.
    pub const fn thb0() -> Self {
        Self {
            n: 4,
            r_i: 120.0,
            r_o: 160.0,
            layers: 12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_i.is_finite() && self.r_o.is_finite()) || self.r_i <= 0.0 || self.r_o <= self.r_i {
            return Err(Error::InvalidParams(format!(
                "need r_o > r_i > 0, got r_i = {}, r_o = {}",
                self.r_i, self.r_o
            )));
        }
        if self.n < 2 || self.layers < 1 {
            return Err(Error::InvalidParams(format!(
                "need n ≥ 2 and L ≥ 1, got n = {}, L = {}",
                self.n, self.layers
            )));
        }
        Ok(())
    }
}

/// Planar tile dimensions of the hexagon-based block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexTileDims {
    /// Repeat width along the layer (equal to the block length ℓ).
    pub width: f64,
    /// Circumradius of the hexagon and radius of the lateral arcs.
    pub radius: f64,
    /// Layer height, flat-to-flat: `√3·R`.
    pub height: f64,
}

impl HexTileDims {
    /// x-shift of both lateral boundaries at tile height `z ∈ [0, height]`.
    /// The right boundary is the arc `x = sqrt(R² − (z − h/2)²)` through the
    /// three right-hand hexagon vertices; the left one is the same arc moved
    /// back by one width, so neighbouring tiles mate.
    pub fn lateral_shift(&self, z: f64) -> f64 {
        let dz = z - 0.5 * self.height;
        (self.radius * self.radius - dz * dz).max(0.0).sqrt() - 0.75 * self.radius
    }
}

/// The tile has the hexagon's area `(3√3/2)R²` spread over width `ℓ`,
/// so `R = ℓ/1.5`.
pub fn hex_tile_dims(p: &HexBlockParams) -> HexTileDims {
    let width = block_length(p.n, p.r_i);
    let radius = width / 1.5;
    HexTileDims {
        width,
        radius,
        height: 3f64.sqrt() * radius,
    }
}

/// Layered tube of hexagon-based blocks with flat frame layers.
pub fn build_hex_assembly(p: &HexBlockParams, res: &MeshResolution) -> Result<Assembly> {
    p.validate()?;
    res.check_basic()?;
    let dims = hex_tile_dims(p);
    let t = p.r_o - p.r_i;
    let n = p.n as f64;
    let (nx, ny, nz) = (res.div_x, res.div_y, res.div_z);
    let nl = p.layers as i32;
    let mut bodies = Vec::with_capacity(p.n * (p.layers + 2));
    for layer in -1..=nl {
        let parity = layer_parity(layer);
        let is_frame = layer < 0 || layer == nl;
        for slot in 0..p.n {
            let u0 = slot as f64 + 0.5 * parity;
            let pos = |i: usize, j: usize, k: usize| {
                let zl = dims.height * k as f64 / nz as f64;
                let x = -0.5 * dims.width + dims.lateral_shift(zl) + dims.width * i as f64 / nx as f64;
                let y = t * j as f64 / ny as f64;
                cylinder_point(u0 + x / dims.width, y, layer as f64 * dims.height + zl, p.r_i, n, 0.0)
            };
            let tag = |side: Side| match side {
                Side::XMin | Side::XMax => FaceTag::Lateral,
                Side::YMin => FaceTag::Inner,
                Side::YMax => FaceTag::Outer,
                Side::ZMin if layer < 0 => FaceTag::FrameExposed,
                Side::ZMax if layer == nl => FaceTag::FrameExposed,
                Side::ZMin => FaceTag::Bottom,
                Side::ZMax => FaceTag::Top,
            };
            let mesh = BlockMesh::structured(nx, ny, nz, pos, tag);
            bodies.push(Body::new(bodies.len(), mesh, layer, slot, is_frame));
        }
    }
    Ok(Assembly {
        bodies,
        r_i: p.r_i,
        r_o: p.r_o,
        kind: BlockKind::Hexagon,
        n: p.n,
        layers: p.layers,
        layer_height: dims.height,
    })
}
