//! Parametric block geometry and layered tube assemblies.
//!
//! Blocks are structured hexahedral meshes. A block is described in planar
//! coordinates `(x, y, z)` with `x` along the block length, `y` through the
//! wall and `z` along the tube axis, then wrapped onto the cylinder with
//! [`map_to_cylinder`].

mod assembly;
mod hex;
mod mesh;
mod sine;

pub use assembly::{Assembly, BlockKind, Body};
pub use hex::{build_hex_assembly, hex_tile_dims, HexBlockParams, HexTileDims};
pub use mesh::{BlockMesh, FaceTag};
pub use sine::{
    build_assembly, build_planar_sine_block, map_to_cylinder, sine_offset, RingSurface,
    SineBlockParams,
};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Planar block length for `n` blocks per layer on inner radius `r_i`:
/// the chord `r_i·sqrt(2(1 − cos(π/n)))`.
pub fn block_length(n: usize, r_i: f64) -> f64 {
    r_i * (2.0 * (1.0 - (PI / n as f64).cos())).sqrt()
}

/// Mesh subdivisions of a single block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeshResolution {
    pub div_x: usize,
    pub div_y: usize,
    pub div_z: usize,
}

impl MeshResolution {
    pub const fn new(div_x: usize, div_y: usize, div_z: usize) -> Self {
        Self {
            div_x,
            div_y,
            div_z,
        }
    }

    /// Default resolution for a sine block of frequency `f`: `(24f, 4, 24)`.
    pub fn default_for_frequency(f: f64) -> Result<Self> {
        let dx = 24.0 * f;
        if (dx - dx.round()).abs() > 1e-9 || dx < 1.0 {
            return Err(Error::InvalidResolution(format!(
                "24·f = {dx} is not a positive integer"
            )));
        }
        Ok(Self::new(dx.round() as usize, 4, 24))
    }

    /// Default resolution for hexagon-based blocks.
    pub const fn default_hex() -> Self {
        Self::new(24, 4, 24)
    }

    pub(crate) fn check_basic(&self) -> Result<()> {
        if self.div_x == 0 || self.div_y == 0 || self.div_z == 0 {
            return Err(Error::InvalidResolution(format!("{self}: all divisions must be ≥ 1")));
        }
        if self.div_x % 2 != 0 {
            return Err(Error::InvalidResolution(format!(
                "{self}: div_x must be even so half-block shifted layers share nodes"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for MeshResolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.div_x, self.div_y, self.div_z)
    }
}

impl FromStr for MeshResolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::InvalidResolution(format!("expected NX,NY,NZ, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut v = [0usize; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| bad())?;
        }
        Ok(Self::new(v[0], v[1], v[2]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_length_examples() {
        assert!((block_length(2, 120.0) - 169.705_627_484_771_4).abs() < 1e-9);
        assert!((block_length(4, 120.0) - 91.844_023_767_621_55).abs() < 1e-9);
        let n = 360;
        let ratio = block_length(n, 120.0) * n as f64 / (PI * 120.0);
        assert!((ratio - 1.0).abs() < 1e-4);
    }

    #[test]
    fn resolution_parse_roundtrip() {
        let r: MeshResolution = "36,4,24".parse().unwrap();
        assert_eq!(r, MeshResolution::new(36, 4, 24));
        assert_eq!(r.to_string(), "36,4,24");
        assert!("36,4".parse::<MeshResolution>().is_err());
        assert!("a,b,c".parse::<MeshResolution>().is_err());
    }

    #[test]
    fn default_resolution_rule() {
        assert_eq!(
            MeshResolution::default_for_frequency(1.5).unwrap(),
            MeshResolution::new(36, 4, 24)
        );
        assert!(MeshResolution::default_for_frequency(1.01).is_err());
    }
}
