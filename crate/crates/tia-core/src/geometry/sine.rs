use super::mesh::Side;
use super::{block_length, Assembly, BlockKind, BlockMesh, Body, FaceTag, MeshResolution};
use crate::{Error, Result, Vec3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Design vector of the Sine block (`s = 0.5` gives the Cosine block).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineBlockParams {
    pub h: f64,
    pub a: f64,
    pub f: f64,
    pub s: f64,
    pub n: usize,
    pub r_i: f64,
    pub t: f64,
    #[serde(rename = "L")]
    pub layers: usize,
}

impl SineBlockParams {
    /// TSB 1: the Sine block of the reference study.
    pub const fn tsb1() -> Self {
        Self {
            h: 200.0,
            a: 20.0,
            f: 1.5,
            s: 0.0,
            n: 4,
            r_i: 120.0,
            t: 40.0,
            layers: 12,
        }
    }

    /// TSB 2: TSB 1 with a half-period phase shift (Cosine block).
    pub const fn tsb2() -> Self {
        Self { s: 0.5, ..Self::tsb1() }
    }

    pub fn block_length(&self) -> f64 {
        block_length(self.n, self.r_i)
    }

    pub fn r_o(&self) -> f64 {
        self.r_i + self.t
    }

    /// Half-wave count around one layer, `2fn`.
    pub fn n_w(&self) -> f64 {
        2.0 * self.f * self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        let finite = [self.h, self.a, self.f, self.s, self.r_i, self.t]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return bad("non-finite parameter".into());
        }
        if self.h <= 0.0 || self.t <= 0.0 || self.r_i <= 0.0 {
            return bad(format!("h, t, r_i must be positive: {self:?}"));
        }
        if self.a < 0.0 {
            return bad(format!("amplitude a = {} must be ≥ 0", self.a));
        }
        if self.a >= self.h / 2.0 {
            return bad(format!("a = {} must be below h/2 = {}", self.a, self.h / 2.0));
        }
        if self.f <= 0.0 {
            return bad(format!("frequency f = {} must be positive", self.f));
        }
        if !(0.0..1.0).contains(&self.s) {
            return bad(format!("shift s = {} must lie in [0, 1)", self.s));
        }
        if self.n < 2 || self.layers < 1 {
            return bad(format!("need n ≥ 2 and L ≥ 1, got n = {}, L = {}", self.n, self.layers));
        }
        let nw = self.n_w();
        if (nw - nw.round()).abs() > 1e-9 {
            return bad(format!(
                "2·f·n = {nw} must be an integer for the interface to close around the ring"
            ));
        }
        Ok(())
    }

    /// Checks that sine extrema of both layer parities fall on mesh lines.
    pub fn validate_resolution(&self, res: &MeshResolution) -> Result<()> {
        res.check_basic()?;
        let nx = res.div_x as f64;
        let on_grid = |v: f64| (v - v.round()).abs() < 1e-9;
        // extrema at u = (1/2 − s + m)/(2f); grid lines at u = −1/2 + i/div_x
        let spacing = nx / (2.0 * self.f);
        let first = nx * ((0.5 - self.s) / (2.0 * self.f) + 0.5);
        if !on_grid(spacing) || !on_grid(first) {
            return Err(Error::InvalidResolution(format!(
                "{res}: sine extrema of f = {}, s = {} are not on mesh lines",
                self.f, self.s
            )));
        }
        Ok(())
    }
}

/// z-offset of the planar block at `(x, y)`: `(y/t)·a·sin(2πf·x/ℓ + sπ)`.
pub fn sine_offset(x: f64, y: f64, p: &SineBlockParams) -> f64 {
    (y / p.t) * p.a * (2.0 * PI * p.f * x / p.block_length() + p.s * PI).sin()
}

/// Hexahedral mesh of the sheared brick `[−ℓ/2, ℓ/2]×[0,t]×[0,h]`.
pub fn build_planar_sine_block(p: &SineBlockParams, res: &MeshResolution) -> Result<BlockMesh> {
    p.validate()?;
    p.validate_resolution(res)?;
    let l = p.block_length();
    let (nx, ny, nz) = (res.div_x, res.div_y, res.div_z);
    Ok(BlockMesh::structured(
        nx,
        ny,
        nz,
        |i, j, k| {
            let x = -0.5 * l + l * i as f64 / nx as f64;
            let y = p.t * j as f64 / ny as f64;
            let z = p.h * k as f64 / nz as f64;
            Vec3::new(x, y, z + sine_offset(x, y, p))
        },
        interior_tag,
    ))
}

fn interior_tag(side: Side) -> FaceTag {
    match side {
        Side::XMin | Side::XMax => FaceTag::Lateral,
        Side::YMin => FaceTag::Inner,
        Side::YMax => FaceTag::Outer,
        Side::ZMin => FaceTag::Bottom,
        Side::ZMax => FaceTag::Top,
    }
}

/// Wraps a planar block onto the cylinder: `r = r_i + y`,
/// `φ = (x/ℓ)(2π/n) + φ0`, height unchanged.
pub fn map_to_cylinder(planar: &BlockMesh, p: &SineBlockParams, phi0: f64) -> BlockMesh {
    let l = p.block_length();
    let n = p.n as f64;
    planar.map_vertices(|v| cylinder_point(v.x / l, v.y, v.z, p.r_i, n, phi0))
}

pub(crate) fn cylinder_point(u: f64, y: f64, z: f64, r_i: f64, n: f64, phi0: f64) -> Vec3 {
    let r = r_i + y;
    let phi = u * 2.0 * PI / n + phi0;
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// The interface surface shared by every pair of adjacent layers, as a
/// function of the ring coordinate `u = φ/(2π/n)` (block units, block 0 of an
/// even layer spans `[−1/2, 1/2]`) and the wall depth `y`.
///
/// When `2fn` is odd the sinusoid cannot close around the ring; it is then
/// cut at a zero crossing so the surface stays continuous with one kink.
#[derive(Debug, Clone, Copy)]
pub struct RingSurface {
    a: f64,
    f: f64,
    s: f64,
    t: f64,
    n: f64,
    cut: f64,
}

impl RingSurface {
    pub fn new(p: &SineBlockParams) -> Self {
        // largest zero crossing u = (m − s)/(2f) not above −1/2
        let m = (p.s - p.f + 1e-12).floor();
        Self {
            a: p.a,
            f: p.f,
            s: p.s,
            t: p.t,
            n: p.n as f64,
            cut: (m - p.s) / (2.0 * p.f),
        }
    }

    pub fn eval(&self, u: f64, y: f64) -> f64 {
        let u = if u >= self.cut + self.n { u - self.n } else { u };
        (y / self.t) * self.a * (2.0 * PI * self.f * u + self.s * PI).sin()
    }
}

pub(crate) fn layer_parity(layer: i32) -> f64 {
    layer.rem_euclid(2) as f64
}

/// Layered Sine/Cosine tube: `L` interior layers plus a flattened frame layer
/// below and above. Odd layers are rotated by half a block.
pub fn build_assembly(p: &SineBlockParams, res: &MeshResolution) -> Result<Assembly> {
    p.validate()?;
    p.validate_resolution(res)?;
    let surf = RingSurface::new(p);
    let n = p.n as f64;
    let (nx, ny, nz) = (res.div_x, res.div_y, res.div_z);
    let nl = p.layers as i32;
    let mut bodies = Vec::with_capacity(p.n * (p.layers + 2));
    for layer in -1..=nl {
        let parity = layer_parity(layer);
        let is_frame = layer < 0 || layer == nl;
        for slot in 0..p.n {
            let u0 = slot as f64 + 0.5 * parity - 0.5;
            let pos = |i: usize, j: usize, k: usize| {
                let u = u0 + i as f64 / nx as f64;
                let y = p.t * j as f64 / ny as f64;
                let zeta = k as f64 / nz as f64;
                let sv = surf.eval(u, y);
                let z = if layer < 0 {
                    -p.h + zeta * (p.h + sv)
                } else if layer == nl {
                    let base = nl as f64 * p.h + sv;
                    base + zeta * ((nl + 1) as f64 * p.h - base)
                } else {
                    layer as f64 * p.h + zeta * p.h + sv
                };
                cylinder_point(u, y, z, p.r_i, n, 0.0)
            };
            let tag = |side: Side| match side {
                Side::ZMin if layer < 0 => FaceTag::FrameExposed,
                Side::ZMax if layer == nl => FaceTag::FrameExposed,
                s => interior_tag(s),
            };
            let mesh = BlockMesh::structured(nx, ny, nz, pos, tag);
            bodies.push(Body::new(bodies.len(), mesh, layer, slot, is_frame));
        }
    }
    Ok(Assembly {
        bodies,
        r_i: p.r_i,
        r_o: p.r_o(),
        kind: BlockKind::Sine,
        n: p.n,
        layers: p.layers,
        layer_height: p.h,
    })
}
