use crate::Vec3;
use serde::{Deserialize, Serialize};

/// Boundary label of a surface quad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaceTag {
    Inner,
    Outer,
    Top,
    Bottom,
    Lateral,
    FrameExposed,
}

/// Side of a structured block, in planar block coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

/// Hexahedral volume mesh with its outward-oriented boundary quads.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMesh {
    pub vertices: Vec<Vec3>,
    pub hex_cells: Vec<[usize; 8]>,
    pub surface_faces: Vec<[usize; 4]>,
    pub face_tags: Vec<FaceTag>,
    /// Owning hex cell of each surface face.
    pub face_cells: Vec<usize>,
}

// 2-point Gauss rule on [0, 1]; exact for the trilinear Jacobian and moments.
const GAUSS: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

impl BlockMesh {
    /// Structured `nx × ny × nz` mesh with vertex `(i, j, k)` at `pos(i, j, k)`.
    pub(crate) fn structured(
        nx: usize,
        ny: usize,
        nz: usize,
        pos: impl Fn(usize, usize, usize) -> Vec3,
        tag: impl Fn(Side) -> FaceTag,
    ) -> Self {
        let vid = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
        let cid = |i: usize, j: usize, k: usize| i + nx * (j + ny * k);
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
        for k in 0..=nz {
            for j in 0..=ny {
                for i in 0..=nx {
                    vertices.push(pos(i, j, k));
                }
            }
        }
        let mut hex_cells = Vec::with_capacity(nx * ny * nz);
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    hex_cells.push([
                        vid(i, j, k),
                        vid(i + 1, j, k),
                        vid(i + 1, j + 1, k),
                        vid(i, j + 1, k),
                        vid(i, j, k + 1),
                        vid(i + 1, j, k + 1),
                        vid(i + 1, j + 1, k + 1),
                        vid(i, j + 1, k + 1),
                    ]);
                }
            }
        }
        let mut mesh = BlockMesh {
            vertices,
            hex_cells,
            surface_faces: Vec::new(),
            face_tags: Vec::new(),
            face_cells: Vec::new(),
        };
        let push = |m: &mut BlockMesh, quad: [usize; 4], cell: usize, side: Side| {
            m.push_oriented(quad, cell, tag(side));
        };
        for k in 0..nz {
            for j in 0..ny {
                let q0 = [vid(0, j, k), vid(0, j + 1, k), vid(0, j + 1, k + 1), vid(0, j, k + 1)];
                push(&mut mesh, q0, cid(0, j, k), Side::XMin);
                let q1 = [vid(nx, j, k), vid(nx, j + 1, k), vid(nx, j + 1, k + 1), vid(nx, j, k + 1)];
                push(&mut mesh, q1, cid(nx - 1, j, k), Side::XMax);
            }
        }
        for k in 0..nz {
            for i in 0..nx {
                let q0 = [vid(i, 0, k), vid(i + 1, 0, k), vid(i + 1, 0, k + 1), vid(i, 0, k + 1)];
                push(&mut mesh, q0, cid(i, 0, k), Side::YMin);
                let q1 = [vid(i, ny, k), vid(i + 1, ny, k), vid(i + 1, ny, k + 1), vid(i, ny, k + 1)];
                push(&mut mesh, q1, cid(i, ny - 1, k), Side::YMax);
            }
        }
        for j in 0..ny {
            for i in 0..nx {
                let q0 = [vid(i, j, 0), vid(i + 1, j, 0), vid(i + 1, j + 1, 0), vid(i, j + 1, 0)];
                push(&mut mesh, q0, cid(i, j, 0), Side::ZMin);
                let q1 = [vid(i, j, nz), vid(i + 1, j, nz), vid(i + 1, j + 1, nz), vid(i, j + 1, nz)];
                push(&mut mesh, q1, cid(i, j, nz - 1), Side::ZMax);
            }
        }
        mesh
    }

    fn push_oriented(&mut self, mut quad: [usize; 4], cell: usize, tag: FaceTag) {
        let s = self.quad_vector_area(&quad);
        let fc = self.quad_centroid(&quad);
        if s.dot(&(fc - self.cell_vertex_mean(cell))) < 0.0 {
            quad.reverse();
        }
        self.surface_faces.push(quad);
        self.face_tags.push(tag);
        self.face_cells.push(cell);
    }

    /// Unit cube `[0,1]³` as a single cell (handy for tests and examples).
    pub fn unit_cube(origin: Vec3) -> Self {
        Self::structured(
            1,
            1,
            1,
            |i, j, k| origin + Vec3::new(i as f64, j as f64, k as f64),
            |side| match side {
                Side::ZMin => FaceTag::Bottom,
                Side::ZMax => FaceTag::Top,
                Side::YMin => FaceTag::Inner,
                Side::YMax => FaceTag::Outer,
                _ => FaceTag::Lateral,
            },
        )
    }

    /// Axis-aligned box `[lo, hi]` subdivided `nx × ny × nz`.
    pub fn cuboid(lo: Vec3, hi: Vec3, nx: usize, ny: usize, nz: usize) -> Self {
        let d = hi - lo;
        Self::structured(
            nx,
            ny,
            nz,
            |i, j, k| {
                lo + Vec3::new(
                    d.x * i as f64 / nx as f64,
                    d.y * j as f64 / ny as f64,
                    d.z * k as f64 / nz as f64,
                )
            },
            |side| match side {
                Side::ZMin => FaceTag::Bottom,
                Side::ZMax => FaceTag::Top,
                Side::YMin => FaceTag::Inner,
                Side::YMax => FaceTag::Outer,
                _ => FaceTag::Lateral,
            },
        )
    }

    /// Copy with every vertex passed through `f`; face orientation is
    /// re-checked so outward stays outward under reflections.
    pub fn map_vertices(&self, f: impl Fn(&Vec3) -> Vec3) -> Self {
        let mut out = BlockMesh {
            vertices: self.vertices.iter().map(f).collect(),
            hex_cells: self.hex_cells.clone(),
            surface_faces: Vec::with_capacity(self.surface_faces.len()),
            face_tags: Vec::with_capacity(self.face_tags.len()),
            face_cells: Vec::with_capacity(self.face_cells.len()),
        };
        for ((q, t), c) in self.surface_faces.iter().zip(&self.face_tags).zip(&self.face_cells) {
            out.push_oriented(*q, *c, *t);
        }
        out
    }

    fn quad_vector_area(&self, q: &[usize; 4]) -> Vec3 {
        let p = |a: usize| self.vertices[q[a]];
        0.5 * (p(2) - p(0)).cross(&(p(3) - p(1)))
    }

    fn quad_centroid(&self, q: &[usize; 4]) -> Vec3 {
        q.iter().map(|&v| self.vertices[v]).sum::<Vec3>() / 4.0
    }

    fn cell_vertex_mean(&self, c: usize) -> Vec3 {
        self.hex_cells[c].iter().map(|&v| self.vertices[v]).sum::<Vec3>() / 8.0
    }

    /// Vector area of face `k`: outward normal times area. For a warped quad
    /// this is the area-weighted average of its two triangle normals and does
    /// not depend on the choice of diagonal.
    pub fn face_vector_area(&self, k: usize) -> Vec3 {
        self.quad_vector_area(&self.surface_faces[k])
    }

    pub fn face_area(&self, k: usize) -> f64 {
        self.face_vector_area(k).norm()
    }

    pub fn face_normal(&self, k: usize) -> Vec3 {
        self.face_vector_area(k).normalize()
    }

    /// Vertex mean of face `k`, independent of the vertex ordering.
    pub fn face_centroid(&self, k: usize) -> Vec3 {
        self.quad_centroid(&self.surface_faces[k])
    }

    /// Exact volume and centroid of trilinear cell `c`.
    pub fn cell_volume_centroid(&self, c: usize) -> (f64, Vec3) {
        let x: [Vec3; 8] = self.hex_cells[c].map(|v| self.vertices[v]);
        // local coordinates of the 8 nodes
        const L: [[f64; 3]; 8] = [
            [0., 0., 0.],
            [1., 0., 0.],
            [1., 1., 0.],
            [0., 1., 0.],
            [0., 0., 1.],
            [1., 0., 1.],
            [1., 1., 1.],
            [0., 1., 1.],
        ];
        let mut vol = 0.0;
        let mut mom = Vec3::zeros();
        for &a in &GAUSS {
            for &b in &GAUSS {
                for &g in &GAUSS {
                    let xi = [a, b, g];
                    let mut jac = [Vec3::zeros(); 3];
                    let mut p = Vec3::zeros();
                    for (node, l) in x.iter().zip(&L) {
                        let w: [f64; 3] = [0, 1, 2].map(|d| if l[d] > 0.5 { xi[d] } else { 1.0 - xi[d] });
                        let sgn: [f64; 3] = [0, 1, 2].map(|d| if l[d] > 0.5 { 1.0 } else { -1.0 });
                        p += node * (w[0] * w[1] * w[2]);
                        jac[0] += node * (sgn[0] * w[1] * w[2]);
                        jac[1] += node * (w[0] * sgn[1] * w[2]);
                        jac[2] += node * (w[0] * w[1] * sgn[2]);
                    }
                    let det = jac[0].dot(&jac[1].cross(&jac[2])) / 8.0;
                    vol += det;
                    mom += p * det;
                }
            }
        }
        (vol.abs(), mom / vol)
    }

    /// Total volume and volume centroid.
    pub fn volume_centroid(&self) -> (f64, Vec3) {
        let mut vol = 0.0;
        let mut mom = Vec3::zeros();
        for c in 0..self.hex_cells.len() {
            let (v, x) = self.cell_volume_centroid(c);
            vol += v;
            mom += x * v;
        }
        (vol, mom / vol)
    }

    pub fn volume(&self) -> f64 {
        self.volume_centroid().0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_counts_and_volume() {
        let m = BlockMesh::unit_cube(Vec3::zeros());
        assert_eq!(m.vertices.len(), 8);
        assert_eq!(m.surface_faces.len(), 6);
        let (v, c) = m.volume_centroid();
        assert!((v - 1.0).abs() < 1e-14);
        assert!((c - Vec3::new(0.5, 0.5, 0.5)).norm() < 1e-14);
        for k in 0..6 {
            assert!((m.face_area(k) - 1.0).abs() < 1e-14);
            let out = m.face_centroid(k) - Vec3::new(0.5, 0.5, 0.5);
            assert!((m.face_normal(k) - out * 2.0).norm() < 1e-14);
        }
    }

    #[test]
    fn sheared_cell_volume_is_exact() {
        // pure z-shear with a warped top and bottom keeps the volume
        let m = BlockMesh::structured(
            1,
            1,
            1,
            |i, j, k| {
                let (x, y) = (i as f64, j as f64);
                Vec3::new(x, y, k as f64 + 0.3 * x * y - 0.2 * x)
            },
            |_| FaceTag::Lateral,
        );
        assert!((m.volume() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reflection_keeps_outward_orientation() {
        let m = BlockMesh::cuboid(Vec3::zeros(), Vec3::new(2.0, 1.0, 1.0), 2, 1, 1)
            .map_vertices(|p| Vec3::new(-p.x, p.y, p.z));
        let (_, c) = m.volume_centroid();
        for k in 0..m.surface_faces.len() {
            assert!(m.face_vector_area(k).dot(&(m.face_centroid(k) - c)) > 0.0);
        }
    }
}
