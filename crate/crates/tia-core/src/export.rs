//! Surface-mesh export for inspection in external viewers.
//!
//! Two ASCII formats are supported:
//!
//! * **OBJ** – one `o body_NNNN` object per body with `v`/`f` records
//!   (global 1-based indices). Per-face pressures, when present, follow the
//!   object's faces on a single comment line `#@pressure p_0 p_1 …` that
//!   ordinary OBJ readers ignore.
//! * **VTK legacy ASCII** – one `POLYDATA` set holding all bodies. Bodies are
//!   identified by the `body_id` cell scalar; pressures are the `pressure`
//!   cell scalar.
//!
//! Pressures are in MPa, zero on faces without a contact force.

use crate::contact::ContactPair;
use crate::geometry::Assembly;
use crate::metrics::PressureField;
use crate::{Error, Result, Vec3};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Obj,
    VtkAscii,
}

impl FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "obj" => Ok(Self::Obj),
            "vtk-ascii" => Ok(Self::VtkAscii),
            _ => Err(Error::Config(format!("unknown export format {s:?} (obj|vtk-ascii)"))),
        }
    }
}

/// Quad surface of one body with compacted vertex numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceObject {
    pub name: String,
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 4]>,
    pub pressure: Option<Vec<f64>>,
}

pub fn body_name(id: usize) -> String {
    format!("body_{id:04}")
}

/// Surface objects of every body, optionally with per-face pressures.
pub fn surface_objects(asm: &Assembly, pressures: Option<(&PressureField, &[ContactPair])>) -> Vec<SurfaceObject> {
    asm.bodies
        .iter()
        .map(|b| {
            let mut remap: HashMap<usize, usize> = HashMap::new();
            let mut vertices = Vec::new();
            let faces = b
                .mesh
                .surface_faces
                .iter()
                .map(|q| {
                    q.map(|v| {
                        *remap.entry(v).or_insert_with(|| {
                            vertices.push(b.mesh.vertices[v]);
                            vertices.len() - 1
                        })
                    })
                })
                .collect();
            SurfaceObject {
                name: body_name(b.id),
                vertices,
                faces,
                pressure: pressures.map(|(field, pairs)| field.face_pressures(asm, pairs, b.id)),
            }
        })
        .collect()
}

pub fn to_obj(objs: &[SurfaceObject]) -> String {
    let mut s = String::from("# tia surface mesh (quads, outward orientation)\n");
    let mut base = 1;
    for o in objs {
        let _ = writeln!(s, "o {}", o.name);
        for v in &o.vertices {
            let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
        }
        for f in &o.faces {
            let _ = writeln!(s, "f {} {} {} {}", f[0] + base, f[1] + base, f[2] + base, f[3] + base);
        }
        if let Some(p) = &o.pressure {
            s.push_str("#@pressure");
            for v in p {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        base += o.vertices.len();
    }
    s
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse {
        path: "<mesh>".into(),
        msg: msg.into(),
    }
}

fn nums<T: FromStr>(it: std::str::SplitWhitespace<'_>, line: usize) -> Result<Vec<T>> {
    it.map(|t| t.parse::<T>().map_err(|_| parse_err(format!("line {line}: bad number {t:?}"))))
        .collect()
}

pub fn from_obj(text: &str) -> Result<Vec<SurfaceObject>> {
    let mut objs: Vec<SurfaceObject> = Vec::new();
    let mut base = 1usize;
    for (ln, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let Some(tag) = it.next() else { continue };
        let cur = |objs: &mut Vec<SurfaceObject>| -> Result<usize> {
            objs.len()
                .checked_sub(1)
                .ok_or_else(|| parse_err(format!("line {}: record before first object", ln + 1)))
        };
        match tag {
            "o" => {
                if let Some(last) = objs.last() {
                    base += last.vertices.len();
                }
                objs.push(SurfaceObject {
                    name: it.next().unwrap_or_default().to_owned(),
                    vertices: Vec::new(),
                    faces: Vec::new(),
                    pressure: None,
                });
            }
            "v" => {
                let i = cur(&mut objs)?;
                let v: Vec<f64> = nums(it, ln + 1)?;
                if v.len() != 3 {
                    return Err(parse_err(format!("line {}: vertex needs 3 coordinates", ln + 1)));
                }
                objs[i].vertices.push(Vec3::new(v[0], v[1], v[2]));
            }
            "f" => {
                let i = cur(&mut objs)?;
                let f: Vec<usize> = nums(it, ln + 1)?;
                if f.len() != 4 || f.iter().any(|&k| k < base || k >= base + objs[i].vertices.len()) {
                    return Err(parse_err(format!("line {}: bad quad {f:?}", ln + 1)));
                }
                objs[i].faces.push([f[0] - base, f[1] - base, f[2] - base, f[3] - base]);
            }
            "#@pressure" => {
                let i = cur(&mut objs)?;
                let p: Vec<f64> = nums(it, ln + 1)?;
                if p.len() != objs[i].faces.len() {
                    return Err(parse_err(format!("line {}: pressure count mismatch", ln + 1)));
                }
                objs[i].pressure = Some(p);
            }
            _ => {}
        }
    }
    Ok(objs)
}

pub fn to_vtk(objs: &[SurfaceObject]) -> String {
    let nv: usize = objs.iter().map(|o| o.vertices.len()).sum();
    let nf: usize = objs.iter().map(|o| o.faces.len()).sum();
    let mut s = String::from("# vtk DataFile Version 3.0\ntia surface mesh\nASCII\nDATASET POLYDATA\n");
    let _ = writeln!(s, "POINTS {nv} double");
    for o in objs {
        for v in &o.vertices {
            let _ = writeln!(s, "{} {} {}", v.x, v.y, v.z);
        }
    }
    let _ = writeln!(s, "POLYGONS {nf} {}", 5 * nf);
    let mut base = 0;
    for o in objs {
        for f in &o.faces {
            let _ = writeln!(s, "4 {} {} {} {}", f[0] + base, f[1] + base, f[2] + base, f[3] + base);
        }
        base += o.vertices.len();
    }
    let _ = writeln!(s, "CELL_DATA {nf}\nSCALARS body_id int 1\nLOOKUP_TABLE default");
    for (k, o) in objs.iter().enumerate() {
        let id = o.name.strip_prefix("body_").and_then(|v| v.parse().ok()).unwrap_or(k);
        for _ in &o.faces {
            let _ = writeln!(s, "{id}");
        }
    }
    if objs.iter().all(|o| o.pressure.is_some()) && !objs.is_empty() {
        s.push_str("SCALARS pressure double 1\nLOOKUP_TABLE default\n");
        for o in objs {
            for p in o.pressure.as_ref().expect("checked") {
                let _ = writeln!(s, "{p}");
            }
        }
    }
    s
}

pub fn from_vtk(text: &str) -> Result<Vec<SurfaceObject>> {
    let mut tokens = text
        .lines()
        .skip(4)
        .flat_map(|l| l.split_whitespace())
        .peekable();
    let mut next = |what: &str| tokens.next().ok_or_else(|| parse_err(format!("truncated file at {what}")));
    let expect = |got: &str, want: &str| {
        if got == want {
            Ok(())
        } else {
            Err(parse_err(format!("expected {want}, found {got}")))
        }
    };
    let num = |t: &str| t.parse::<f64>().map_err(|_| parse_err(format!("bad number {t:?}")));
    let int = |t: &str| t.parse::<usize>().map_err(|_| parse_err(format!("bad integer {t:?}")));
    expect(next("POINTS")?, "POINTS")?;
    let nv = int(next("point count")?)?;
    next("point type")?;
    let mut pts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (x, y, z) = (num(next("x")?)?, num(next("y")?)?, num(next("z")?)?);
        pts.push(Vec3::new(x, y, z));
    }
    expect(next("POLYGONS")?, "POLYGONS")?;
    let nf = int(next("polygon count")?)?;
    next("polygon size")?;
    let mut quads = Vec::with_capacity(nf);
    for _ in 0..nf {
        if int(next("polygon arity")?)? != 4 {
            return Err(parse_err("only quads are supported"));
        }
        let mut q = [0usize; 4];
        for v in &mut q {
            *v = int(next("polygon index")?)?;
            if *v >= nv {
                return Err(parse_err(format!("vertex index {v} out of range")));
            }
        }
        quads.push(q);
    }
    expect(next("CELL_DATA")?, "CELL_DATA")?;
    int(next("cell count")?)?;
    let mut ids = Vec::new();
    let mut pressure = None;
    while let Ok(tok) = next("SCALARS") {
        expect(tok, "SCALARS")?;
        let name = next("scalar name")?.to_owned();
        next("scalar type")?;
        next("components")?;
        next("LOOKUP_TABLE")?;
        next("table name")?;
        let mut vals = Vec::with_capacity(nf);
        for _ in 0..nf {
            vals.push(num(next("scalar value")?)?);
        }
        match name.as_str() {
            "body_id" => ids = vals.iter().map(|v| *v as usize).collect(),
            "pressure" => pressure = Some(vals),
            _ => {}
        }
    }
    if ids.len() != nf {
        return Err(parse_err("missing body_id cell data"));
    }
    // regroup cells by body, in order of first appearance
    let mut objs: Vec<SurfaceObject> = Vec::new();
    let mut index: HashMap<usize, (usize, HashMap<usize, usize>)> = HashMap::new();
    for (c, q) in quads.iter().enumerate() {
        let id = ids[c];
        let (k, remap) = index.entry(id).or_insert_with(|| {
            objs.push(SurfaceObject {
                name: body_name(id),
                vertices: Vec::new(),
                faces: Vec::new(),
                pressure: pressure.as_ref().map(|_| Vec::new()),
            });
            (objs.len() - 1, HashMap::new())
        });
        let o = &mut objs[*k];
        let local = q.map(|v| {
            *remap.entry(v).or_insert_with(|| {
                o.vertices.push(pts[v]);
                o.vertices.len() - 1
            })
        });
        o.faces.push(local);
        if let (Some(p), Some(all)) = (o.pressure.as_mut(), pressure.as_ref()) {
            p.push(all[c]);
        }
    }
    Ok(objs)
}

/// Writes the assembly surface to `path`.
pub fn export_mesh(
    asm: &Assembly,
    format: ExportFormat,
    path: &Path,
    pressures: Option<(&PressureField, &[ContactPair])>,
) -> Result<()> {
    let objs = surface_objects(asm, pressures);
    let text = match format {
        ExportFormat::Obj => to_obj(&objs),
        ExportFormat::VtkAscii => to_vtk(&objs),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a file written by [`export_mesh`].
pub fn import_mesh(path: &Path, format: ExportFormat) -> Result<Vec<SurfaceObject>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed = match format {
        ExportFormat::Obj => from_obj(&text),
        ExportFormat::VtkAscii => from_vtk(&text),
    };
    parsed.map_err(|e| match e {
        Error::Parse { msg, .. } => Error::Parse {
            path: path.into(),
            msg,
        },
        other => other,
    })
}
