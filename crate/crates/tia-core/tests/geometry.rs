//! Invariants of the block and assembly construction.

use proptest::prelude::*;
use tia_core::contact::detect_contacts_default;
use tia_core::geometry::{
    build_assembly, build_hex_assembly, build_planar_sine_block, Assembly, BlockMesh, FaceTag, HexBlockParams,
    MeshResolution, SineBlockParams,
};
use tia_core::statics::explosion_check;
use tia_core::Vec3;

fn coarse(f: f64) -> MeshResolution {
    MeshResolution::new((12.0 * f).round() as usize, 2, 6)
}

fn params(a: f64, f: f64, s: f64, n: usize, t: f64) -> SineBlockParams {
    SineBlockParams {
        a,
        f,
        s,
        n,
        t,
        ..SineBlockParams::tsb1()
    }
}

/// Generalised winding number of a closed quad surface around `x`: about 1
/// inside, 0 outside, ½ on a face.
fn winding(mesh: &BlockMesh, x: &Vec3) -> f64 {
    let mut omega = 0.0;
    for q in &mesh.surface_faces {
        for tri in [[q[0], q[1], q[2]], [q[0], q[2], q[3]]] {
            let a = mesh.vertices[tri[0]] - x;
            let b = mesh.vertices[tri[1]] - x;
            let c = mesh.vertices[tri[2]] - x;
            let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
            if la < 1e-12 || lb < 1e-12 || lc < 1e-12 {
                continue;
            }
            let num = a.dot(&b.cross(&c));
            let den = la * lb * lc + a.dot(&b) * lc + b.dot(&c) * la + c.dot(&a) * lb;
            omega += 2.0 * num.atan2(den);
        }
    }
    omega / (4.0 * std::f64::consts::PI)
}

fn assert_no_overlap(asm: &Assembly) {
    let pairs = detect_contacts_default(asm).unwrap();
    let mut neighbours: Vec<(usize, usize)> = pairs.iter().map(|p| (p.master_body, p.slave_body)).collect();
    neighbours.sort_unstable();
    neighbours.dedup();
    for (a, b) in neighbours {
        for (x, y) in [(a, b), (b, a)] {
            for v in &asm.bodies[x].mesh.vertices {
                let w = winding(&asm.bodies[y].mesh, v);
                assert!(w < 0.75, "vertex of body {x} inside body {y} (winding {w})");
            }
        }
    }
}

#[test]
fn reference_assemblies_have_56_bodies() {
    for p in [SineBlockParams::tsb1(), SineBlockParams::tsb2()] {
        let asm = build_assembly(&p, &coarse(p.f)).unwrap();
        assert_eq!(asm.bodies.len(), 56);
        assert_eq!(asm.bodies.iter().filter(|b| b.is_frame).count(), 8);
    }
    let asm = build_hex_assembly(&HexBlockParams::thb0(), &MeshResolution::new(8, 2, 8)).unwrap();
    assert_eq!(asm.bodies.len(), 56);
}

#[test]
fn frames_are_trimmed_flat() {
    let p = SineBlockParams::tsb1();
    let asm = build_assembly(&p, &coarse(p.f)).unwrap();
    let top = (p.layers as f64 + 1.0) * p.h;
    for b in asm.bodies.iter().filter(|b| b.is_frame) {
        let m = &b.mesh;
        let want = if b.layer < 0 { -p.h } else { top };
        let exposed: Vec<_> = (0..m.surface_faces.len())
            .filter(|&k| m.face_tags[k] == FaceTag::FrameExposed)
            .collect();
        assert!(!exposed.is_empty());
        for k in exposed {
            for v in m.surface_faces[k] {
                assert!((m.vertices[v].z - want).abs() < 1e-9);
            }
        }
    }
    let zmax = asm.bodies.iter().flat_map(|b| b.mesh.vertices.iter().map(|v| v.z)).fold(f64::MIN, f64::max);
    let zmin = asm.bodies.iter().flat_map(|b| b.mesh.vertices.iter().map(|v| v.z)).fold(f64::MAX, f64::min);
    // full-height frame layers: (L + 2)·h
    assert!((zmax - zmin - 2800.0).abs() < 1e-9);
}

#[test]
fn reference_assemblies_do_not_overlap() {
    for p in [SineBlockParams::tsb1(), SineBlockParams::tsb2()] {
        let asm = build_assembly(&SineBlockParams { layers: 3, ..p }, &coarse(p.f)).unwrap();
        assert_no_overlap(&asm);
    }
    let hex = HexBlockParams { layers: 3, ..HexBlockParams::thb0() };
    assert_no_overlap(&build_hex_assembly(&hex, &MeshResolution::new(8, 2, 8)).unwrap());
}

#[test]
fn every_sine_face_has_a_partner() {
    for p in [SineBlockParams::tsb1(), SineBlockParams::tsb2(), params(10.0, 2.0, 0.0, 3, 50.0)] {
        let asm = build_assembly(&p, &coarse(p.f)).unwrap();
        let pairs = detect_contacts_default(&asm).unwrap();
        let mut matched: Vec<Vec<bool>> = asm.bodies.iter().map(|b| vec![false; b.mesh.surface_faces.len()]).collect();
        for q in &pairs {
            assert!(!matched[q.master_body][q.master_face], "face paired twice");
            assert!(!matched[q.slave_body][q.slave_face], "face paired twice");
            matched[q.master_body][q.master_face] = true;
            matched[q.slave_body][q.slave_face] = true;
        }
        for (b, body) in asm.bodies.iter().enumerate().filter(|(_, b)| !b.is_frame) {
            for (k, tag) in body.mesh.face_tags.iter().enumerate() {
                if matches!(tag, FaceTag::Top | FaceTag::Bottom | FaceTag::Lateral) {
                    assert!(matched[b][k], "body {b} face {k} ({tag:?}) unmatched");
                }
                if matches!(tag, FaceTag::Inner | FaceTag::Outer) {
                    assert!(!matched[b][k]);
                }
            }
        }
    }
}

#[test]
fn sine_blocks_do_not_explode_but_hex_blocks_do() {
    for p in [SineBlockParams::tsb1(), SineBlockParams::tsb2()] {
        let asm = build_assembly(&p, &coarse(p.f)).unwrap();
        assert!(!explosion_check(&asm, &detect_contacts_default(&asm).unwrap()));
        let flat = build_assembly(&SineBlockParams { a: 0.0, ..p }, &coarse(p.f)).unwrap();
        assert!(explosion_check(&flat, &detect_contacts_default(&flat).unwrap()));
    }
    let hex = build_hex_assembly(&HexBlockParams::thb0(), &MeshResolution::new(8, 2, 8)).unwrap();
    assert!(explosion_check(&hex, &detect_contacts_default(&hex).unwrap()));
}

#[test]
fn layers_are_congruent() {
    let p = SineBlockParams::tsb1();
    let asm = build_assembly(&p, &coarse(p.f)).unwrap();
    let layer_volume = |l: i32| -> f64 { asm.bodies.iter().filter(|b| b.layer == l).map(|b| b.volume).sum() };
    let v0 = layer_volume(0);
    for l in 1..p.layers as i32 {
        assert!((layer_volume(l) - v0).abs() < 1e-9 * v0);
    }
    // centroids of consecutive layers differ by h along z and π/n about it
    let c0 = asm.body_at(0, 0).unwrap().centroid;
    let c2 = asm.body_at(2, 0).unwrap().centroid;
    assert!((c2 - c0 - Vec3::new(0.0, 0.0, 2.0 * p.h)).norm() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn planar_volume_is_brick_volume(
        a in 0.0f64..60.0,
        fi in 0usize..3,
        si in 0usize..2,
        t in 30.0f64..70.0,
    ) {
        let f = [1.0, 1.5, 2.0][fi];
        let p = params(a, f, [0.0, 0.5][si], 4, t);
        let m = build_planar_sine_block(&p, &MeshResolution::default_for_frequency(f).unwrap()).unwrap();
        let brick = p.block_length() * t * p.h;
        prop_assert!((m.volume() - brick).abs() <= 1e-8 * brick);
    }

    #[test]
    fn assembly_contacts_are_conforming(
        a in 1.0f64..40.0,
        fi in 0usize..3,
        si in 0usize..2,
        n in 2usize..7,
    ) {
        let f = [1.0, 1.5, 2.0][fi];
        let p = SineBlockParams { layers: 3, ..params(a, f, [0.0, 0.5][si], n, 40.0) };
        prop_assume!(p.validate().is_ok());
        let asm = build_assembly(&p, &coarse(f)).unwrap();
        let pairs = detect_contacts_default(&asm).unwrap();
        for q in &pairs {
            let bm = &asm.bodies[q.master_body].mesh;
            let bs = &asm.bodies[q.slave_body].mesh;
            let d = bm.face_centroid(q.master_face) - bs.face_centroid(q.slave_face);
            prop_assert!(d.norm() <= 1e-6 * p.r_i);
            prop_assert!((bm.face_area(q.master_face) - bs.face_area(q.slave_face)).abs() <= 1e-9 * q.area.max(1.0));
            prop_assert!((bm.face_normal(q.master_face) + bs.face_normal(q.slave_face)).norm() <= 1e-6);
        }
        prop_assert!(!explosion_check(&asm, &pairs));
    }

    #[test]
    fn shift_preserves_interface_area(a in 1.0f64..40.0, fi in 0usize..3) {
        // the outer curve of a whole layer is the same for s = 0 and s = 0.5;
        // only the joints move
        let f = [1.0, 1.5, 2.0][fi];
        let res = MeshResolution::default_for_frequency(f).unwrap();
        let area = |s: f64| -> f64 {
            let asm = build_assembly(&SineBlockParams { layers: 2, ..params(a, f, s, 4, 40.0) }, &res).unwrap();
            asm.bodies
                .iter()
                .filter(|b| b.layer == 0)
                .map(|b| {
                    (0..b.mesh.surface_faces.len())
                        .filter(|&k| b.mesh.face_tags[k] == FaceTag::Top)
                        .map(|k| b.mesh.face_area(k))
                        .sum::<f64>()
                })
                .sum()
        };
        let (a0, a5) = (area(0.0), area(0.5));
        prop_assert!((a0 - a5).abs() <= 1e-3 * a0, "{a0} vs {a5}");
    }
}
