//! Randomized invariants across modules.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use crate::curves::ClosedCurve;
use crate::extrema::classify_circular;
use crate::geom::{area_centroid_2d, Vec2, Vec3};
use crate::io::config::SculptureConfig;
use crate::io::{obj, stl};
use crate::profiles::{preset_profile, CurvilinearPolygon, Density, PresetParams};
use crate::schedules::DeformationSchedule;
use crate::session::protocol::{decode_mesh, mesh_message};
use crate::session::{ControlSection, Role};
use crate::sweep::{frame_field, generate, SculptureMesh, SweepOptions};
use crate::validate::{self_intersect, self_intersect_brute_force, topology};

fn convex(k: usize, r: f64) -> Vec<Vec2> {
    (0..k)
        .map(|i| {
            let a = i as f64 * TAU / k as f64 + 0.1;
            Vec2::new(r * a.cos(), 0.8 * r * a.sin())
        })
        .collect()
}

fn tube(n: usize, m: usize, radius: f64) -> SculptureMesh {
    let curve = ClosedCurve::circle(Vec3::zeros(), 1.0).unwrap();
    let profile =
        preset_profile("shaved_circle", &PresetParams { radius: Some(radius), ..Default::default() }).unwrap();
    let sched = DeformationSchedule::constant(TAU, 1.0).unwrap();
    let opts = SweepOptions { sections: n, ring: m, require_valid_schedule: false, ..Default::default() };
    generate(&curve, &profile, &sched, &opts).unwrap()
}

fn soup() -> impl Strategy<Value = SculptureMesh> {
    prop::collection::vec(prop::array::uniform3(prop::array::uniform3(-1.0..1.0f64)), 2..60).prop_map(|tris| {
        let mut mesh = SculptureMesh::default();
        for (k, t) in tris.iter().enumerate() {
            let base = Vec3::from(t[0]);
            mesh.vertices.push(base);
            mesh.vertices.push(base + Vec3::from(t[1]) * 0.4);
            mesh.vertices.push(base + Vec3::from(t[2]) * 0.4);
            let i = 3 * k as u32;
            mesh.triangles.push([i, i + 1, i + 2]);
        }
        mesh
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn density_centroid_translates(k in 3usize..8, r in 0.3..3.0f64, cx in -2.0..2.0f64, cy in -2.0..2.0f64,
                                   dx in -10.0..10.0f64, dy in -10.0..10.0f64) {
        let base = 1.0 + r * (cx.abs() + cy.abs());
        let expr = format!("{base} + ({cx}) * x + ({cy}) * y");
        let p = CurvilinearPolygon::with_straight_edges(convex(k, r)).unwrap().with_density(Density::parse(&expr).unwrap());
        let c0 = p.centroid().unwrap();
        let moved = p.translated(Vec2::new(dx, dy))
            .with_density(Density::parse(&format!("{base} + ({cx}) * (x - ({dx})) + ({cy}) * (y - ({dy}))")).unwrap());
        let c1 = moved.centroid().unwrap();
        prop_assert!((c1 - c0 - Vec2::new(dx, dy)).norm() <= 1e-9 * (1.0 + r));
        prop_assert!(p.mass().unwrap() > 0.0);
    }

    #[test]
    fn uniform_centroid_is_the_area_centroid(k in 3usize..9, r in 0.1..5.0f64) {
        let verts = convex(k, r);
        let p = CurvilinearPolygon::with_straight_edges(verts.clone()).unwrap();
        let (area, c) = area_centroid_2d(&verts);
        prop_assert!((p.area() - area).abs() <= 1e-12 * area);
        prop_assert!((p.centroid().unwrap() - c).norm() <= 1e-12 * r);
    }

    #[test]
    fn swept_tubes_are_tori(n in 16usize..80, m in 3usize..24, radius in 0.05..0.9f64) {
        let mesh = tube(n, m, radius);
        let t = topology(mesh.vertices.len(), &mesh.triangles);
        prop_assert!(t.watertight && t.oriented);
        prop_assert_eq!(t.euler_characteristic, 0);
        prop_assert_eq!(t.genus, Some(1));
        prop_assert!(mesh.signed_volume() > 0.0);
    }

    #[test]
    fn bvh_matches_brute_force(mesh in soup()) {
        let fast: BTreeSet<_> = self_intersect(&mesh).into_iter().collect();
        let slow: BTreeSet<_> = self_intersect_brute_force(&mesh).into_iter().collect();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn stl_keeps_f32_coordinates(n in 16usize..40, m in 3usize..12, radius in 0.05..0.5f64) {
        let mesh = tube(n, m, radius);
        let back = stl::from_bytes(&stl::to_bytes(&mesh).unwrap()).unwrap();
        prop_assert_eq!(back.triangles.len(), mesh.triangles.len());
        for (a, b) in mesh.triangles.iter().zip(&back.triangles) {
            for (&i, &j) in a.iter().zip(b) {
                let p = mesh.vertices[i as usize].map(|x| x as f32);
                let q = back.vertices[j as usize].map(|x| x as f32);
                prop_assert_eq!(p, q);
            }
        }
        prop_assert_eq!(back.vertices.len(), mesh.vertices.len());
    }

    #[test]
    fn obj_is_exact(mesh in soup()) {
        let back = obj::from_str(&obj::to_string(&mesh)).unwrap();
        prop_assert_eq!(back.vertices, mesh.vertices);
        prop_assert_eq!(back.triangles, mesh.triangles);
    }

    #[test]
    fn mesh_messages_decode(n in 16usize..32, m in 3usize..10) {
        let mesh = tube(n, m, 0.3);
        let (verts, tris) = decode_mesh(&mesh_message("s1", 1, false, &mesh)).unwrap();
        prop_assert_eq!(&tris, &mesh.triangles);
        for (p, q) in mesh.vertices.iter().zip(&verts) {
            prop_assert_eq!([p.x as f32, p.y as f32, p.z as f32], *q);
        }
    }

    #[test]
    fn config_round_trips(t_star in 0.01..6.2f64, alpha in 0.1..10.0f64, radius in 1e-6..1e3f64,
                          sections in 16usize..5000, clearance in 0.0..1.0f64) {
        let text = format!(
            "mode = \"simple\"\n[curve]\npreset = \"fels3d\"\n[profile]\npreset = \"shaved_circle\"\n\
             params = {{ radius = {radius:?} }}\n[schedule]\nt_star = {t_star:?}\nalpha = {alpha:?}\n\
             [resolution]\nsections = {sections}\nring = 8\n[checks]\nself_intersection = false\nclearance = {clearance:?}\n"
        );
        let c = SculptureConfig::parse(&text).unwrap();
        prop_assert_eq!(c.schedule.t_star, Some(t_star));
        prop_assert_eq!(c.checks.clearance, clearance);
        prop_assert_eq!(SculptureConfig::parse(&c.to_toml().unwrap()).unwrap(), c);
    }

    #[test]
    fn distinct_values_alternate(values in prop::collection::btree_set(-1000i64..1000, 3..60), seed in 0usize..1000) {
        let mut v: Vec<f64> = values.into_iter().map(|x| x as f64).collect();
        let k = v.len();
        v.rotate_left(seed % k);
        for i in (0..k).step_by(3) {
            v.swap(i, (i * 7 + seed) % k);
        }
        let e = classify_circular(&v);
        prop_assert!(e.unique_min && e.unique_max);
        prop_assert!(e.alternates());
        let argmin = (0..k).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        prop_assert_eq!(e.global_min().unwrap().index, argmin);
    }

    #[test]
    fn frames_stay_orthonormal(n in 16usize..600, p in 1i32..4, q in 2i32..5, h in 0.1..1.0f64) {
        prop_assume!(p != q);
        let (pf, qf) = (p as f64, q as f64);
        let curve = ClosedCurve::from_fn(
            "knot", 3, TAU,
            move |t| nalgebra::DVector::from_vec(vec![(2.0 + (qf * t).cos()) * (pf * t).cos(), (2.0 + (qf * t).cos()) * (pf * t).sin(), h * (qf * t).sin()]),
            None::<fn(f64) -> nalgebra::DVector<f64>>,
        ).unwrap();
        let f = frame_field(&curve, n).unwrap();
        for fr in f.samples.iter().chain(std::iter::once(&f.end)) {
            prop_assert!((fr.u.norm() - 1.0).abs() < 1e-9 && (fr.v.norm() - 1.0).abs() < 1e-9);
            prop_assert!(fr.u.dot(&fr.tangent).abs() < 1e-9 && fr.u.dot(&fr.v).abs() < 1e-9);
        }
        prop_assert!((f.end.u - f.samples[0].u).norm() < 1e-9);
    }

    #[test]
    fn simple_schedules_have_one_minimum(t_star in 0.2..6.0f64, alpha in 0.2..8.0f64) {
        let s = DeformationSchedule::preset_simple(TAU, t_star, alpha).unwrap();
        let r = s.validate();
        prop_assert!(r.pass, "{:?}", r.failures);
        prop_assert!((s.scale(0.0) - 1.0).abs() < 1e-12 && (s.scale(TAU) - 1.0).abs() < 1e-12);
        prop_assert!(s.scale(t_star) <= s.scale(0.5 * t_star));
        let turns = s.total_twist() / TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-12 && s.total_twist() >= PI / alpha - 1e-12);
    }

    #[test]
    fn clamping_reaches_the_floor(h in 0.01..2.0f64, floor in 0.01..4.0f64, tilt in 0.0..1.5f64) {
        let a = Vec3::new(1.0, 0.0, 0.0);
        let b = Vec3::new(0.0, tilt.cos(), tilt.sin());
        let mut c = crate::session::square_control("c", Role::Orange, Vec3::new(3.0, 1.0, -2.0), a, b, h);
        let before: ControlSection = c.clone();
        let changed = c.clamp_area(floor);
        prop_assert_eq!(changed, before.area() < floor);
        prop_assert!(c.area() >= floor - 1e-9 * floor);
        if changed {
            prop_assert!((c.area() - floor).abs() <= 1e-9 * floor);
        } else {
            prop_assert_eq!(c, before);
        }
    }
}
