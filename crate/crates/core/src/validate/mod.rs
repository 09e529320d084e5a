//! Mesh audits: area profile, topology, self-intersection and centroid
//! coincidence.

mod bvh;
mod topology;
mod tri_tri;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bvh::{Aabb, Bvh};
pub use topology::{topology, ComponentTopology, TopologyReport};
pub use tri_tri::tri_tri_intersect;

use crate::curves::ClosedCurve;
use crate::error::{Error, Result};
use crate::extrema::{classify_circular, Extremum};
use crate::geom::{area_centroid_3d, vector_area_3d, Vec3};
use crate::sweep::SculptureMesh;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaProfile {
    /// `(t_i, area_i)` in section order.
    pub entries: Vec<(f64, f64)>,
    pub extrema: Vec<Extremum>,
    pub unique_min: bool,
    pub unique_max: bool,
}

impl AreaProfile {
    pub fn global_min_t(&self) -> Option<f64> {
        self.extrema.iter().find(|e| e.kind == crate::extrema::ExtremumKind::GlobalMin).map(|e| self.entries[e.index].0)
    }

    pub fn global_max_t(&self) -> Option<f64> {
        self.extrema.iter().find(|e| e.kind == crate::extrema::ExtremumKind::GlobalMax).map(|e| self.entries[e.index].0)
    }
}

fn ring(mesh: &SculptureMesh, i: usize) -> Result<&[Vec3]> {
    let s = &mesh.sections[i];
    mesh.vertices
        .get(s.ring_start..s.ring_start + s.ring_len)
        .ok_or_else(|| Error::Format(format!("section {i} refers past the vertex buffer")))
}

/// Sections whose rings take part in the circular classification; an
/// unstitched end section duplicates the start and is left out.
fn circular_sections(mesh: &SculptureMesh) -> usize {
    let open = mesh.seam.as_ref().is_some_and(|s| !s.stitched);
    mesh.sections.len() - usize::from(open && mesh.sections.len() > 1)
}

/// Per-section ring areas recomputed from the vertex buffer, with circular
/// extremum classification.
pub fn area_profile(mesh: &SculptureMesh) -> Result<AreaProfile> {
    if mesh.sections.is_empty() {
        return Err(Error::NoSections);
    }
    let entries = (0..mesh.sections.len())
        .map(|i| Ok((mesh.sections[i].t, vector_area_3d(ring(mesh, i)?).norm())))
        .collect::<Result<Vec<_>>>()?;
    let k = circular_sections(mesh);
    let areas: Vec<f64> = entries[..k].iter().map(|e| e.1).collect();
    let ext = classify_circular(&areas);
    Ok(AreaProfile { entries, extrema: ext.items, unique_min: ext.unique_min, unique_max: ext.unique_max })
}

fn deviation(mesh: &SculptureMesh, target: impl Fn(usize) -> Vec3) -> Result<f64> {
    if mesh.sections.is_empty() {
        return Err(Error::NoSections);
    }
    let mut worst: f64 = 0.0;
    for i in 0..mesh.sections.len() {
        let (_, c) = area_centroid_3d(ring(mesh, i)?);
        worst = worst.max((c + mesh.sections[i].mass_offset - target(i)).norm());
    }
    Ok(worst)
}

/// Largest distance between a section's recomputed center of mass and the
/// curve point it belongs to.
pub fn centroid_coincidence(mesh: &SculptureMesh, curve: &ClosedCurve) -> Result<f64> {
    deviation(mesh, |i| curve.eval3(mesh.sections[i].t))
}

/// As [`centroid_coincidence`], against the curve points recorded at
/// generation time.
pub fn centroid_coincidence_recorded(mesh: &SculptureMesh) -> Result<f64> {
    deviation(mesh, |i| mesh.sections[i].position)
}

fn triangle(mesh: &SculptureMesh, i: usize) -> [Vec3; 3] {
    mesh.triangles[i].map(|v| mesh.vertices[v as usize])
}

fn share_vertex(a: &[u32; 3], b: &[u32; 3]) -> bool {
    a.iter().any(|v| b.contains(v))
}

fn padding(mesh: &SculptureMesh) -> f64 {
    let scale = mesh.vertices.iter().map(|p| p.amax()).fold(0.0, f64::max);
    1e-9 * (1.0 + scale)
}

/// Pairs `(i, j)`, `i < j`, of triangles that overlap without sharing a
/// vertex, sorted.
pub fn self_intersect(mesh: &SculptureMesh) -> Vec<(usize, usize)> {
    let pad = padding(mesh);
    let boxes: Vec<Aabb> = (0..mesh.triangles.len()).map(|i| Aabb::of_points(&triangle(mesh, i), pad)).collect();
    let bvh = Bvh::build(boxes.clone());
    let mut pairs: Vec<(usize, usize)> = (0..mesh.triangles.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut cand = Vec::new();
            bvh.query(&boxes[i], &mut cand);
            let ti = triangle(mesh, i);
            cand.into_iter()
                .map(|j| j as usize)
                .filter(move |&j| {
                    j > i
                        && !share_vertex(&mesh.triangles[i], &mesh.triangles[j])
                        && tri_tri_intersect(&ti, &triangle(mesh, j))
                })
                .map(move |j| (i, j))
        })
        .collect();
    pairs.sort_unstable();
    pairs
}

/// All-pairs reference for [`self_intersect`].
pub fn self_intersect_brute_force(mesh: &SculptureMesh) -> Vec<(usize, usize)> {
    let n = mesh.triangles.len();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let ti = triangle(mesh, i);
            (i + 1..n)
                .filter(move |&j| {
                    !share_vertex(&mesh.triangles[i], &mesh.triangles[j]) && tri_tri_intersect(&ti, &triangle(mesh, j))
                })
                .map(move |j| (i, j))
        })
        .collect();
    pairs.sort_unstable();
    pairs
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub self_intersection: bool,
    /// Centroid deviation allowed per unit of `1 + max |r|`.
    pub centroid_tolerance: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { self_intersection: true, centroid_tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub watertight: bool,
    pub euler_characteristic: i64,
    pub genus: Option<i64>,
    pub topology: TopologyReport,
    pub self_intersections: Vec<(usize, usize)>,
    pub area_profile: Option<AreaProfile>,
    pub centroid_max_deviation: Option<f64>,
    pub failures: Vec<String>,
    pub pass: bool,
}

/// Runs every applicable audit. Area and centroid checks need section
/// provenance; the centroid check uses `curve` when given and the recorded
/// curve points otherwise.
pub fn validate_mesh(mesh: &SculptureMesh, curve: Option<&ClosedCurve>, opts: &ValidateOptions) -> ValidationReport {
    let topo = topology(mesh.vertices.len(), &mesh.triangles);
    let mut failures = Vec::new();
    if !topo.watertight {
        failures.push(format!(
            "not watertight: {} boundary and {} non-manifold edges",
            topo.boundary_edges, topo.nonmanifold_edges
        ));
    }
    if !topo.oriented {
        failures.push("triangle orientation is inconsistent".to_string());
    }
    let self_intersections = if opts.self_intersection { self_intersect(mesh) } else { Vec::new() };
    if !self_intersections.is_empty() {
        failures.push(format!("{} self-intersecting triangle pairs", self_intersections.len()));
    }
    let (mut area, mut centroid) = (None, None);
    if !mesh.sections.is_empty() {
        match area_profile(mesh) {
            Ok(p) => {
                if !p.unique_min {
                    failures.push("section area has no unique global minimum".to_string());
                }
                if !p.unique_max {
                    failures.push("section area has no unique global maximum".to_string());
                }
                area = Some(p);
            }
            Err(e) => failures.push(e.to_string()),
        }
        let dev = match curve {
            Some(c) => centroid_coincidence(mesh, c),
            None => centroid_coincidence_recorded(mesh),
        };
        match dev {
            Ok(d) => {
                let reach = mesh.sections.iter().map(|s| s.position.norm()).fold(0.0, f64::max);
                if d > opts.centroid_tolerance * (1.0 + reach) {
                    failures.push(format!("section centroids stray {d:e} from the curve"));
                }
                centroid = Some(d);
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    ValidationReport {
        watertight: topo.watertight,
        euler_characteristic: topo.euler_characteristic,
        genus: topo.genus,
        topology: topo,
        self_intersections,
        area_profile: area,
        centroid_max_deviation: centroid,
        pass: failures.is_empty(),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;
    use crate::profiles::CurvilinearPolygon;
    use crate::schedules::DeformationSchedule;
    use crate::sweep::{generate, SweepOptions};
    use std::f64::consts::{PI, TAU};

    fn torus(radius: f64, sections: usize, ring: usize) -> SculptureMesh {
        let curve = ClosedCurve::circle(Vec3::zeros(), 1.0).unwrap();
        let profile = CurvilinearPolygon::regular_polygon(4, radius, 0.0).unwrap();
        let schedule = DeformationSchedule::constant(TAU, 1.0).unwrap();
        let opts = SweepOptions { sections, ring, require_valid_schedule: false, ..Default::default() };
        generate(&curve, &profile, &schedule, &opts).unwrap()
    }

    #[test]
    fn thin_torus_is_clean() {
        let mesh = torus(0.3, 64, 16);
        let r = validate_mesh(&mesh, None, &ValidateOptions::default());
        assert!(r.watertight);
        assert_eq!(r.euler_characteristic, 0);
        assert_eq!(r.genus, Some(1));
        assert!(r.self_intersections.is_empty());
        // constant scale: no unique extremum
        assert!(!r.area_profile.as_ref().unwrap().unique_min);
        assert!(!r.pass);
    }

    #[test]
    fn thick_torus_collides() {
        let mesh = torus(1.5, 32, 16);
        let bvh = self_intersect(&mesh);
        assert!(!bvh.is_empty());
        assert_eq!(bvh, self_intersect_brute_force(&mesh));
    }

    #[test]
    fn centroid_audit_detects_offsets() {
        let curve = ClosedCurve::circle(Vec3::zeros(), 1.0).unwrap();
        let mesh = torus(0.3, 64, 16);
        assert!(centroid_coincidence(&mesh, &curve).unwrap() < 1e-12);
        let up = mesh.translated(Vec3::new(0.0, 0.0, 1.0));
        assert!((centroid_coincidence(&up, &curve).unwrap() - 1.0).abs() < 1e-9);
        let mut nudged = mesh.clone();
        let s = &nudged.sections[5];
        for v in &mut nudged.vertices[s.ring_start..s.ring_start + s.ring_len] {
            *v += Vec3::new(0.0, 0.25, 0.0);
        }
        assert!((centroid_coincidence(&nudged, &curve).unwrap() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn simple_sculpture_area_profile() {
        let curve = ClosedCurve::circle(Vec3::zeros(), 1.0).unwrap();
        let profile = CurvilinearPolygon::with_straight_edges(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.2, 0.0),
            Vec2::new(0.2, 0.2),
            Vec2::new(0.0, 0.2),
        ])
        .unwrap();
        let schedule = DeformationSchedule::preset_simple(TAU, PI, 2.0).unwrap();
        let mesh =
            generate(&curve, &profile, &schedule, &SweepOptions { sections: 128, ring: 16, ..Default::default() })
                .unwrap();
        let p = area_profile(&mesh).unwrap();
        assert_eq!(p.extrema.len(), 2);
        assert!((p.global_min_t().unwrap() - PI).abs() < 1e-12);
        assert_eq!(p.global_max_t(), Some(0.0));
        let r = validate_mesh(&mesh, Some(&curve), &ValidateOptions::default());
        assert!(r.pass, "{:?}", r.failures);
    }

    #[test]
    fn missing_provenance() {
        let mesh = SculptureMesh { sections: Vec::new(), ..torus(0.3, 16, 8) };
        assert_eq!(area_profile(&mesh), Err(Error::NoSections));
    }
}
