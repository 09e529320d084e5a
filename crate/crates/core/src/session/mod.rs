//! Live sculpting sessions steered through control quadrilaterals.
//!
//! Red controls are fixed, the single yellow control is fixed and sets the
//! area floor, and orange controls follow the user. Everything between the
//! controls is filled in by periodic cubic splines.

pub mod protocol;

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::ClosedCurve;
use crate::error::{Error, Result};
use crate::geom::{area_centroid_2d, vector_area_3d, Vec2, Vec3};
use crate::profiles::CurvilinearPolygon;
use crate::spline::PeriodicSpline;
use crate::sweep::{section_info, SculptureMesh, SeamClosure, SweepWarning};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Red,
    Yellow,
    Orange,
}

/// One control quadrilateral: a center and four corners in space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    pub id: String,
    pub role: Role,
    pub centroid: [f64; 3],
    pub vertices: [[f64; 3]; 4],
}

fn v3(p: &[f64; 3]) -> Vec3 {
    Vec3::new(p[0], p[1], p[2])
}

impl ControlSection {
    pub fn corners(&self) -> [Vec3; 4] {
        self.vertices.map(|p| v3(&p))
    }

    /// Area of the quadrilateral projected onto its best-fit plane.
    pub fn area(&self) -> f64 {
        vector_area_3d(&self.corners()).norm()
    }

    /// Scales the corners about their mean so the area is at least `floor`;
    /// true when anything changed.
    pub fn clamp_area(&mut self, floor: f64) -> bool {
        let area = self.area();
        if area >= floor {
            return false;
        }
        let c = self.corners();
        let mean = c.iter().sum::<Vec3>() / 4.0;
        let f = (floor / area).sqrt();
        self.vertices = c.map(|p| {
            let q = mean + (p - mean) * f;
            [q.x, q.y, q.z]
        });
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionOptions {
    pub sections: usize,
    /// Points per ring; a multiple of 4 so every corner lies on the ring.
    pub ring: usize,
}

impl Default for SessionOptions {
    fn default() -> Self {
        Self { sections: 256, ring: 64 }
    }
}

impl SessionOptions {
    fn check(&self) -> Result<()> {
        if self.sections < 16 {
            return Err(Error::BadResolution(format!("need at least 16 sections, got {}", self.sections)));
        }
        if self.ring < 4 || !self.ring.is_multiple_of(4) {
            return Err(Error::BadResolution(format!("ring must be a positive multiple of 4, got {}", self.ring)));
        }
        Ok(())
    }
}

/// Checks roles and geometry; the floor is the yellow control's area.
pub fn check_controls(controls: &[ControlSection]) -> Result<f64> {
    if controls.len() < 3 {
        return Err(Error::BadControls(format!("a closed loop needs at least 3 controls, got {}", controls.len())));
    }
    let yellow: Vec<&ControlSection> = controls.iter().filter(|c| c.role == Role::Yellow).collect();
    if yellow.len() != 1 {
        return Err(Error::BadControls(format!("exactly one yellow control is required, got {}", yellow.len())));
    }
    for (i, c) in controls.iter().enumerate() {
        if controls[..i].iter().any(|d| d.id == c.id) {
            return Err(Error::BadControls(format!("duplicate control id `{}`", c.id)));
        }
        if c.centroid.iter().chain(c.vertices.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::BadControls(format!("control `{}` has non-finite coordinates", c.id)));
        }
    }
    let reach = controls.iter().map(|c| v3(&c.centroid).norm()).fold(0.0, f64::max);
    for (i, a) in controls.iter().enumerate() {
        for b in &controls[i + 1..] {
            if (v3(&a.centroid) - v3(&b.centroid)).norm() <= 1e-12 * (1.0 + reach) {
                return Err(Error::DegenerateControls(format!("controls `{}` and `{}` share a centroid", a.id, b.id)));
            }
        }
    }
    let floor = yellow[0].area();
    if !(floor > 0.0) {
        return Err(Error::DegenerateControls("the yellow control has no area".into()));
    }
    Ok(floor)
}

/// One interpolated section: a planar quadrilateral centered on the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionQuad {
    pub t: f64,
    pub center: Vec3,
    /// Orthonormal in-plane axes.
    pub u: Vec3,
    pub v: Vec3,
    /// Corners in `(u, v)` coordinates, area centroid at the origin,
    /// counterclockwise.
    pub corners: [Vec2; 4],
    pub area: f64,
    pub clamped: bool,
}

impl SectionQuad {
    pub fn profile(&self) -> Result<CurvilinearPolygon> {
        CurvilinearPolygon::with_straight_edges(self.corners.to_vec())
    }

    pub fn corners_3d(&self) -> [Vec3; 4] {
        self.corners.map(|p| self.center + self.u * p.x + self.v * p.y)
    }

    /// `m` points, `m/4` per edge, starting at corner 0.
    pub fn ring(&self, m: usize) -> Vec<Vec3> {
        let per = m / 4;
        (0..m)
            .map(|k| {
                let (e, s) = (k / per, (k % per) as f64 / per as f64);
                let p = self.corners[e] * (1.0 - s) + self.corners[(e + 1) % 4] * s;
                self.center + self.u * p.x + self.v * p.y
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Interpolation {
    /// Spline through the control centroids, on `[0, 2π)`.
    pub curve: ClosedCurve,
    /// Parameter of each control, in input order.
    pub knots: Vec<f64>,
    pub sections: Vec<SectionQuad>,
    pub floor: f64,
}

fn best_fit_section(t: f64, center: Vec3, offsets: [Vec3; 4], floor: f64) -> Result<SectionQuad> {
    let n = vector_area_3d(&offsets);
    let normal =
        n.try_normalize(0.0).ok_or_else(|| Error::DegenerateControls(format!("section at t = {t} collapses")))?;
    let lead = offsets[0] - normal * normal.dot(&offsets[0]);
    let u = lead
        .try_normalize(1e-300)
        .unwrap_or_else(|| normal.cross(&if normal.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() }).normalize());
    let v = normal.cross(&u);
    let flat = offsets.map(|d| Vec2::new(d.dot(&u), d.dot(&v)));
    let (area, c) = area_centroid_2d(&flat);
    let mut corners = flat.map(|p| p - c);
    let clamped = area < floor;
    let area = if clamped {
        let f = (floor / area).sqrt();
        corners = corners.map(|p| p * f);
        floor
    } else {
        area
    };
    Ok(SectionQuad { t, center, u, v, corners, area, clamped })
}

/// Splines the controls, taken in the given cyclic order at uniform
/// parameters, and builds `n_sections` sections at `t_i = 2πi/N`.
pub fn interpolate_controls(controls: &[ControlSection], n_sections: usize) -> Result<Interpolation> {
    let floor = check_controls(controls)?;
    let k = controls.len();
    let data: Vec<Vec<f64>> = controls
        .iter()
        .map(|c| {
            let mut row = c.centroid.to_vec();
            for p in &c.vertices {
                row.extend(p.iter().zip(&c.centroid).map(|(x, o)| x - o));
            }
            row
        })
        .collect();
    let spline = Arc::new(PeriodicSpline::uniform(TAU, &data)?);
    let (s1, s2) = (spline.clone(), spline.clone());
    let curve = ClosedCurve::from_fn(
        "controls",
        3,
        TAU,
        move |t| nalgebra::DVector::from_column_slice(&s1.eval(t)[..3]),
        Some(move |t| nalgebra::DVector::from_column_slice(&s2.derivative(t)[..3])),
    )?;
    let sections = (0..n_sections)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * TAU / n_sections as f64;
            let row = spline.eval(t);
            let center = Vec3::new(row[0], row[1], row[2]);
            let offsets = [0, 1, 2, 3].map(|j| Vec3::new(row[3 + 3 * j], row[4 + 3 * j], row[5 + 3 * j]));
            best_fit_section(t, center, offsets, floor)
        })
        .collect::<Result<Vec<_>>>()?;
    let knots = (0..k).map(|i| i as f64 * TAU / k as f64).collect();
    Ok(Interpolation { curve, knots, sections, floor })
}

/// Closed tube through the interpolated sections.
pub fn build_mesh(interp: &Interpolation, ring: usize) -> Result<SculptureMesh> {
    let rings: Vec<Vec<Vec3>> = interp.sections.par_iter().map(|s| s.ring(ring)).collect();
    let sections = interp
        .sections
        .iter()
        .zip(&rings)
        .enumerate()
        .map(|(i, (s, r))| {
            let tangent = interp.curve.tangent3(s.t)?;
            Ok(section_info(s.t, s.center, tangent, r, i * ring, Vec3::zeros()))
        })
        .collect::<Result<Vec<_>>>()?;
    let end = rings[0].clone();
    let (vertices, triangles) = SculptureMesh::stitch(rings, end, SeamClosure::Shift(0));
    let mut mesh = SculptureMesh { vertices, triangles, sections, seam: None, warnings: Vec::new() };
    mesh.orient_outward();
    Ok(mesh)
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    controls: Vec<ControlSection>,
    options: SessionOptions,
    floor: f64,
    revision: u64,
    mesh: Arc<SculptureMesh>,
}

/// Result of moving one orange control.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub clamped: bool,
    /// Area of the control after clamping.
    pub area: f64,
}

fn clamp_warning(c: &ControlSection) -> SweepWarning {
    SweepWarning::Clamped { control: c.id.clone(), area: c.area() }
}

impl Session {
    /// Orange controls under the floor are clamped up to it, one warning
    /// each.
    pub fn create(
        id: String,
        mut controls: Vec<ControlSection>,
        options: SessionOptions,
    ) -> Result<(Self, Vec<SweepWarning>)> {
        options.check()?;
        let floor = check_controls(&controls)?;
        let mut warnings = Vec::new();
        for c in controls.iter_mut().filter(|c| c.role == Role::Orange) {
            if c.clamp_area(floor) {
                warnings.push(clamp_warning(c));
            }
        }
        let mut s = Self { id, controls, options, floor, revision: 0, mesh: Arc::default() };
        s.regenerate()?;
        Ok((s, warnings))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn controls(&self) -> &[ControlSection] {
        &self.controls
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn mesh(&self) -> Arc<SculptureMesh> {
        self.mesh.clone()
    }

    pub fn interpolation(&self) -> Result<Interpolation> {
        interpolate_controls(&self.controls, self.options.sections)
    }

    /// Moves an orange control without regenerating. Nothing changes on
    /// error.
    pub fn apply(&mut self, control: &str, centroid: [f64; 3], vertices: [[f64; 3]; 4]) -> Result<Applied> {
        let i = self
            .controls
            .iter()
            .position(|c| c.id == control)
            .ok_or_else(|| Error::NotFound(format!("control `{control}` in session `{}`", self.id)))?;
        if self.controls[i].role != Role::Orange {
            return Err(Error::Immutable(format!("`{control}` ({:?})", self.controls[i].role)));
        }
        let mut next = self.controls.clone();
        next[i].centroid = centroid;
        next[i].vertices = vertices;
        let clamped = next[i].clamp_area(self.floor);
        check_controls(&next)?;
        let area = next[i].area();
        self.controls = next;
        Ok(Applied { clamped, area })
    }

    pub fn regenerate(&mut self) -> Result<Arc<SculptureMesh>> {
        let interp = interpolate_controls(&self.controls, self.options.sections)?;
        self.mesh = Arc::new(build_mesh(&interp, self.options.ring)?);
        self.revision += 1;
        Ok(self.mesh.clone())
    }

    /// `apply` then `regenerate`.
    pub fn update(
        &mut self,
        control: &str,
        centroid: [f64; 3],
        vertices: [[f64; 3]; 4],
    ) -> Result<(Applied, Arc<SculptureMesh>)> {
        let applied = self.apply(control, centroid, vertices)?;
        Ok((applied, self.regenerate()?))
    }
}

/// Sessions by id; each session is locked on its own, so different
/// sessions proceed in parallel.
#[derive(Debug, Default)]
pub struct SessionStore {
    next: AtomicU64,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create(
        &self,
        controls: Vec<ControlSection>,
        options: SessionOptions,
    ) -> Result<(String, Arc<SculptureMesh>, Vec<SweepWarning>)> {
        let id = format!("s{}", self.next.fetch_add(1, Ordering::Relaxed) + 1);
        let (session, warnings) = Session::create(id.clone(), controls, options)?;
        let mesh = session.mesh();
        self.sessions.lock().unwrap().insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok((id, mesh, warnings))
    }

    pub fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>> {
        self.sessions.lock().unwrap().get(id).cloned().ok_or_else(|| Error::NotFound(format!("session `{id}`")))
    }

    pub fn update(
        &self,
        id: &str,
        control: &str,
        centroid: [f64; 3],
        vertices: [[f64; 3]; 4],
    ) -> Result<(Applied, Arc<SculptureMesh>)> {
        self.get(id)?.lock().unwrap().update(control, centroid, vertices)
    }

    pub fn remove(&self, id: &str) -> bool {
        self.sessions.lock().unwrap().remove(id).is_some()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Four controls on a circle of radius 3 in the xy-plane, square sections
/// standing in the radial-vertical plane: red, red, yellow, orange.
pub fn demo_controls() -> Vec<ControlSection> {
    let roles = [Role::Red, Role::Orange, Role::Yellow, Role::Red];
    let sizes = [0.5, 0.6, 0.35, 0.5];
    (0..4)
        .map(|k| {
            let phi = k as f64 * TAU / 4.0;
            let c = Vec3::new(3.0 * phi.cos(), 3.0 * phi.sin(), 0.0);
            let radial = Vec3::new(phi.cos(), phi.sin(), 0.0);
            square_control(&format!("c{k}"), roles[k], c, radial, Vec3::z(), sizes[k])
        })
        .collect()
}

/// Square control of half-width `h` centered at `c` in the plane spanned
/// by `a` and `b`.
pub fn square_control(id: &str, role: Role, c: Vec3, a: Vec3, b: Vec3, h: f64) -> ControlSection {
    let corner = |x: f64, y: f64| {
        let p = c + a * (x * h) + b * (y * h);
        [p.x, p.y, p.z]
    };
    ControlSection {
        id: id.into(),
        role,
        centroid: [c.x, c.y, c.z],
        vertices: [corner(-1.0, -1.0), corner(1.0, -1.0), corner(1.0, 1.0), corner(-1.0, 1.0)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::{area_profile, centroid_coincidence, topology};

    fn opts() -> SessionOptions {
        SessionOptions { sections: 64, ring: 16 }
    }

    #[test]
    fn identical_squares_give_a_constant_tube() {
        let controls: Vec<ControlSection> = (0..4)
            .map(|k| {
                let phi = k as f64 * TAU / 4.0;
                let c = Vec3::new(2.0 * phi.cos(), 2.0 * phi.sin(), 0.0);
                let role = [Role::Yellow, Role::Red, Role::Orange, Role::Red][k];
                square_control(&k.to_string(), role, c, Vec3::new(phi.cos(), phi.sin(), 0.0), Vec3::z(), 0.3)
            })
            .collect();
        let interp = interpolate_controls(&controls, 256).unwrap();
        for s in &interp.sections {
            assert!((s.area - 0.36).abs() < 1e-6, "{}", s.area);
        }
        let mesh = build_mesh(&interp, 16).unwrap();
        let topo = topology(mesh.vertices.len(), &mesh.triangles);
        assert!(topo.watertight && topo.oriented);
        assert_eq!((topo.euler_characteristic, topo.genus), (0, Some(1)));
        assert!(centroid_coincidence(&mesh, &interp.curve).unwrap() < 1e-9);
    }

    #[test]
    fn role_rules() {
        let mut c = demo_controls();
        c[0].role = Role::Yellow;
        assert!(matches!(check_controls(&c), Err(Error::BadControls(_))));
        let c = demo_controls();
        assert!(matches!(check_controls(&c[..2]), Err(Error::BadControls(_))));
        let mut c = demo_controls();
        c[1].centroid = c[0].centroid;
        assert!(matches!(check_controls(&c), Err(Error::DegenerateControls(_))));
        let mut c = demo_controls();
        c[3].id = "c0".into();
        assert!(matches!(check_controls(&c), Err(Error::BadControls(_))));
    }

    #[test]
    fn clamp_and_immutability() {
        let (mut s, warnings) = Session::create("x".into(), demo_controls(), opts()).unwrap();
        assert!(warnings.is_empty());
        let floor = s.floor();
        let o = s.controls()[1].clone();
        let small =
            ControlSection { vertices: o.vertices.map(|p| [p[0] * 0.999, p[1] * 0.999, p[2] * 0.1]), ..o.clone() };
        let (applied, _) = s.update("c1", o.centroid, small.vertices).unwrap();
        assert!(applied.clamped);
        assert!((applied.area - floor).abs() <= 1e-9);
        assert!((s.controls()[1].area() - floor).abs() <= 1e-9);
        let before = s.controls().to_vec();
        assert!(matches!(s.update("c0", o.centroid, o.vertices), Err(Error::Immutable(_))));
        assert!(matches!(s.update("c2", o.centroid, o.vertices), Err(Error::Immutable(_))));
        assert!(matches!(s.update("c9", o.centroid, o.vertices), Err(Error::NotFound(_))));
        assert_eq!(s.controls(), &before[..]);
        let prof = area_profile(&s.mesh()).unwrap();
        assert!(prof.entries.iter().all(|e| e.1 >= floor - 1e-9));
    }

    #[test]
    fn translating_an_orange_moves_its_section() {
        let (mut s, _) = Session::create("x".into(), demo_controls(), opts()).unwrap();
        let before = s.mesh().sections[16].center_of_mass();
        let o = s.controls()[1].clone();
        let shift = |p: [f64; 3]| [p[0] + 0.1, p[1], p[2]];
        s.update("c1", shift(o.centroid), o.vertices.map(shift)).unwrap();
        let after = s.mesh().sections[16].center_of_mass();
        assert!((after - before - Vec3::new(0.1, 0.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn store_isolates_sessions() {
        let store = SessionStore::new();
        let (a, mesh_a, _) = store.create(demo_controls(), opts()).unwrap();
        let (b, _, _) = store.create(demo_controls(), opts()).unwrap();
        assert_ne!(a, b);
        let o = demo_controls()[1].clone();
        let grow = |p: [f64; 3]| [p[0], p[1], p[2] * 1.5];
        store.update(&b, "c1", o.centroid, o.vertices.map(grow)).unwrap();
        let now_a = store.get(&a).unwrap().lock().unwrap().mesh();
        assert_eq!(*now_a, *mesh_a);
        assert!(matches!(store.update("s99", "c1", o.centroid, o.vertices), Err(Error::NotFound(_))));
    }
}
