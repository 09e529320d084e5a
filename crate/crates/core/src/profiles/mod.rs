//! Curvilinear polygon cross-sections.
//!
//! A profile is a planar loop of `n ≥ 3` vertices joined by cubic Bézier
//! edges (a straight edge has its two interior controls on the chord). Area
//! and uniform-density centroids are Green's-theorem line integrals,
//! evaluated exactly with Gauss–Legendre quadrature on each edge. A
//! non-uniform density is integrated with the midpoint rule on a grid over
//! the bounding box, masked by the sampled boundary.

mod density;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

pub use density::DensityExpr;

use crate::error::{Error, Result};
use crate::geom::{is_simple_loop, rotate_2d, Vec2};

pub const DEFAULT_BOUNDARY_RESOLUTION: usize = 64;
pub const DEFAULT_GRID_RESOLUTION: usize = 256;

/// Gauss–Legendre nodes and weights on `[0, 1]`, exact to degree 9.
const GL5: [(f64, f64); 5] = [
    (0.046_910_077_030_668_004, 0.118_463_442_528_094_54),
    (0.230_765_344_947_158_45, 0.239_314_335_249_683_23),
    (0.5, 0.284_444_444_444_444_44),
    (0.769_234_655_052_841_6, 0.239_314_335_249_683_23),
    (0.953_089_922_969_332, 0.118_463_442_528_094_54),
];

/// Mass density over the profile.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Uniform,
    /// `expr` is written in the coordinates the profile had when the density
    /// was attached; `to_source` maps current coordinates back to those.
    Field {
        expr: DensityExpr,
        to_source: Matrix2<f64>,
        offset: Vec2,
    },
}

impl Density {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim() == "uniform" {
            return Ok(Density::Uniform);
        }
        Ok(Density::Field { expr: DensityExpr::parse(text)?, to_source: Matrix2::identity(), offset: Vec2::zeros() })
    }

    pub fn eval(&self, p: Vec2) -> f64 {
        match self {
            Density::Uniform => 1.0,
            Density::Field { expr, to_source, offset } => {
                let q = to_source * p + offset;
                expr.eval(q.x, q.y)
            }
        }
    }

    /// Source text as accepted by [`Density::parse`].
    pub fn source(&self) -> &str {
        match self {
            Density::Uniform => "uniform",
            Density::Field { expr, .. } => expr.source(),
        }
    }

    /// Re-expresses the density after the profile moved by `p ↦ m·p + d`.
    fn moved(&self, m: Matrix2<f64>, d: Vec2) -> Self {
        match self {
            Density::Uniform => Density::Uniform,
            Density::Field { expr, to_source, offset } => {
                let inv = m.try_inverse().expect("profile transforms are invertible");
                Density::Field { expr: expr.clone(), to_source: to_source * inv, offset: offset - to_source * inv * d }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassProperties {
    pub mass: f64,
    pub centroid: Vec2,
}

/// Planar curvilinear polygon with cubic Bézier edges, counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvilinearPolygon {
    vertices: Vec<Vec2>,
    controls: Vec<[Vec2; 2]>,
    density: Density,
    boundary_resolution: usize,
    grid_resolution: usize,
}

fn bezier(p0: Vec2, p1: Vec2, p2: Vec2, p3: Vec2, u: f64) -> Vec2 {
    let v = 1.0 - u;
    p0 * (v * v * v) + p1 * (3.0 * u * v * v) + p2 * (3.0 * u * u * v) + p3 * (u * u * u)
}

fn bezier_derivative(p0: Vec2, p1: Vec2, p2: Vec2, p3: Vec2, u: f64) -> Vec2 {
    let v = 1.0 - u;
    (p1 - p0) * (3.0 * v * v) + (p2 - p1) * (6.0 * u * v) + (p3 - p2) * (3.0 * u * u)
}

fn chord_controls(a: Vec2, b: Vec2) -> [Vec2; 2] {
    [a + (b - a) / 3.0, a + (b - a) * (2.0 / 3.0)]
}

impl CurvilinearPolygon {
    /// `controls[i]` holds the interior control points of the edge from
    /// vertex `i` to vertex `i + 1`. Clockwise input is reversed.
    pub fn new(vertices: Vec<Vec2>, controls: Vec<[Vec2; 2]>, density: Density) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidParameter("a curvilinear polygon needs at least 3 vertices".into()));
        }
        if controls.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{n} vertices need {n} control pairs, got {}",
                controls.len()
            )));
        }
        if vertices.iter().chain(controls.iter().flatten()).any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coordinates".into()));
        }
        let mut poly = Self {
            vertices,
            controls,
            density,
            boundary_resolution: DEFAULT_BOUNDARY_RESOLUTION,
            grid_resolution: DEFAULT_GRID_RESOLUTION,
        };
        if poly.area_signed() < 0.0 {
            poly.reverse();
        }
        if !poly.is_simple() || poly.area_signed() <= 0.0 {
            return Err(Error::NotSimple);
        }
        Ok(poly)
    }

    pub fn with_straight_edges(vertices: Vec<Vec2>) -> Result<Self> {
        let n = vertices.len();
        let controls = (0..n).map(|i| chord_controls(vertices[i], vertices[(i + 1) % n])).collect();
        Self::new(vertices, controls, Density::Uniform)
    }

    pub fn with_density(mut self, density: Density) -> Self {
        self.density = density;
        self
    }

    pub fn with_boundary_resolution(mut self, per_edge: usize) -> Result<Self> {
        if per_edge < 2 {
            return Err(Error::BadResolution("boundary resolution must be at least 2".into()));
        }
        self.boundary_resolution = per_edge;
        if !self.is_simple() {
            return Err(Error::NotSimple);
        }
        Ok(self)
    }

    pub fn with_grid_resolution(mut self, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::BadResolution("grid resolution must be positive".into()));
        }
        self.grid_resolution = cells;
        Ok(self)
    }

    fn reverse(&mut self) {
        let n = self.vertices.len();
        let verts: Vec<Vec2> = (0..n).map(|j| self.vertices[(n - j) % n]).collect();
        let ctrls: Vec<[Vec2; 2]> = (0..n)
            .map(|j| {
                let [c1, c2] = self.controls[(2 * n - j - 1) % n];
                [c2, c1]
            })
            .collect();
        self.vertices = verts;
        self.controls = ctrls;
    }

    pub fn n_edges(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn controls(&self) -> &[[Vec2; 2]] {
        &self.controls
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn boundary_resolution(&self) -> usize {
        self.boundary_resolution
    }

    fn edge(&self, i: usize) -> (Vec2, Vec2, Vec2, Vec2) {
        let n = self.vertices.len();
        let [c1, c2] = self.controls[i];
        (self.vertices[i], c1, c2, self.vertices[(i + 1) % n])
    }

    pub fn edge_point(&self, i: usize, u: f64) -> Vec2 {
        let (p0, p1, p2, p3) = self.edge(i);
        bezier(p0, p1, p2, p3, u)
    }

    /// Point at global boundary parameter `s ∈ [0, n)`; edge `⌊s⌋`.
    pub fn boundary_point(&self, s: f64) -> Vec2 {
        let n = self.n_edges();
        let s = s.rem_euclid(n as f64);
        let e = (s.floor() as usize).min(n - 1);
        self.edge_point(e, s - e as f64)
    }

    /// Boundary sampled with `per_edge` points per edge, vertices included.
    pub fn boundary(&self, per_edge: usize) -> Vec<Vec2> {
        let mut pts = Vec::with_capacity(per_edge * self.n_edges());
        for e in 0..self.n_edges() {
            for k in 0..per_edge {
                pts.push(self.edge_point(e, k as f64 / per_edge as f64));
            }
        }
        pts
    }

    /// `m` boundary points at uniform global parameter `k·n/m`. When `m` is a
    /// multiple of the edge count the vertices are among them.
    pub fn ring(&self, m: usize) -> Vec<Vec2> {
        let n = self.n_edges() as f64;
        (0..m).map(|k| self.boundary_point(k as f64 * n / m as f64)).collect()
    }

    pub fn is_simple(&self) -> bool {
        is_simple_loop(&self.boundary(self.boundary_resolution))
    }

    /// Line integral of `f(p) · (dp)` style integrands over every edge.
    fn boundary_integral<F: Fn(Vec2, Vec2) -> f64>(&self, f: F) -> f64 {
        let mut acc = 0.0;
        for e in 0..self.n_edges() {
            let (p0, p1, p2, p3) = self.edge(e);
            for &(u, w) in &GL5 {
                acc += w * f(bezier(p0, p1, p2, p3, u), bezier_derivative(p0, p1, p2, p3, u));
            }
        }
        acc
    }

    fn area_signed(&self) -> f64 {
        let o = self.vertices[0];
        0.5 * self.boundary_integral(|p, d| {
            let q = p - o;
            q.x * d.y - q.y * d.x
        })
    }

    /// Enclosed area, `½∮(x dy − y dx)`.
    pub fn area(&self) -> f64 {
        self.area_signed()
    }

    /// Exact area centroid from the first moments `∮x²/2 dy`, `−∮y²/2 dx`.
    pub fn area_centroid(&self) -> Vec2 {
        let o = self.vertices.iter().sum::<Vec2>() / self.n_edges() as f64;
        let area = self.area_signed();
        let mx = self.boundary_integral(|p, d| 0.5 * (p.x - o.x).powi(2) * d.y);
        let my = -self.boundary_integral(|p, d| 0.5 * (p.y - o.y).powi(2) * d.x);
        o + Vec2::new(mx, my) / area
    }

    /// Mass `∬ρ dA` and center of mass.
    pub fn mass_properties(&self) -> Result<MassProperties> {
        match self.density {
            Density::Uniform => {
                let mass = self.area_signed();
                if !(mass > 0.0) {
                    return Err(Error::DegenerateRegion);
                }
                Ok(MassProperties { mass, centroid: self.area_centroid() })
            }
            Density::Field { .. } => self.grid_mass_properties(),
        }
    }

    pub fn mass(&self) -> Result<f64> {
        Ok(self.mass_properties()?.mass)
    }

    pub fn centroid(&self) -> Result<Vec2> {
        Ok(self.mass_properties()?.centroid)
    }

    /// Grid integration in the profile's own frame (origin at the area
    /// centroid, first axis toward vertex 0), so the result moves rigidly
    /// with the profile. Rows are taken at their midlines; along each row
    /// the inside intervals of the sampled boundary are cut into cell-wide
    /// pieces and integrated with two-point Gauss–Legendre.
    pub fn grid_mass_properties(&self) -> Result<MassProperties> {
        let c = self.area_centroid();
        let e1 = (self.vertices[0] - c).try_normalize(0.0).unwrap_or_else(Vec2::x);
        let e2 = Vec2::new(-e1.y, e1.x);
        let to_world = |x: f64, y: f64| c + e1 * x + e2 * y;
        let pts: Vec<Vec2> = self
            .boundary(self.boundary_resolution)
            .iter()
            .map(|p| Vec2::new((p - c).dot(&e1), (p - c).dot(&e2)))
            .collect();
        let lo = pts.iter().fold(Vec2::repeat(f64::INFINITY), |a, p| a.inf(p));
        let hi = pts.iter().fold(Vec2::repeat(f64::NEG_INFINITY), |a, p| a.sup(p));
        let g = self.grid_resolution;
        let cell = (hi - lo) / g as f64;
        if !(cell.x > 0.0 && cell.y > 0.0) {
            return Err(Error::DegenerateRegion);
        }
        let gauss = 0.5 / 3f64.sqrt();
        let n = pts.len();
        let (mut m, mut mx, mut my) = (0.0, 0.0, 0.0);
        let mut crossings = Vec::new();
        for j in 0..g {
            let y = lo.y + (j as f64 + 0.5) * cell.y;
            crossings.clear();
            for i in 0..n {
                let a = pts[i];
                let b = pts[(i + 1) % n];
                if (a.y <= y && y < b.y) || (b.y <= y && y < a.y) {
                    crossings.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
                }
            }
            crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for pair in crossings.chunks_exact(2) {
                let len = pair[1] - pair[0];
                let pieces = ((len / cell.x).ceil() as usize).max(1);
                let w = len / pieces as f64;
                for k in 0..pieces {
                    let mid = pair[0] + (k as f64 + 0.5) * w;
                    for x in [mid - gauss * w, mid + gauss * w] {
                        let p = to_world(x, y);
                        let rho = self.density.eval(p);
                        if !(rho >= 0.0) {
                            return Err(Error::InvalidParameter(format!(
                                "density must be non-negative, got {rho} at ({}, {})",
                                p.x, p.y
                            )));
                        }
                        let wr = rho * 0.5 * w;
                        m += wr;
                        mx += wr * x;
                        my += wr * y;
                    }
                }
            }
        }
        if !(m > 0.0) {
            return Err(Error::DegenerateRegion);
        }
        Ok(MassProperties { mass: m * cell.y, centroid: to_world(mx / m, my / m) })
    }

    /// Crossing point of the straight diagonals `AC` and `BD` of a
    /// quadrangle, the fallback center when no density is known.
    pub fn diagonal_point(&self) -> Result<Vec2> {
        if self.n_edges() != 4 {
            return Err(Error::InvalidParameter("diagonal point needs a quadrangle".into()));
        }
        diagonal_intersection(self.vertices[0], self.vertices[1], self.vertices[2], self.vertices[3])
    }

    fn map(&self, m: Matrix2<f64>, d: Vec2) -> Self {
        let f = |p: &Vec2| m * p + d;
        Self {
            vertices: self.vertices.iter().map(f).collect(),
            controls: self.controls.iter().map(|[a, b]| [f(a), f(b)]).collect(),
            density: self.density.moved(m, d),
            boundary_resolution: self.boundary_resolution,
            grid_resolution: self.grid_resolution,
        }
    }

    pub fn translated(&self, d: Vec2) -> Self {
        self.map(Matrix2::identity(), d)
    }

    /// Counterclockwise rotation about `about`.
    pub fn rotated(&self, angle: f64, about: Vec2) -> Self {
        let (s, c) = angle.sin_cos();
        let m = Matrix2::new(c, -s, s, c);
        self.map(m, about - m * about)
    }

    pub fn scaled(&self, factor: f64, about: Vec2) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::InvalidParameter("scale factor must be positive".into()));
        }
        let m = Matrix2::identity() * factor;
        Ok(self.map(m, about - m * about))
    }

    /// Regular `n`-gon inscribed in `radius` with its first vertex straight
    /// up. Positive `bulge` pulls each edge midpoint toward the center by that
    /// fraction of the apothem; negative values push it outward.
    pub fn regular_polygon(n: usize, radius: f64, bulge: f64) -> Result<Self> {
        if n < 3 || !(radius > 0.0) {
            return Err(Error::InvalidParameter("regular polygon needs n ≥ 3 and a positive radius".into()));
        }
        let verts: Vec<Vec2> = (0..n)
            .map(|k| {
                let a = std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::TAU / n as f64;
                Vec2::new(radius * a.cos(), radius * a.sin())
            })
            .collect();
        Self::pinched(verts, bulge)
    }

    /// Curvilinear triangle with concave edges, 3-fold symmetric for the
    /// default equilateral layout.
    pub fn hyperbolic_triangle(radius: f64, bulge: f64) -> Result<Self> {
        Self::regular_polygon(3, radius, bulge)
    }

    /// Curvilinear triangle on explicit vertices; edges bend toward the
    /// vertex centroid by `bulge` times the chord-midpoint distance to it.
    pub fn hyperbolic_triangle_on(vertices: [Vec2; 3], bulge: f64) -> Result<Self> {
        Self::pinched(vertices.to_vec(), bulge)
    }

    fn pinched(verts: Vec<Vec2>, bulge: f64) -> Result<Self> {
        let n = verts.len();
        let center = verts.iter().sum::<Vec2>() / n as f64;
        let controls = (0..n)
            .map(|i| {
                let (a, b) = (verts[i], verts[(i + 1) % n]);
                let mid = (a + b) / 2.0;
                // midpoint of a cubic moves by 3/4 of an equal control offset
                let shift = (center - mid) * (bulge * 4.0 / 3.0);
                let [c1, c2] = chord_controls(a, b);
                [c1 + shift, c2 + shift]
            })
            .collect();
        Self::new(verts, controls, Density::Uniform)
    }

    /// Quadrangle with straight (`bulge = 0`) or outward-bulged edges; the
    /// edge midpoint moves out by `bulge` times half the edge length.
    pub fn convex_quadrangle(vertices: [Vec2; 4], bulge: f64) -> Result<Self> {
        let mut verts = vertices.to_vec();
        if crate::geom::signed_area_2d(&verts) < 0.0 {
            verts.reverse();
        }
        let controls = (0..4)
            .map(|i| {
                let (a, b) = (verts[i], verts[(i + 1) % 4]);
                let d = b - a;
                let outward = Vec2::new(d.y, -d.x).normalize();
                let shift = outward * (bulge * d.norm() / 2.0 * 4.0 / 3.0);
                let [c1, c2] = chord_controls(a, b);
                [c1 + shift, c2 + shift]
            })
            .collect();
        Self::new(verts, controls, Density::Uniform)
    }

    /// Circle of `radius` with four arcs shaved off. Shave `k` is centered at
    /// `angles[k]`; neighboring shaves meet halfway between their centers,
    /// which become the quadrangle's vertices on the circle. Each shaved edge
    /// is a cubic tangent to the circle at both ends with its midpoint pulled
    /// in to `radius − depths[k]`.
    pub fn shave_circle(radius: f64, depths: [f64; 4], angles: [f64; 4]) -> Result<Self> {
        use std::f64::consts::TAU;
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter("shave radius must be positive".into()));
        }
        if depths.iter().any(|&d| !(d >= 0.0 && d < radius)) {
            return Err(Error::InvalidParameter("shave depths must lie in [0, radius)".into()));
        }
        if angles.iter().any(|&a| !(0.0..TAU).contains(&a)) || angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("shave angles must increase strictly within [0, 2π)".into()));
        }
        let on_circle = |phi: f64| Vec2::new(radius * phi.cos(), radius * phi.sin());
        let ccw_tangent = |phi: f64| Vec2::new(-phi.sin(), phi.cos());
        let boundary_angle = |k: usize| {
            // between shave k-1 and shave k
            if k == 0 {
                (angles[3] - TAU + angles[0]) / 2.0
            } else {
                (angles[k - 1] + angles[k]) / 2.0
            }
        };
        let phis: Vec<f64> = (0..4).map(boundary_angle).collect();
        let verts: Vec<Vec2> = phis.iter().map(|&p| on_circle(p)).collect();
        let mut controls = Vec::with_capacity(4);
        for k in 0..4 {
            let (phi0, phi1) = (phis[k], if k == 3 { phis[0] + TAU } else { phis[k + 1] });
            let (p0, p3) = (on_circle(phi0), on_circle(phi1));
            let t0 = ccw_tangent(phi0);
            let t3 = -ccw_tangent(phi1);
            let target = Vec2::new(angles[k].cos(), angles[k].sin()) * (radius - depths[k]);
            let rhs = (target - (p0 + p3) / 2.0) * (8.0 / 3.0);
            let m = Matrix2::from_columns(&[t0, t3]);
            let (lam, mu) = match m.try_inverse() {
                Some(inv) if m.determinant().abs() > 1e-9 => {
                    let x = inv * rhs;
                    (x.x, x.y)
                }
                _ => {
                    let s = t0 + t3;
                    let l = rhs.dot(&s) / s.norm_squared();
                    (l, l)
                }
            };
            controls.push([p0 + t0 * lam, p3 + t3 * mu]);
        }
        Self::new(verts, controls, Density::Uniform).map_err(|e| match e {
            Error::NotSimple => Error::OverlappingShaves,
            other => other,
        })
    }
}

/// Intersection of segments `AC` and `BD`, strictly inside both.
pub fn diagonal_intersection(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> Result<Vec2> {
    let r = c - a;
    let s = d - b;
    let denom = r.x * s.y - r.y * s.x;
    let scale = r.norm() * s.norm();
    if scale == 0.0 || denom.abs() <= 1e-14 * scale {
        return Err(Error::NoDiagonalIntersection);
    }
    let q = b - a;
    let u = (q.x * s.y - q.y * s.x) / denom;
    let v = (q.x * r.y - q.y * r.x) / denom;
    const EPS: f64 = 1e-12;
    if !(u > EPS && u < 1.0 - EPS && v > EPS && v < 1.0 - EPS) {
        return Err(Error::NoDiagonalIntersection);
    }
    Ok(a + r * u)
}

/// Parameters for the named profile presets; unused fields must be absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bulge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depths: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<[f64; 4]>,
}

/// Named presets: `hyperbolic_triangle`, `convex_quadrangle`,
/// `shaved_circle` and `regular_polygon`.
pub fn preset_profile(name: &str, params: &PresetParams) -> Result<CurvilinearPolygon> {
    let radius = params.radius.unwrap_or(1.0);
    let bulge = params.bulge.unwrap_or(0.0);
    let verts = params.vertices.as_ref().map(|v| v.iter().map(|p| Vec2::new(p[0], p[1])).collect::<Vec<_>>());
    match name {
        "hyperbolic_triangle" => match verts {
            Some(v) => {
                let v: [Vec2; 3] = v
                    .try_into()
                    .map_err(|_| Error::InvalidParameter("hyperbolic_triangle takes exactly 3 vertices".into()))?;
                CurvilinearPolygon::hyperbolic_triangle_on(v, bulge)
            }
            None => CurvilinearPolygon::hyperbolic_triangle(radius, bulge),
        },
        "convex_quadrangle" => {
            let v = verts.unwrap_or_else(|| {
                vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)]
            });
            let v: [Vec2; 4] = v
                .try_into()
                .map_err(|_| Error::InvalidParameter("convex_quadrangle takes exactly 4 vertices".into()))?;
            CurvilinearPolygon::convex_quadrangle(v, bulge)
        }
        "shaved_circle" => {
            use std::f64::consts::FRAC_PI_2;
            let depths = params.depths.unwrap_or([0.3 * radius; 4]);
            let angles = params.angles.unwrap_or([0.0, FRAC_PI_2, 2.0 * FRAC_PI_2, 3.0 * FRAC_PI_2]);
            CurvilinearPolygon::shave_circle(radius, depths, angles)
        }
        "regular_polygon" => CurvilinearPolygon::regular_polygon(params.sides.unwrap_or(4), radius, bulge),
        other => Err(Error::NotFound(format!("profile preset `{other}`"))),
    }
}

/// Rotates every point about the origin; used for in-plane twisting.
pub fn twist_points(points: &[Vec2], angle: f64) -> Vec<Vec2> {
    points.iter().map(|p| rotate_2d(*p, angle)).collect()
}
