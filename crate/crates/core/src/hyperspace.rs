//! Curves in ℝᵐ, their projections to 3D, and sweeps carried out in ℝᵐ
//! and viewed through a projection.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Schur};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::ClosedCurve;
use crate::error::{Error, Result};
use crate::geom::{Vec2, Vec3};
use crate::profiles::CurvilinearPolygon;
use crate::schedules::DeformationSchedule;
use crate::sweep::{close_seam, has_rotational_symmetry, section_info, PreparedProfile, SculptureMesh, SeamClosure};

/// The four coordinate projections of a 4D curve.
pub const NAMED_PROJECTIONS: [&str; 4] = ["xyz", "yzw", "zwx", "wxy"];

#[derive(Debug, Clone, PartialEq)]
enum Rows {
    Axes([usize; 3]),
    General([DVector<f64>; 3]),
}

/// Linear map ℝᵐ → ℝ³ with orthonormal rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMap {
    source_dimension: usize,
    rows: Rows,
}

fn axis_index(c: char) -> Option<usize> {
    match c {
        'x' => Some(0),
        'y' => Some(1),
        'z' => Some(2),
        'w' => Some(3),
        _ => None,
    }
}

impl ProjectionMap {
    /// Coordinate selection such as `"yzw"`: output `k` is the input
    /// coordinate named by letter `k` (`x, y, z, w` are axes 0–3).
    pub fn axes(name: &str, source_dimension: usize) -> Result<Self> {
        let idx: Vec<usize> = name
            .chars()
            .map(|c| axis_index(c).ok_or_else(|| Error::InvalidParameter(format!("unknown axis `{c}` in `{name}`"))))
            .collect::<Result<_>>()?;
        let idx: [usize; 3] = idx
            .try_into()
            .map_err(|_| Error::InvalidParameter(format!("axis selection `{name}` must name three axes")))?;
        if idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2] {
            return Err(Error::InvalidParameter(format!("axis selection `{name}` repeats an axis")));
        }
        if let Some(&k) = idx.iter().find(|&&k| k >= source_dimension) {
            return Err(Error::DimensionMismatch { expected: k + 1, found: source_dimension });
        }
        Ok(Self { source_dimension, rows: Rows::Axes(idx) })
    }

    /// Three orthonormal rows of length `m`.
    pub fn general(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != 3 {
            return Err(Error::InvalidParameter(format!("projection needs 3 rows, got {}", rows.len())));
        }
        let m = rows[0].len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidParameter("projection rows differ in length".into()));
        }
        let v: Vec<DVector<f64>> = rows.iter().map(|r| DVector::from_column_slice(r)).collect();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                if (v[i].dot(&v[j]) - want).abs() > 1e-12 {
                    return Err(Error::InvalidParameter("projection rows must be orthonormal".into()));
                }
            }
        }
        Ok(Self { source_dimension: m, rows: Rows::General([v[0].clone(), v[1].clone(), v[2].clone()]) })
    }

    pub fn source_dimension(&self) -> usize {
        self.source_dimension
    }

    pub fn apply(&self, p: &DVector<f64>) -> Vec3 {
        match &self.rows {
            Rows::Axes([a, b, c]) => Vec3::new(p[*a], p[*b], p[*c]),
            Rows::General([a, b, c]) => Vec3::new(a.dot(p), b.dot(p), c.dot(p)),
        }
    }
}

/// The projected curve, evaluated pointwise.
pub fn project_curve(curve: &ClosedCurve, projection: &ProjectionMap) -> Result<ClosedCurve> {
    if curve.dimension() < 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: curve.dimension() });
    }
    if curve.dimension() != projection.source_dimension {
        return Err(Error::DimensionMismatch { expected: projection.source_dimension, found: curve.dimension() });
    }
    let c = Arc::new(curve.clone());
    let p = Arc::new(projection.clone());
    let (c2, p2) = (c.clone(), p.clone());
    let to_dvec = |v: Vec3| DVector::from_column_slice(v.as_slice());
    ClosedCurve::from_fn(
        &format!("{}-projected", curve.name()),
        3,
        curve.domain_end(),
        move |t| to_dvec(p.apply(&c.eval(t))),
        Some(move |t| match c2.tangent(t) {
            Ok(d) => to_dvec(p2.apply(&d)),
            Err(_) => DVector::zeros(3),
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplicityReport {
    pub min_distance: f64,
    /// Sample indices attaining it.
    pub pair: (usize, usize),
    pub pass: bool,
}

/// Smallest distance between samples more than `n/64` apart (circularly);
/// passes when it exceeds `clearance`.
pub fn projection_simplicity(curve: &ClosedCurve, n: usize, clearance: f64) -> Result<SimplicityReport> {
    if n < 256 {
        return Err(Error::BadResolution(format!("simplicity scan needs at least 256 samples, got {n}")));
    }
    let (d, i, j) = curve.min_nonadjacent_distance(n);
    Ok(SimplicityReport { min_distance: d, pair: (i, j), pass: d > clearance })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NdFrame {
    pub t: f64,
    pub position: DVector<f64>,
    pub tangent: DVector<f64>,
    /// `m − 1` orthonormal normals.
    pub normals: Vec<DVector<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NdFrameField {
    pub samples: Vec<NdFrame>,
    pub end: NdFrame,
    /// Transported end normals in the start basis, before correction.
    pub closure_residual: DMatrix<f64>,
}

/// Axis order for seeding: z, x, y, then w and the rest.
fn seed_order(m: usize) -> Vec<usize> {
    let mut order = vec![2, 0, 1];
    order.extend(3..m);
    order.retain(|&k| k < m);
    order
}

fn seed_normals(t: &DVector<f64>) -> Vec<DVector<f64>> {
    let m = t.len();
    let mut candidates = seed_order(m);
    candidates.sort_by(|&a, &b| t[a].abs().total_cmp(&t[b].abs()));
    let mut basis: Vec<DVector<f64>> = vec![t.clone()];
    for k in candidates {
        if basis.len() == m {
            break;
        }
        let mut e = DVector::zeros(m);
        e[k] = 1.0;
        for b in &basis {
            let c = b.dot(&e);
            e -= b * c;
        }
        let norm = e.norm();
        if norm > 1e-6 {
            basis.push(e / norm);
        }
    }
    basis.remove(0);
    basis
}

fn reflect(x: &DVector<f64>, v: &DVector<f64>, c: f64) -> DVector<f64> {
    x - v * (2.0 / c * v.dot(x))
}

fn orthonormalize(t: &DVector<f64>, vs: &mut [DVector<f64>]) {
    for i in 0..vs.len() {
        let mut v = vs[i].clone();
        v -= t * t.dot(&v);
        for w in &vs[..i] {
            let c = w.dot(&v);
            v -= w * c;
        }
        vs[i] = v.normalize();
    }
}

/// `q^p` for a rotation `q`, through its real Schur form.
fn rotation_power(q: &DMatrix<f64>, p: f64) -> DMatrix<f64> {
    let k = q.nrows();
    let (u, t) = Schur::new(q.clone()).unpack();
    let mut tp = DMatrix::<f64>::zeros(k, k);
    let mut negatives = Vec::new();
    let mut i = 0;
    let set_rotation = |tp: &mut DMatrix<f64>, a: usize, b: usize, angle: f64| {
        let (s, c) = (angle * p).sin_cos();
        tp[(a, a)] = c;
        tp[(a, b)] = -s;
        tp[(b, a)] = s;
        tp[(b, b)] = c;
    };
    while i < k {
        if i + 1 < k && t[(i + 1, i)].abs() > 1e-12 {
            let angle = ((t[(i + 1, i)] - t[(i, i + 1)]) / 2.0).atan2((t[(i, i)] + t[(i + 1, i + 1)]) / 2.0);
            set_rotation(&mut tp, i, i + 1, angle);
            i += 2;
        } else {
            if t[(i, i)] < 0.0 {
                negatives.push(i);
            } else {
                tp[(i, i)] = 1.0;
            }
            i += 1;
        }
    }
    for pair in negatives.chunks(2) {
        match *pair {
            [a, b] => {
                tp[(a, b)] = 0.0;
                tp[(b, a)] = 0.0;
                let (s, c) = (std::f64::consts::PI * p).sin_cos();
                tp[(a, a)] = c;
                tp[(a, b)] = -s;
                tp[(b, a)] = s;
                tp[(b, b)] = c;
            }
            [a] => tp[(a, a)] = -1.0,
            _ => unreachable!(),
        }
    }
    &u * tp * u.transpose()
}

/// Rotation-minimizing normal frames along a curve in ℝᵐ, `m ≥ 4`.
pub fn nd_frame_field(curve: &ClosedCurve, n: usize) -> Result<NdFrameField> {
    let m = curve.dimension();
    if m < 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: m });
    }
    nd_frames(curve, n)
}

fn nd_frames(curve: &ClosedCurve, n: usize) -> Result<NdFrameField> {
    if n < 16 {
        return Err(Error::BadResolution(format!("frame field needs at least 16 samples, got {n}")));
    }
    let a = curve.domain_end();
    let mut pos = Vec::with_capacity(n + 1);
    let mut tan = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = i as f64 * a / n as f64;
        pos.push(curve.eval(t));
        tan.push(curve.tangent(t)?.normalize());
    }
    let mut frames: Vec<Vec<DVector<f64>>> = Vec::with_capacity(n + 1);
    frames.push(seed_normals(&tan[0]));
    for i in 0..n {
        let v1 = &pos[i + 1] - &pos[i];
        let c1 = v1.norm_squared();
        let (mut carried, t_l) = if c1 > 0.0 {
            (frames[i].iter().map(|r| reflect(r, &v1, c1)).collect::<Vec<_>>(), reflect(&tan[i], &v1, c1))
        } else {
            (frames[i].clone(), tan[i].clone())
        };
        let v2 = &tan[i + 1] - t_l;
        let c2 = v2.norm_squared();
        if c2 > 1e-300 {
            carried = carried.iter().map(|r| reflect(r, &v2, c2)).collect();
        }
        orthonormalize(&tan[i + 1], &mut carried);
        frames.push(carried);
    }
    let k = frames[0].len();
    let q = DMatrix::from_fn(k, k, |r, c| frames[0][r].dot(&frames[n][c]));
    let mut out: Vec<NdFrame> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let corr = rotation_power(&q, -(i as f64) / n as f64);
        let mut normals: Vec<DVector<f64>> = (0..k)
            .map(|c| (0..k).fold(DVector::zeros(pos[0].len()), |acc, l| acc + &frames[i][l] * corr[(l, c)]))
            .collect();
        orthonormalize(&tan[i], &mut normals);
        out.push(NdFrame { t: i as f64 * a / n as f64, position: pos[i].clone(), tangent: tan[i].clone(), normals });
    }
    let mut end = out.pop().expect("n + 1 frames");
    end.t = a;
    Ok(NdFrameField { samples: out, end, closure_residual: q })
}

/// Sweeps `profile` in the first two normal directions of the ℝᵐ frame,
/// projects every vertex to 3D and stitches there.
pub fn sweep_nd_project(
    curve: &ClosedCurve,
    profile: &CurvilinearPolygon,
    schedule: &DeformationSchedule,
    projection: &ProjectionMap,
    n: usize,
    m: usize,
) -> Result<SculptureMesh> {
    let dim = curve.dimension();
    if dim < 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: dim });
    }
    if dim != projection.source_dimension() {
        return Err(Error::DimensionMismatch { expected: projection.source_dimension(), found: dim });
    }
    let a = curve.domain_end();
    if (schedule.domain_end() - a).abs() > 1e-12 * a {
        return Err(Error::BadSchedule("schedule and curve domains differ".into()));
    }
    schedule.validate().into_result().map_err(|e| match e {
        Error::BadSchedule(_) => e,
        other => Error::BadSchedule(other.to_string()),
    })?;
    let frames = nd_frames(curve, n)?;
    let prep = PreparedProfile::new(profile, m)?;

    let place = |f: &NdFrame| -> (Vec<Vec3>, Vec3) {
        let (s, c) = schedule.twist(f.t).sin_cos();
        let scale = schedule.scale(f.t);
        let turn = |p: &Vec2| Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y) * scale;
        let lift = |q: Vec2| &f.normals[0] * q.x + &f.normals[1] * q.y;
        let ring = prep.points.iter().map(|p| projection.apply(&(&f.position + lift(turn(p))))).collect();
        let off = projection.apply(&lift(turn(&-prep.centroid_offset)));
        (ring, off)
    };
    let placed: Vec<(Vec<Vec3>, Vec3)> = frames.samples.par_iter().map(place).collect();
    let (end_ring, end_off) = place(&frames.end);
    let (closure, seam, warning) =
        close_seam(schedule.mode(), &placed[0].0, &end_ring, schedule.total_twist(), || {
            has_rotational_symmetry(profile, schedule.total_twist())
        })?;
    let info = |f: &NdFrame, ring: &[Vec3], start: usize, off: Vec3| {
        section_info(f.t, projection.apply(&f.position), projection.apply(&f.tangent), ring, start, off)
    };
    let mut sections: Vec<_> = placed
        .iter()
        .zip(&frames.samples)
        .enumerate()
        .map(|(i, ((ring, off), f))| info(f, ring, i * m, *off))
        .collect();
    if closure == SeamClosure::Open {
        sections.push(info(&frames.end, &end_ring, n * m, end_off));
    }
    let rings = placed.into_iter().map(|(r, _)| r).collect();
    let (vertices, triangles) = SculptureMesh::stitch(rings, end_ring, closure);
    let mut mesh =
        SculptureMesh { vertices, triangles, sections, seam: Some(seam), warnings: warning.into_iter().collect() };
    if closure != SeamClosure::Open {
        mesh.orient_outward();
    }
    Ok(mesh)
}

/// Closed polyline preview of a 3D curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub closed: bool,
    pub points: Vec<[f64; 3]>,
}

pub fn wireframe(curve: &ClosedCurve, n: usize) -> Result<Polyline> {
    curve.require_dimension(3)?;
    if n < 2 {
        return Err(Error::BadResolution(format!("a wireframe needs at least 2 samples, got {n}")));
    }
    let a = curve.domain_end();
    let points = (0..n)
        .map(|i| {
            let p = curve.eval3(i as f64 * a / n as f64);
            [p.x, p.y, p.z]
        })
        .collect();
    Ok(Polyline { closed: true, points })
}
