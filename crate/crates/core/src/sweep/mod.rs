//! Sweeping profiles along closed curves.
//!
//! Section `i` sits at `t_i = i·a/N`: the profile ring is centered on its
//! center of mass, scaled by `s(t_i)`, turned by `θ(t_i)` and laid into the
//! normal plane spanned by the rotation-minimizing frame. Rings are joined
//! quad by quad; the ring computed at `t = a` decides how the last ring
//! closes onto the first.

mod compose;
mod frame;
mod mesh;

use std::f64::consts::TAU;

use rayon::prelude::*;

pub use compose::{compose_tangential, CompositeSculpture, Contact};
pub use frame::{double_reflect, frame_field, seed_normal, Frame, FrameField};
pub use mesh::{SculptureMesh, SeamClosure, SeamInfo, SectionInfo, SweepWarning};

use crate::curves::ClosedCurve;
use crate::error::{Error, Result};
use crate::geom::{area_centroid_2d, area_centroid_3d, rotate_2d, vector_area_3d, Vec2, Vec3};
use crate::profiles::{CurvilinearPolygon, Density};
use crate::schedules::{DeformationSchedule, ScheduleMode};

/// Largest end-to-start ring distance accepted as closed.
pub const SEAM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub sections: usize,
    /// Total points per ring.
    pub ring: usize,
    pub check_self_intersection: bool,
    /// Refuse schedules that fail validation in their own mode.
    pub require_valid_schedule: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { sections: 512, ring: 64, check_self_intersection: false, require_valid_schedule: true }
    }
}

/// Profile ring centered on its center of mass.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedProfile {
    pub points: Vec<Vec2>,
    /// Ring area centroid minus center of mass, in profile coordinates.
    pub centroid_offset: Vec2,
    pub area: f64,
}

impl PreparedProfile {
    pub fn new(profile: &CurvilinearPolygon, m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::BadResolution(format!("ring needs at least 3 points, got {m}")));
        }
        let ring = profile.ring(m);
        let (area, ring_centroid) = area_centroid_2d(&ring);
        if !(area > 0.0) {
            return Err(Error::DegenerateRegion);
        }
        let center = match profile.density() {
            Density::Uniform => ring_centroid,
            Density::Field { .. } => profile.centroid()? - profile.area_centroid() + ring_centroid,
        };
        Ok(Self { points: ring.iter().map(|p| p - center).collect(), centroid_offset: ring_centroid - center, area })
    }

    /// Ring in space plus the mass offset (center of mass minus ring area
    /// centroid) in space.
    pub fn place(&self, frame: &Frame, scale: f64, twist: f64) -> (Vec<Vec3>, Vec3) {
        let (s, c) = twist.sin_cos();
        let turn = |p: &Vec2| Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y) * scale;
        let ring = self.points.iter().map(|p| {
            let q = turn(p);
            frame.map(q.x, q.y)
        });
        let off = turn(&-self.centroid_offset);
        (ring.collect(), frame.u * off.x + frame.v * off.y)
    }
}

/// Places one profile copy: recentered, scaled, turned, mapped by `(u, v)`.
pub fn place_section(
    profile: &CurvilinearPolygon,
    m: usize,
    frame: &Frame,
    scale: f64,
    twist: f64,
) -> Result<Vec<Vec3>> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter("section scale must be positive".into()));
    }
    Ok(PreparedProfile::new(profile, m)?.place(frame, scale, twist).0)
}

pub(crate) fn section_info(
    t: f64,
    position: Vec3,
    tangent: Vec3,
    ring: &[Vec3],
    start: usize,
    mass_offset: Vec3,
) -> SectionInfo {
    let (area, centroid) = area_centroid_3d(ring);
    SectionInfo { t, ring_start: start, ring_len: ring.len(), area, centroid, position, tangent, mass_offset }
}

/// Whether turning `profile` by `angle` about its center of mass maps it
/// onto itself.
pub fn has_rotational_symmetry(profile: &CurvilinearPolygon, angle: f64) -> Result<bool> {
    let c = profile.centroid()?;
    let n = profile.n_edges();
    let verts = profile.vertices();
    let ctrls = profile.controls();
    let scale = verts.iter().map(|v| (v - c).norm()).fold(0.0, f64::max);
    let tol = 1e-9 * (1.0 + scale);
    let turn = |p: &Vec2| c + rotate_2d(p - c, angle);
    Ok((0..n).any(|k| {
        (0..n).all(|j| {
            let o = (j + k) % n;
            (turn(&verts[j]) - verts[o]).norm() <= tol
                && (turn(&ctrls[j][0]) - ctrls[o][0]).norm() <= tol
                && (turn(&ctrls[j][1]) - ctrls[o][1]).norm() <= tol
        })
    }))
}

/// Decides the seam from the ring at `t = a` against ring 0.
pub(crate) fn close_seam(
    mode: ScheduleMode,
    first: &[Vec3],
    end: &[Vec3],
    total_twist: f64,
    symmetric: impl FnOnce() -> Result<bool>,
) -> Result<(SeamClosure, SeamInfo, Option<SweepWarning>)> {
    let m = first.len();
    let turns = m as f64 * total_twist / TAU;
    let shift = (turns.round() as i64).rem_euclid(m as i64) as usize;
    let integral = (turns - turns.round()).abs() <= 1e-6;
    let mismatch = (0..m).map(|j| (end[j] - first[(j + shift) % m]).norm()).fold(0.0, f64::max);
    let closed = integral && mismatch <= SEAM_TOLERANCE;
    if closed {
        return Ok((SeamClosure::Shift(shift), SeamInfo { shift, max_mismatch: mismatch, stitched: true }, None));
    }
    if mode != ScheduleMode::Ferguson {
        return Err(Error::SeamMismatch { distance: mismatch });
    }
    if !integral && symmetric()? {
        return Err(Error::ResolutionMismatch {
            ring: m,
            reason: format!("a twist of {total_twist} turns the ring by {turns} points"),
        });
    }
    let info = SeamInfo { shift, max_mismatch: mismatch, stitched: false };
    Ok((SeamClosure::Open, info, Some(SweepWarning::OpenSeam { max_mismatch: mismatch })))
}

/// Sweeps `profile` along `curve` under `schedule`.
pub fn generate(
    curve: &ClosedCurve,
    profile: &CurvilinearPolygon,
    schedule: &DeformationSchedule,
    opts: &SweepOptions,
) -> Result<SculptureMesh> {
    curve.require_dimension(3)?;
    let a = curve.domain_end();
    if (schedule.domain_end() - a).abs() > 1e-12 * a {
        return Err(Error::BadSchedule(format!(
            "schedule domain [0, {}] does not match the curve domain [0, {a}]",
            schedule.domain_end()
        )));
    }
    if opts.require_valid_schedule {
        schedule.validate().into_result().map_err(|e| match e {
            Error::BadSchedule(_) => e,
            other => Error::BadSchedule(other.to_string()),
        })?;
    }
    let n = opts.sections;
    let m = opts.ring;
    if n < 16 {
        return Err(Error::BadResolution(format!("need at least 16 sections, got {n}")));
    }
    let frames = frame_field(curve, n)?;
    let prep = PreparedProfile::new(profile, m)?;

    let placed: Vec<(Vec<Vec3>, Vec3)> =
        frames.samples.par_iter().map(|f| prep.place(f, schedule.scale(f.t), schedule.twist(f.t))).collect();
    let (end_ring, _) = prep.place(&frames.end, schedule.scale(a), schedule.twist(a));

    let (closure, seam, warning) =
        close_seam(schedule.mode(), &placed[0].0, &end_ring, schedule.total_twist(), || {
            has_rotational_symmetry(profile, schedule.total_twist())
        })?;

    let mut sections: Vec<SectionInfo> = placed
        .iter()
        .zip(&frames.samples)
        .enumerate()
        .map(|(i, ((ring, off), f))| section_info(f.t, f.position, f.tangent, ring, i * m, *off))
        .collect();
    if closure == SeamClosure::Open {
        let off = prep.place(&frames.end, schedule.scale(a), schedule.twist(a)).1;
        let e = &frames.end;
        sections.push(section_info(e.t, e.position, e.tangent, &end_ring, n * m, off));
    }

    let rings = placed.into_iter().map(|(r, _)| r).collect();
    let (vertices, triangles) = SculptureMesh::stitch(rings, end_ring, closure);
    let mut mesh =
        SculptureMesh { vertices, triangles, sections, seam: Some(seam), warnings: warning.into_iter().collect() };
    if closure != SeamClosure::Open {
        mesh.orient_outward();
    }
    if let Some(SweepWarning::OpenSeam { max_mismatch }) = mesh.warnings.first() {
        log::warn!("open seam: end section is {max_mismatch:e} away from the start section");
    }
    if opts.check_self_intersection {
        check_self_intersection(&mesh)?;
    }
    Ok(mesh)
}

/// Ferguson-mode sweep: the seam closes only through the profile's symmetry.
pub fn generate_ferguson(
    curve: &ClosedCurve,
    profile: &CurvilinearPolygon,
    schedule: &DeformationSchedule,
    opts: &SweepOptions,
) -> Result<SculptureMesh> {
    if schedule.mode() != ScheduleMode::Ferguson {
        return Err(Error::BadSchedule("Ferguson sweep needs a ferguson-mode schedule".into()));
    }
    generate(curve, profile, schedule, opts)
}

/// Fails with the offending section pairs when the mesh self-intersects.
pub fn check_self_intersection(mesh: &SculptureMesh) -> Result<()> {
    let pairs = crate::validate::self_intersect(mesh);
    if pairs.is_empty() {
        return Ok(());
    }
    let mut sections: Vec<(usize, usize)> = pairs
        .iter()
        .filter_map(|&(p, q)| {
            let (a, b) = (mesh.section_of_triangle(p)?, mesh.section_of_triangle(q)?);
            Some((a.min(b), a.max(b)))
        })
        .collect();
    sections.sort_unstable();
    sections.dedup();
    Err(Error::SelfIntersecting { sections, pairs: pairs.len() })
}

/// Ring area centroid; exposed for audits.
pub fn ring_area_centroid(ring: &[Vec3]) -> (f64, Vec3) {
    (vector_area_3d(ring).norm(), area_centroid_3d(ring).1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square() -> CurvilinearPolygon {
        CurvilinearPolygon::with_straight_edges(vec![
            Vec2::new(-0.5, -0.5),
            Vec2::new(0.5, -0.5),
            Vec2::new(0.5, 0.5),
            Vec2::new(-0.5, 0.5),
        ])
        .unwrap()
    }

    fn origin_frame() -> Frame {
        Frame { t: 0.0, position: Vec3::zeros(), tangent: Vec3::z(), u: Vec3::x(), v: Vec3::y() }
    }

    #[test]
    fn placed_square_is_centered() {
        let ring = place_section(&unit_square(), 64, &origin_frame(), 1.0, 0.0).unwrap();
        let (area, c) = area_centroid_3d(&ring);
        assert!(c.norm() < 1e-12);
        assert!((area - 1.0).abs() < 1e-12);
        let half = place_section(&unit_square(), 64, &origin_frame(), 0.5, 0.0).unwrap();
        assert!((area_centroid_3d(&half).0 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn quarter_turn_permutes_square_ring() {
        let ring = place_section(&unit_square(), 64, &origin_frame(), 1.0, 0.0).unwrap();
        let turned = place_section(&unit_square(), 64, &origin_frame(), 1.0, PI / 2.0).unwrap();
        for j in 0..64 {
            assert!((turned[j] - ring[(j + 16) % 64]).norm() < 1e-12);
        }
    }

    #[test]
    fn torus_grid_counts() {
        let curve = ClosedCurve::circle(Vec3::zeros(), 1.0).unwrap();
        let profile = CurvilinearPolygon::regular_polygon(4, 0.2, 0.0).unwrap();
        let schedule = DeformationSchedule::preset_simple(TAU, PI, 2.0).unwrap();
        let opts = SweepOptions { sections: 512, ring: 256, ..Default::default() };
        let mesh = generate(&curve, &profile, &schedule, &opts).unwrap();
        assert_eq!(mesh.vertices.len(), 131_072);
        assert_eq!(mesh.triangles.len(), 262_144);
        assert!(mesh.signed_volume() > 0.0);
        let seam = mesh.seam.as_ref().unwrap();
        assert!(seam.stitched && seam.shift == 0 && seam.max_mismatch < 1e-9);
    }

    #[test]
    fn ferguson_triangle_closes_by_a_third() {
        let curve = ClosedCurve::circle(Vec3::zeros(), 1.0).unwrap();
        let profile = CurvilinearPolygon::hyperbolic_triangle(0.3, 0.2).unwrap();
        let schedule = DeformationSchedule::preset_ferguson(TAU, PI, 1.5).unwrap();
        let opts = SweepOptions { sections: 64, ring: 48, ..Default::default() };
        let mesh = generate_ferguson(&curve, &profile, &schedule, &opts).unwrap();
        let seam = mesh.seam.unwrap();
        assert!(seam.stitched);
        assert_eq!(seam.shift, 16);
        assert!(seam.max_mismatch < 1e-9);

        let bad = SweepOptions { ring: 50, ..opts };
        assert!(matches!(generate(&curve, &profile, &schedule, &bad), Err(Error::ResolutionMismatch { .. })));

        let double = DeformationSchedule::preset_ferguson(TAU, PI, 0.75).unwrap();
        let mesh = generate(&curve, &profile, &double, &opts).unwrap();
        assert_eq!(mesh.seam.unwrap().shift, 32);
    }

    #[test]
    fn scalene_ferguson_is_open() {
        let curve = ClosedCurve::circle(Vec3::zeros(), 1.0).unwrap();
        let profile = CurvilinearPolygon::with_straight_edges(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.3, 0.0),
            Vec2::new(0.05, 0.2),
        ])
        .unwrap();
        let schedule = DeformationSchedule::preset_ferguson(TAU, PI, 1.5).unwrap();
        let opts = SweepOptions { sections: 32, ring: 30, ..Default::default() };
        let mesh = generate(&curve, &profile, &schedule, &opts).unwrap();
        assert_eq!(mesh.vertices.len(), 33 * 30);
        assert_eq!(mesh.sections.len(), 33);
        assert!(matches!(mesh.warnings[0], SweepWarning::OpenSeam { .. }));
    }

    #[test]
    fn unclosed_twist_is_refused() {
        let curve = ClosedCurve::circle(Vec3::zeros(), 1.0).unwrap();
        let schedule = DeformationSchedule::preset_simple(TAU, PI, 2.0)
            .unwrap()
            .with_twist_table(&[(0.0, 0.0), (PI, PI / 2.0), (TAU, 3.0 * PI)])
            .unwrap();
        let profile = CurvilinearPolygon::with_straight_edges(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.3, 0.0),
            Vec2::new(0.05, 0.2),
        ])
        .unwrap();
        let opts = SweepOptions::default();
        assert!(matches!(generate(&curve, &profile, &schedule, &opts), Err(Error::BadSchedule(_))));
        let lax = SweepOptions { require_valid_schedule: false, ..opts };
        assert!(matches!(generate(&curve, &profile, &schedule, &lax), Err(Error::SeamMismatch { .. })));
    }
}
