//! Rotation-minimizing frames by double reflection, with the closure
//! residual spread uniformly so the frame at `t = a` matches `t = 0`.

use crate::curves::ClosedCurve;
use crate::error::{Error, Result};
use crate::geom::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub t: f64,
    pub position: Vec3,
    pub tangent: Vec3,
    pub u: Vec3,
    pub v: Vec3,
}

impl Frame {
    /// Maps in-plane coordinates to space.
    pub fn map(&self, x: f64, y: f64) -> Vec3 {
        self.position + self.u * x + self.v * y
    }

    fn rotated(&self, angle: f64) -> Frame {
        let (s, c) = angle.sin_cos();
        Frame { u: self.u * c + self.v * s, v: self.v * c - self.u * s, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameField {
    /// Frames at `t_i = i·a/N`, `i < N`.
    pub samples: Vec<Frame>,
    /// Corrected frame at `t = a`.
    pub end: Frame,
    /// Angle from `u(0)` to the transported `u(a)` about `tangent(0)`,
    /// before correction.
    pub closure_residual_angle: f64,
}

/// Unit vector among the coordinate axes, tried in the order z, x, y, least
/// aligned with `t`, made orthogonal to it.
pub fn seed_normal(t: &Vec3) -> Vec3 {
    let axes = [Vec3::z(), Vec3::x(), Vec3::y()];
    let mut best = axes[0];
    for e in &axes[1..] {
        if e.dot(t).abs() < best.dot(t).abs() {
            best = *e;
        }
    }
    (best - t * best.dot(t)).normalize()
}

/// One double-reflection step carrying `r` from `(x0, t0)` to `(x1, t1)`.
pub fn double_reflect(x0: &Vec3, t0: &Vec3, r: &Vec3, x1: &Vec3, t1: &Vec3) -> Vec3 {
    let v1 = x1 - x0;
    let c1 = v1.norm_squared();
    let (r_l, t_l) =
        if c1 > 0.0 { (r - v1 * (2.0 / c1 * v1.dot(r)), t0 - v1 * (2.0 / c1 * v1.dot(t0))) } else { (*r, *t0) };
    let v2 = t1 - t_l;
    let c2 = v2.norm_squared();
    let r1 = if c2 > 1e-300 { r_l - v2 * (2.0 / c2 * v2.dot(&r_l)) } else { r_l };
    (r1 - t1 * r1.dot(t1)).normalize()
}

/// Rotation-minimizing frame field on `n` samples of a closed 3D curve.
pub fn frame_field(curve: &ClosedCurve, n: usize) -> Result<FrameField> {
    curve.require_dimension(3)?;
    if n < 16 {
        return Err(Error::BadResolution(format!("frame field needs at least 16 samples, got {n}")));
    }
    let a = curve.domain_end();
    let mut pos = Vec::with_capacity(n + 1);
    let mut tan = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = i as f64 * a / n as f64;
        pos.push(curve.eval3(t));
        tan.push(curve.unit_tangent3(t)?);
    }
    let mut us = Vec::with_capacity(n + 1);
    us.push(seed_normal(&tan[0]));
    for i in 0..n {
        let next = double_reflect(&pos[i], &tan[i], &us[i], &pos[i + 1], &tan[i + 1]);
        us.push(next);
    }
    let u0 = us[0];
    let un = us[n];
    let phi = u0.cross(&un).dot(&tan[0]).atan2(u0.dot(&un));
    let frames: Vec<Frame> = (0..=n)
        .map(|i| {
            let u = us[i];
            let raw = Frame { t: i as f64 * a / n as f64, position: pos[i], tangent: tan[i], u, v: tan[i].cross(&u) };
            raw.rotated(-phi * i as f64 / n as f64)
        })
        .collect();
    let mut samples = frames;
    let mut end = samples.pop().expect("n + 1 frames");
    end.t = a;
    Ok(FrameField { samples, end, closure_residual_angle: phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn planar_circle_keeps_plane_normal() {
        let c = ClosedCurve::circle(Vec3::zeros(), 1.0).unwrap();
        let f = frame_field(&c, 1024).unwrap();
        assert!(f.closure_residual_angle.abs() < 1e-9);
        for fr in &f.samples {
            assert!((fr.u - Vec3::z()).norm() < 1e-9);
        }
        assert!((f.end.u - f.samples[0].u).norm() < 1e-9);
    }

    #[test]
    fn fels3d_frames_are_orthonormal_and_close() {
        let c = ClosedCurve::preset("fels3d").unwrap();
        let f = frame_field(&c, 4096).unwrap();
        for fr in f.samples.iter().chain(std::iter::once(&f.end)) {
            assert!((fr.u.norm() - 1.0).abs() < 1e-9);
            assert!((fr.v.norm() - 1.0).abs() < 1e-9);
            assert!(fr.u.dot(&fr.tangent).abs() < 1e-9);
            assert!(fr.u.dot(&fr.v).abs() < 1e-9);
        }
        assert!(f.closure_residual_angle.is_finite());
        assert!((f.end.u - f.samples[0].u).norm() < 1e-9);
        for w in f.samples.windows(2) {
            assert!(w[0].u.angle(&w[1].u) < std::f64::consts::PI / 8.0);
        }
    }

    #[test]
    fn refinement_is_stable() {
        let c = ClosedCurve::preset("fels3d").unwrap();
        let coarse = frame_field(&c, 1024).unwrap();
        let fine = frame_field(&c, 2048).unwrap();
        for (i, fr) in coarse.samples.iter().enumerate() {
            let other = &fine.samples[2 * i];
            assert!((other.t - fr.t).abs() < 1e-12 * TAU);
            assert!(fr.u.angle(&other.u) <= 1e-4, "sample {i}: {}", fr.u.angle(&other.u));
        }
    }
}
