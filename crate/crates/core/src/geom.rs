//! Small planar and spatial polygon helpers shared by the profile, sweep
//! and validation code.

use nalgebra::{Vector2, Vector3};

pub type Vec2 = Vector2<f64>;
pub type Vec3 = Vector3<f64>;

/// Signed shoelace area, positive for counterclockwise loops.
pub fn signed_area_2d(points: &[Vec2]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let o = points[0];
    let mut twice = 0.0;
    for i in 1..n - 1 {
        let a = points[i] - o;
        let b = points[i + 1] - o;
        twice += a.x * b.y - a.y * b.x;
    }
    0.5 * twice
}

/// Signed area and area centroid of a closed polygon.
pub fn area_centroid_2d(points: &[Vec2]) -> (f64, Vec2) {
    let n = points.len();
    if n == 0 {
        return (0.0, Vec2::zeros());
    }
    let o = points.iter().sum::<Vec2>() / n as f64;
    let mut twice = 0.0;
    let mut moment = Vec2::zeros();
    for i in 0..n {
        let a = points[i] - o;
        let b = points[(i + 1) % n] - o;
        let cross = a.x * b.y - a.y * b.x;
        twice += cross;
        moment += (a + b) * cross;
    }
    if twice == 0.0 {
        return (0.0, o);
    }
    (0.5 * twice, o + moment / (3.0 * twice))
}

/// Newell vector area of a closed loop in space; its norm is the area of a
/// planar loop and its direction the loop normal.
pub fn vector_area_3d(points: &[Vec3]) -> Vec3 {
    let n = points.len();
    if n == 0 {
        return Vec3::zeros();
    }
    let o = points.iter().sum::<Vec3>() / n as f64;
    let mut acc = Vec3::zeros();
    for i in 0..n {
        let a = points[i] - o;
        let b = points[(i + 1) % n] - o;
        acc += a.cross(&b);
    }
    0.5 * acc
}

/// Area and area centroid of a planar loop embedded in space.
pub fn area_centroid_3d(points: &[Vec3]) -> (f64, Vec3) {
    let n = points.len();
    if n == 0 {
        return (0.0, Vec3::zeros());
    }
    let o = points.iter().sum::<Vec3>() / n as f64;
    let va = vector_area_3d(points);
    let area = va.norm();
    if area == 0.0 {
        return (0.0, o);
    }
    let normal = va / area;
    let mut weight = 0.0;
    let mut moment = Vec3::zeros();
    for i in 0..n {
        let a = points[i] - o;
        let b = points[(i + 1) % n] - o;
        let w = 0.5 * a.cross(&b).dot(&normal);
        weight += w;
        moment += (a + b) * (w / 3.0);
    }
    (area, o + moment / weight)
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// True when no two non-adjacent edges of the closed loop touch and no edge
/// is degenerate.
pub fn is_simple_loop(points: &[Vec2]) -> bool {
    let n = points.len();
    if n < 3 {
        return false;
    }
    if (0..n).any(|i| points[i] == points[(i + 1) % n]) {
        return false;
    }
    // Bounding boxes prune most pairs.
    let boxes: Vec<(Vec2, Vec2)> = (0..n)
        .map(|i| {
            let a = points[i];
            let b = points[(i + 1) % n];
            (a.inf(&b), a.sup(&b))
        })
        .collect();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (lo_i, hi_i) = boxes[i];
            let (lo_j, hi_j) = boxes[j];
            if lo_i.x > hi_j.x || lo_j.x > hi_i.x || lo_i.y > hi_j.y || lo_j.y > hi_i.y {
                continue;
            }
            if segments_intersect(points[i], points[(i + 1) % n], points[j], points[(j + 1) % n]) {
                return false;
            }
        }
    }
    // Adjacent edges folding back onto each other.
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        let c = points[(i + 2) % n];
        if orient(a, b, c) == 0.0 && (b - a).dot(&(c - b)) < 0.0 {
            return false;
        }
    }
    true
}

/// Rotates `p` counterclockwise by `angle` radians about the origin.
pub fn rotate_2d(p: Vec2, angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vec2> {
        vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)]
    }

    #[test]
    fn square_area_and_centroid() {
        let (a, c) = area_centroid_2d(&square());
        assert!((a - 1.0).abs() < 1e-15);
        assert!((c - Vec2::new(0.5, 0.5)).norm() < 1e-15);
        let mut cw = square();
        cw.reverse();
        assert!(signed_area_2d(&cw) < 0.0);
    }

    #[test]
    fn embedded_square_centroid() {
        let pts: Vec<Vec3> = square().iter().map(|p| Vec3::new(p.x, 0.0, p.y) + Vec3::new(1.0, 2.0, 3.0)).collect();
        let (a, c) = area_centroid_3d(&pts);
        assert!((a - 1.0).abs() < 1e-14);
        assert!((c - Vec3::new(1.5, 2.0, 3.5)).norm() < 1e-14);
    }

    #[test]
    fn bowtie_is_not_simple() {
        let bowtie = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        assert!(!is_simple_loop(&bowtie));
        assert!(is_simple_loop(&square()));
    }
}
