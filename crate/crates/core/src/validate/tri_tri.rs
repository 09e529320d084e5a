//! Triangle–triangle overlap (interval test on the planes' intersection
//! line, with a 2D fallback for coplanar pairs). Touching counts as
//! overlapping. Degenerate (zero-area) triangles never overlap anything.

use crate::geom::{segments_intersect, Vec2, Vec3};

fn interval(p: [f64; 3], d: [f64; 3]) -> Option<(f64, f64)> {
    let cut = |k: usize, i: usize| p[k] + (p[i] - p[k]) * d[k] / (d[k] - d[i]);
    let alone = if d[0] * d[1] > 0.0 {
        2
    } else if d[0] * d[2] > 0.0 {
        1
    } else if d[1] * d[2] > 0.0 || d[0] != 0.0 {
        0
    } else if d[1] != 0.0 {
        1
    } else if d[2] != 0.0 {
        2
    } else {
        return None;
    };
    let (i, j) = ((alone + 1) % 3, (alone + 2) % 3);
    let (a, b) = (cut(alone, i), cut(alone, j));
    Some((a.min(b), a.max(b)))
}

fn signed_distances(n: &Vec3, origin: &Vec3, pts: &[Vec3; 3], eps: f64) -> [f64; 3] {
    let mut d = [0.0; 3];
    for k in 0..3 {
        let v = n.dot(&(pts[k] - origin));
        d[k] = if v.abs() < eps { 0.0 } else { v };
    }
    d
}

fn same_side(d: &[f64; 3]) -> bool {
    (d[0] > 0.0 && d[1] > 0.0 && d[2] > 0.0) || (d[0] < 0.0 && d[1] < 0.0 && d[2] < 0.0)
}

fn point_in_triangle(p: Vec2, t: [Vec2; 3]) -> bool {
    let cross = |a: Vec2, b: Vec2, c: Vec2| (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let d0 = cross(t[0], t[1], p);
    let d1 = cross(t[1], t[2], p);
    let d2 = cross(t[2], t[0], p);
    (d0 >= 0.0 && d1 >= 0.0 && d2 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0 && d2 <= 0.0)
}

fn coplanar(n: &Vec3, a: &[Vec3; 3], b: &[Vec3; 3]) -> bool {
    let k = n.iamax();
    let (i0, i1) = ((k + 1) % 3, (k + 2) % 3);
    let flat = |t: &[Vec3; 3]| [0, 1, 2].map(|m| Vec2::new(t[m][i0], t[m][i1]));
    let (pa, pb) = (flat(a), flat(b));
    for i in 0..3 {
        for j in 0..3 {
            if segments_intersect(pa[i], pa[(i + 1) % 3], pb[j], pb[(j + 1) % 3]) {
                return true;
            }
        }
    }
    point_in_triangle(pa[0], pb) || point_in_triangle(pb[0], pa)
}

pub fn tri_tri_intersect(a: &[Vec3; 3], b: &[Vec3; 3]) -> bool {
    let na = (a[1] - a[0]).cross(&(a[2] - a[0]));
    let nb = (b[1] - b[0]).cross(&(b[2] - b[0]));
    let (la, lb) = (na.norm(), nb.norm());
    if la == 0.0 || lb == 0.0 {
        return false;
    }
    let (na, nb) = (na / la, nb / lb);
    let scale = a.iter().chain(b.iter()).map(|p| p.amax()).fold(0.0, f64::max);
    let eps = 1e-12 * (1.0 + scale);

    let da = signed_distances(&nb, &b[0], a, eps);
    if same_side(&da) {
        return false;
    }
    let db = signed_distances(&na, &a[0], b, eps);
    if same_side(&db) {
        return false;
    }
    if da == [0.0; 3] || db == [0.0; 3] {
        return coplanar(&na, a, b);
    }
    let dir = na.cross(&nb);
    let k = dir.iamax();
    let ia = interval([a[0][k], a[1][k], a[2][k]], da);
    let ib = interval([b[0][k], b[1][k], b[2][k]], db);
    match (ia, ib) {
        (Some(x), Some(y)) => !(x.1 < y.0 || y.1 < x.0),
        _ => coplanar(&na, a, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(p: [[f64; 3]; 3]) -> [Vec3; 3] {
        p.map(|q| Vec3::new(q[0], q[1], q[2]))
    }

    #[test]
    fn crossing_and_separate() {
        let a = tri([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let b = tri([[0.2, 0.2, -1.0], [0.2, 0.2, 1.0], [0.3, 0.8, 0.0]]);
        assert!(tri_tri_intersect(&a, &b));
        let c = tri([[0.2, 0.2, 0.5], [0.8, 0.2, 0.5], [0.2, 0.8, 0.5]]);
        assert!(!tri_tri_intersect(&a, &c));
        let far = tri([[2.0, 2.0, -1.0], [2.0, 2.0, 1.0], [3.0, 2.5, 0.0]]);
        assert!(!tri_tri_intersect(&a, &far));
    }

    #[test]
    fn coplanar_cases() {
        let a = tri([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let inside = tri([[0.1, 0.1, 0.0], [0.3, 0.1, 0.0], [0.1, 0.3, 0.0]]);
        assert!(tri_tri_intersect(&a, &inside));
        assert!(tri_tri_intersect(&inside, &a));
        let apart = tri([[2.0, 0.0, 0.0], [3.0, 0.0, 0.0], [2.0, 1.0, 0.0]]);
        assert!(!tri_tri_intersect(&a, &apart));
        let overlapping = tri([[0.5, -0.5, 0.0], [0.5, 0.5, 0.0], [-0.5, 0.5, 0.0]]);
        assert!(tri_tri_intersect(&a, &overlapping));
    }

    #[test]
    fn touching_at_a_point() {
        let a = tri([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let b = tri([[1.0, 0.0, 0.0], [2.0, 0.0, 1.0], [2.0, 1.0, -1.0]]);
        assert!(tri_tri_intersect(&a, &b));
    }
}
