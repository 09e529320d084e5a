//! Wavefront OBJ meshes and polylines.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::hyperspace::Polyline;
use crate::sweep::SculptureMesh;

pub fn to_string(mesh: &SculptureMesh) -> String {
    let mut s = String::with_capacity(40 * (mesh.vertices.len() + mesh.triangles.len()));
    for p in &mesh.vertices {
        writeln!(s, "v {} {} {}", p.x, p.y, p.z).unwrap();
    }
    for t in &mesh.triangles {
        writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    s
}

fn index(token: &str, n: usize, line: usize) -> Result<u32> {
    let head = token.split('/').next().unwrap_or("");
    let bad = || Error::Format(format!("line {line}: bad face index `{token}`"));
    let i: i64 = head.parse().map_err(|_| bad())?;
    let k = if i > 0 { i - 1 } else { n as i64 + i };
    if k < 0 || k >= n as i64 {
        return Err(bad());
    }
    Ok(k as u32)
}

/// Reads `v` and `f` records; polygons are fanned into triangles and
/// everything else is ignored.
pub fn from_str(text: &str) -> Result<SculptureMesh> {
    let mut mesh = SculptureMesh::default();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let mut it = raw.split_whitespace();
        match it.next() {
            Some("v") => {
                let xyz: Vec<f64> = it
                    .take(3)
                    .map(|w| w.parse().map_err(|_| Error::Format(format!("line {line}: bad coordinate `{w}`"))))
                    .collect::<Result<_>>()?;
                if xyz.len() != 3 {
                    return Err(Error::Format(format!("line {line}: vertex needs three coordinates")));
                }
                mesh.vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => {
                let n = mesh.vertices.len();
                let ids: Vec<u32> = it.map(|w| index(w, n, line)).collect::<Result<_>>()?;
                if ids.len() < 3 {
                    return Err(Error::Format(format!("line {line}: face needs three corners")));
                }
                for k in 1..ids.len() - 1 {
                    mesh.triangles.push([ids[0], ids[k], ids[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(mesh)
}

/// Polyline as one `l` element; a closed polyline repeats its first index.
pub fn polyline_to_string(poly: &Polyline) -> String {
    let mut s = String::new();
    for p in &poly.points {
        writeln!(s, "v {} {} {}", p[0], p[1], p[2]).unwrap();
    }
    s.push('l');
    for i in 1..=poly.points.len() {
        write!(s, " {i}").unwrap();
    }
    if poly.closed && !poly.points.is_empty() {
        s.push_str(" 1");
    }
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = SculptureMesh {
            vertices: vec![Vec3::new(0.1, 1.0 / 3.0, -2.5e-17), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 7.0)],
            triangles: vec![[0, 1, 2]],
            ..Default::default()
        };
        assert_eq!(from_str(&to_string(&m)).unwrap(), m);
    }

    #[test]
    fn quads_slashes_and_negatives() {
        let text = "# square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\nf -4 -3 -2\n";
        let m = from_str(text).unwrap();
        assert_eq!(m.triangles, vec![[0, 1, 2], [0, 2, 3], [0, 1, 2]]);
        assert!(from_str("v 0 0 0\nf 1 2 3\n").is_err());
        assert!(from_str("v 0 zero 0\n").is_err());
    }

    #[test]
    fn polyline_element() {
        let p = Polyline { closed: true, points: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]] };
        assert!(polyline_to_string(&p).ends_with("l 1 2 3 1\n"));
    }
}
