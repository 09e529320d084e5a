use serde::{Deserialize, Serialize};

use crate::geom::Vec3;

/// Per-section provenance kept alongside the mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionInfo {
    pub t: f64,
    /// First vertex of this section's ring.
    pub ring_start: usize,
    pub ring_len: usize,
    pub area: f64,
    /// Area centroid of the ring polygon.
    pub centroid: Vec3,
    /// Curve point `r(t)` the section was centered on.
    pub position: Vec3,
    pub tangent: Vec3,
    /// Center of mass minus area centroid; zero for uniform density.
    pub mass_offset: Vec3,
}

impl SectionInfo {
    pub fn center_of_mass(&self) -> Vec3 {
        self.centroid + self.mass_offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeamInfo {
    /// Last ring connects to ring 0 with point `j` joined to `(j + shift) mod M`.
    pub shift: usize,
    /// Largest distance between the section computed at `t = a` and the
    /// shifted first ring.
    pub max_mismatch: f64,
    pub stitched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SweepWarning {
    /// The end section does not coincide with the start section.
    OpenSeam { max_mismatch: f64 },
    /// An orange control was scaled up to the area floor.
    Clamped { control: String, area: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SculptureMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    pub sections: Vec<SectionInfo>,
    pub seam: Option<SeamInfo>,
    pub warnings: Vec<SweepWarning>,
}

/// How the last ring joins the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeamClosure {
    Shift(usize),
    Open,
}

fn split_quad(vs: &[Vec3], a: u32, b: u32, c: u32, d: u32, out: &mut Vec<[u32; 3]>) {
    let p = |i: u32| vs[i as usize];
    if (p(a) - p(c)).norm_squared() <= (p(b) - p(d)).norm_squared() {
        out.push([a, b, c]);
        out.push([a, c, d]);
    } else {
        out.push([a, b, d]);
        out.push([b, c, d]);
    }
}

impl SculptureMesh {
    /// Joins consecutive rings of equal length `M` with `2M` triangles each.
    /// A shifted closure wraps the last ring onto ring 0; an open closure
    /// appends `end` as one more ring.
    pub fn stitch(rings: Vec<Vec<Vec3>>, end: Vec<Vec3>, closure: SeamClosure) -> (Vec<Vec3>, Vec<[u32; 3]>) {
        let n = rings.len();
        let m = rings.first().map_or(0, |r| r.len());
        let mut vertices: Vec<Vec3> = rings.into_iter().flatten().collect();
        let open = closure == SeamClosure::Open;
        if open {
            vertices.extend(end);
        }
        let idx = |i: usize, j: usize| -> u32 {
            let j = j % m;
            if i < n || open {
                (i * m + j) as u32
            } else {
                let SeamClosure::Shift(s) = closure else { unreachable!() };
                ((j + s) % m) as u32
            }
        };
        let mut triangles = Vec::with_capacity(2 * n * m);
        for i in 0..n {
            for j in 0..m {
                let a = idx(i, j);
                let b = idx(i, j + 1);
                let c = idx(i + 1, j + 1);
                let d = idx(i + 1, j);
                split_quad(&vertices, a, b, c, d, &mut triangles);
            }
        }
        (vertices, triangles)
    }

    /// Signed enclosed volume (divergence theorem); positive when the
    /// triangles face outward.
    pub fn signed_volume(&self) -> f64 {
        let o = self.vertices.iter().sum::<Vec3>() / self.vertices.len().max(1) as f64;
        self.triangles
            .iter()
            .map(|t| {
                let a = self.vertices[t[0] as usize] - o;
                let b = self.vertices[t[1] as usize] - o;
                let c = self.vertices[t[2] as usize] - o;
                a.dot(&b.cross(&c))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn flip(&mut self) {
        for t in &mut self.triangles {
            t.swap(1, 2);
        }
    }

    /// Flips every triangle when the enclosed volume is negative.
    pub fn orient_outward(&mut self) {
        if self.signed_volume() < 0.0 {
            self.flip();
        }
    }

    /// Section containing the given triangle, when triangles were stitched
    /// ring by ring.
    pub fn section_of_triangle(&self, tri: usize) -> Option<usize> {
        let m = self.sections.first()?.ring_len;
        let i = tri / (2 * m);
        (i < self.sections.len()).then_some(i)
    }

    /// Concatenates meshes into one buffer; provenance is dropped.
    pub fn concat(meshes: &[SculptureMesh]) -> SculptureMesh {
        let mut out = SculptureMesh::default();
        for m in meshes {
            let base = out.vertices.len() as u32;
            out.vertices.extend_from_slice(&m.vertices);
            out.triangles.extend(m.triangles.iter().map(|t| [t[0] + base, t[1] + base, t[2] + base]));
        }
        out
    }

    pub fn translated(&self, d: Vec3) -> SculptureMesh {
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v += d;
        }
        for s in &mut out.sections {
            s.centroid += d;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_ring(z: f64) -> Vec<Vec3> {
        vec![Vec3::new(0.0, 0.0, z), Vec3::new(1.0, 0.0, z), Vec3::new(1.0, 1.0, z), Vec3::new(0.0, 1.0, z)]
    }

    #[test]
    fn shifted_seam_reuses_first_ring() {
        let rings = vec![square_ring(0.0), square_ring(1.0), square_ring(2.0)];
        let (v, t) = SculptureMesh::stitch(rings, square_ring(0.0), SeamClosure::Shift(1));
        assert_eq!(v.len(), 12);
        assert_eq!(t.len(), 24);
        assert!(t.iter().flatten().all(|&i| (i as usize) < 12));
    }

    #[test]
    fn open_seam_adds_a_ring() {
        let rings = vec![square_ring(0.0), square_ring(1.0)];
        let (v, t) = SculptureMesh::stitch(rings, square_ring(2.0), SeamClosure::Open);
        assert_eq!(v.len(), 12);
        assert_eq!(t.len(), 16);
    }
}
