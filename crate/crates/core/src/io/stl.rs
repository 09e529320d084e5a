//! Binary STL: 80-byte header, little-endian `u32` triangle count, then
//! 50 bytes per triangle (normal, three vertices, zero attribute).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::sweep::SculptureMesh;

const HEADER: &[u8] = b"fels binary STL";

fn f32_bits(p: &Vec3) -> [u32; 3] {
    [(p.x as f32).to_bits(), (p.y as f32).to_bits(), (p.z as f32).to_bits()]
}

pub fn to_bytes(mesh: &SculptureMesh) -> Result<Vec<u8>> {
    let n = u32::try_from(mesh.triangles.len()).map_err(|_| Error::Format("too many triangles for STL".into()))?;
    let mut out = Vec::with_capacity(84 + 50 * mesh.triangles.len());
    let mut header = [0u8; 80];
    header[..HEADER.len()].copy_from_slice(HEADER);
    out.extend_from_slice(&header);
    out.extend_from_slice(&n.to_le_bytes());
    for t in &mesh.triangles {
        let [a, b, c] = t.map(|i| mesh.vertices[i as usize]);
        let normal = (b - a).cross(&(c - a)).try_normalize(0.0).unwrap_or_else(Vec3::zeros);
        for p in [normal, a, b, c] {
            for bits in f32_bits(&p) {
                out.extend_from_slice(&bits.to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    Ok(out)
}

/// Vertex buffer welded by exact `f32` bit patterns, indices in order of
/// first appearance, plus the map from the input vertices to it (`None`
/// for vertices no triangle uses).
fn weld<'a>(corners: impl Iterator<Item = [u32; 3]> + 'a) -> (Vec<[u32; 3]>, Vec<u32>) {
    let mut index: HashMap<[u32; 3], u32> = HashMap::new();
    let mut unique = Vec::new();
    let mut ids = Vec::new();
    for key in corners {
        let id = *index.entry(key).or_insert_with(|| {
            unique.push(key);
            unique.len() as u32 - 1
        });
        ids.push(id);
    }
    (unique, ids)
}

/// Where each vertex of `mesh` lands after an STL write and read.
pub fn welded_indices(mesh: &SculptureMesh) -> Vec<Option<u32>> {
    let corners = mesh.triangles.iter().flat_map(|t| t.map(|i| f32_bits(&mesh.vertices[i as usize])));
    let (_, ids) = weld(corners);
    let mut map = vec![None; mesh.vertices.len()];
    for (k, id) in mesh.triangles.iter().flatten().zip(ids) {
        map[*k as usize].get_or_insert(id);
    }
    map
}

pub fn from_bytes(bytes: &[u8]) -> Result<SculptureMesh> {
    if bytes.len() < 84 {
        return Err(Error::Format("STL shorter than its header".into()));
    }
    let n = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    if bytes.len() != 84 + 50 * n {
        return Err(Error::Format(format!("STL declares {n} triangles but holds {} bytes", bytes.len())));
    }
    let word = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let corners = (0..n).flat_map(|i| {
        let base = 84 + 50 * i + 12;
        (0..3).map(move |k| {
            let o = base + 12 * k;
            [word(o), word(o + 4), word(o + 8)]
        })
    });
    let (unique, ids) = weld(corners);
    let vertices = unique
        .iter()
        .map(|b| Vec3::new(f32::from_bits(b[0]) as f64, f32::from_bits(b[1]) as f64, f32::from_bits(b[2]) as f64))
        .collect();
    let triangles = ids.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Ok(SculptureMesh { vertices, triangles, ..Default::default() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> SculptureMesh {
        SculptureMesh {
            vertices: vec![
                Vec3::new(0.1, 0.2, 0.3),
                Vec3::new(1.0 / 3.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, -0.0),
                Vec3::new(0.0, 0.0, std::f64::consts::PI),
            ],
            triangles: vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]],
            ..Default::default()
        }
    }

    #[test]
    fn layout() {
        let b = to_bytes(&tetra()).unwrap();
        assert_eq!(b.len(), 84 + 4 * 50);
        assert_eq!(&b[80..84], &4u32.to_le_bytes());
        assert!(!b.starts_with(b"solid"));
        for i in 0..4 {
            assert_eq!(&b[84 + 50 * i + 48..84 + 50 * i + 50], &[0, 0]);
        }
    }

    #[test]
    fn round_trip() {
        let m = tetra();
        let back = from_bytes(&to_bytes(&m).unwrap()).unwrap();
        assert_eq!(back.triangles.len(), 4);
        let map = welded_indices(&m);
        for (k, p) in m.vertices.iter().enumerate() {
            let q = back.vertices[map[k].unwrap() as usize];
            assert_eq!(f32_bits(p), f32_bits(&q));
        }
        assert_eq!(from_bytes(&to_bytes(&back).unwrap()).unwrap(), back);
    }

    #[test]
    fn truncated() {
        let b = to_bytes(&tetra()).unwrap();
        assert!(matches!(from_bytes(&b[..b.len() - 1]), Err(Error::Format(_))));
        assert!(matches!(from_bytes(&b[..20]), Err(Error::Format(_))));
    }
}
