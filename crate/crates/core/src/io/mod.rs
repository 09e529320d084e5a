//! Configuration and file formats.

pub mod config;
pub mod obj;
pub mod stl;

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::hyperspace::Polyline;
use crate::sweep::{SculptureMesh, SeamInfo, SectionInfo, SweepWarning};

pub use config::SculptureConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshFormat {
    Stl,
    Obj,
    MeshJson,
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stl" => Ok(Self::Stl),
            "obj" => Ok(Self::Obj),
            "mesh-json" | "json" => Ok(Self::MeshJson),
            _ => Err(Error::InvalidParameter(format!("unknown mesh format `{s}`"))),
        }
    }
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
        ext.parse().map_err(|_| Error::InvalidParameter(format!("cannot tell the mesh format of {}", path.display())))
    }
}

/// Section data written next to STL and OBJ files, which cannot hold it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub sections: Vec<SectionInfo>,
    pub seam: Option<SeamInfo>,
    #[serde(default)]
    pub warnings: Vec<SweepWarning>,
    /// For each generated vertex, its index in the file once read back.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_map: Option<Vec<Option<u32>>>,
}

pub fn sidecar_path(mesh_path: &Path) -> PathBuf {
    let mut s = mesh_path.as_os_str().to_owned();
    s.push(".provenance.json");
    PathBuf::from(s)
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    serde_json::to_vec(value).map_err(|e| Error::Format(e.to_string()))
}

/// Writes the mesh, plus a provenance sidecar for STL and OBJ when the
/// mesh carries sections.
pub fn write_mesh(mesh: &SculptureMesh, path: &Path, format: MeshFormat) -> Result<()> {
    let vertex_map = match format {
        MeshFormat::MeshJson => return write_file(path, &json(mesh)?),
        MeshFormat::Stl => {
            write_file(path, &stl::to_bytes(mesh)?)?;
            Some(stl::welded_indices(mesh))
        }
        MeshFormat::Obj => {
            write_file(path, obj::to_string(mesh).as_bytes())?;
            None
        }
    };
    if !mesh.sections.is_empty() {
        let p = Provenance {
            sections: mesh.sections.clone(),
            seam: mesh.seam.clone(),
            warnings: mesh.warnings.clone(),
            vertex_map,
        };
        write_file(&sidecar_path(path), &json(&p)?)?;
    }
    Ok(())
}

/// Restores generation order and section data on a mesh read back from a
/// file.
pub fn attach_provenance(mut mesh: SculptureMesh, prov: Provenance) -> Result<SculptureMesh> {
    if let Some(map) = &prov.vertex_map {
        let mut inverse = vec![u32::MAX; mesh.vertices.len()];
        let mut vertices = Vec::with_capacity(map.len());
        for (k, m) in map.iter().enumerate() {
            match m {
                Some(w) => {
                    let w = *w as usize;
                    let p = *mesh
                        .vertices
                        .get(w)
                        .ok_or_else(|| Error::Format("provenance maps past the vertex buffer".into()))?;
                    if inverse[w] == u32::MAX {
                        inverse[w] = k as u32;
                    }
                    vertices.push(p);
                }
                None => vertices.push(Vec3::repeat(f64::NAN)),
            }
        }
        if inverse.contains(&u32::MAX) {
            return Err(Error::Format("provenance does not cover every vertex in the file".into()));
        }
        mesh.triangles = mesh.triangles.iter().map(|t| t.map(|i| inverse[i as usize])).collect();
        mesh.vertices = vertices;
    }
    if prov.sections.iter().any(|s| s.ring_start + s.ring_len > mesh.vertices.len()) {
        return Err(Error::Format("provenance sections refer past the vertex buffer".into()));
    }
    mesh.sections = prov.sections;
    mesh.seam = prov.seam;
    mesh.warnings = prov.warnings;
    Ok(mesh)
}

/// Reads a mesh by extension, with its provenance sidecar when present.
pub fn read_mesh(path: &Path) -> Result<SculptureMesh> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    let mesh = match MeshFormat::from_path(path)? {
        MeshFormat::MeshJson => return serde_json::from_slice(&bytes).map_err(|e| Error::Format(e.to_string())),
        MeshFormat::Stl => stl::from_bytes(&bytes)?,
        MeshFormat::Obj => {
            let text = std::str::from_utf8(&bytes).map_err(|e| Error::Format(e.to_string()))?;
            obj::from_str(text)?
        }
    };
    let side = sidecar_path(path);
    if !side.exists() {
        return Ok(mesh);
    }
    let raw = std::fs::read(&side).map_err(|e| io_err(&side, e))?;
    let prov: Provenance =
        serde_json::from_slice(&raw).map_err(|e| Error::Format(format!("{}: {e}", side.display())))?;
    attach_provenance(mesh, prov)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolylineFormat {
    Json,
    Obj,
}

impl PolylineFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("obj") => Self::Obj,
            _ => Self::Json,
        }
    }
}

pub fn write_polyline(poly: &Polyline, path: &Path, format: PolylineFormat) -> Result<()> {
    match format {
        PolylineFormat::Json => write_file(path, &json(poly)?),
        PolylineFormat::Obj => write_file(path, obj::polyline_to_string(poly).as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::ClosedCurve;
    use crate::profiles::CurvilinearPolygon;
    use crate::schedules::DeformationSchedule;
    use crate::sweep::{generate, SweepOptions};
    use crate::validate::{validate_mesh, ValidateOptions};
    use std::f64::consts::{PI, TAU};

    fn torus() -> SculptureMesh {
        let c = ClosedCurve::preset("fels3d").unwrap();
        let p = CurvilinearPolygon::shave_circle(0.2, [0.05; 4], [0.0, PI / 2.0, PI, 1.5 * PI]).unwrap();
        let s = DeformationSchedule::preset_simple(TAU, PI, 2.0).unwrap();
        generate(&c, &p, &s, &SweepOptions { sections: 64, ring: 16, ..Default::default() }).unwrap()
    }

    #[test]
    fn formats_with_sidecars() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = torus();
        for (name, fmt) in [("m.stl", MeshFormat::Stl), ("m.obj", MeshFormat::Obj), ("m.json", MeshFormat::MeshJson)] {
            let path = dir.path().join(name);
            write_mesh(&mesh, &path, fmt).unwrap();
            assert_eq!(sidecar_path(&path).exists(), fmt != MeshFormat::MeshJson);
            let back = read_mesh(&path).unwrap();
            assert_eq!(back.sections, mesh.sections);
            assert_eq!(back.triangles, mesh.triangles, "{name}");
            let r = validate_mesh(&back, None, &ValidateOptions::default());
            assert!(r.pass, "{name}: {:?}", r.failures);
        }
        let back = read_mesh(&dir.path().join("m.obj")).unwrap();
        assert_eq!(back.vertices, mesh.vertices);
    }

    #[test]
    fn format_names() {
        assert_eq!("mesh-json".parse::<MeshFormat>().unwrap(), MeshFormat::MeshJson);
        assert!("ply".parse::<MeshFormat>().is_err());
        assert_eq!(MeshFormat::from_path(Path::new("a/b.STL")).unwrap(), MeshFormat::Stl);
        assert_eq!(sidecar_path(Path::new("x/out.stl")), PathBuf::from("x/out.stl.provenance.json"));
    }
}
