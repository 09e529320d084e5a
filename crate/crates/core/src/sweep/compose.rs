use serde::{Deserialize, Serialize};

use super::mesh::SculptureMesh;
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Largest angle between the two tangent lines at a contact.
pub const CONTACT_ANGLE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub components: (usize, usize),
    pub sections: (usize, usize),
    pub parameters: (f64, f64),
    pub point: Vec3,
    pub distance: f64,
    pub angle: f64,
}

/// Sculptures that touch along their center-of-mass curves. No geometry is
/// merged; each component keeps its own mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSculpture {
    pub components: Vec<SculptureMesh>,
    pub contacts: Vec<Contact>,
}

fn line_angle(a: &Vec3, b: &Vec3) -> f64 {
    let c = (a.dot(b) / (a.norm() * b.norm())).abs().min(1.0);
    a.cross(b).norm().atan2(c * a.norm() * b.norm())
}

/// Finds the section pairs, across components, whose centers of mass lie
/// within `tolerance` with parallel tangents. Neighboring hits of the same
/// contact are merged into the closest one.
pub fn compose_tangential(components: Vec<SculptureMesh>, tolerance: f64) -> Result<CompositeSculpture> {
    if components.len() < 2 {
        return Err(Error::InvalidParameter("composition needs at least two sculptures".into()));
    }
    if components.iter().any(|c| c.sections.is_empty()) {
        return Err(Error::NoSections);
    }
    let mut contacts = Vec::new();
    for p in 0..components.len() {
        for q in p + 1..components.len() {
            let (sa, sb) = (&components[p].sections, &components[q].sections);
            let mut hits = Vec::new();
            for (i, a) in sa.iter().enumerate() {
                let ca = a.center_of_mass();
                for (j, b) in sb.iter().enumerate() {
                    let d = (ca - b.center_of_mass()).norm();
                    if d > tolerance {
                        continue;
                    }
                    let angle = line_angle(&a.tangent, &b.tangent);
                    if angle <= CONTACT_ANGLE {
                        hits.push((d, i, j, angle));
                    }
                }
            }
            hits.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
            let circ = |x: usize, y: usize, n: usize| {
                let d = x.abs_diff(y);
                d.min(n - d)
            };
            let mut kept: Vec<(f64, usize, usize, f64)> = Vec::new();
            for h in hits {
                if kept.iter().any(|k| circ(k.1, h.1, sa.len()) <= 2 && circ(k.2, h.2, sb.len()) <= 2) {
                    continue;
                }
                kept.push(h);
            }
            kept.sort_by_key(|k| (k.1, k.2));
            for (d, i, j, angle) in kept {
                let point = (sa[i].center_of_mass() + sb[j].center_of_mass()) / 2.0;
                contacts.push(Contact {
                    components: (p, q),
                    sections: (i, j),
                    parameters: (sa[i].t, sb[j].t),
                    point,
                    distance: d,
                    angle,
                });
            }
        }
    }
    if contacts.is_empty() {
        return Err(Error::NoContact);
    }
    Ok(CompositeSculpture { components, contacts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::ClosedCurve;
    use crate::profiles::CurvilinearPolygon;
    use crate::schedules::DeformationSchedule;
    use crate::sweep::{generate, SweepOptions};
    use std::f64::consts::{PI, TAU};

    fn torus(center: Vec3) -> SculptureMesh {
        let curve = ClosedCurve::circle(center, 1.0).unwrap();
        let profile = CurvilinearPolygon::regular_polygon(4, 0.1, 0.0).unwrap();
        let schedule = DeformationSchedule::preset_simple(TAU, PI / 2.0, 2.0).unwrap();
        generate(&curve, &profile, &schedule, &SweepOptions { sections: 256, ring: 16, ..Default::default() }).unwrap()
    }

    #[test]
    fn touching_circles() {
        let c = compose_tangential(vec![torus(Vec3::zeros()), torus(Vec3::new(2.0, 0.0, 0.0))], 1e-6).unwrap();
        assert_eq!(c.contacts.len(), 1);
        assert!((c.contacts[0].point - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-9);
        assert_eq!(c.contacts[0].sections, (0, 128));
    }

    #[test]
    fn separated_circles() {
        let r = compose_tangential(vec![torus(Vec3::zeros()), torus(Vec3::new(12.0, 0.0, 0.0))], 1e-6);
        assert_eq!(r.unwrap_err(), Error::NoContact);
    }

    #[test]
    fn chain_of_three() {
        let parts = vec![torus(Vec3::zeros()), torus(Vec3::new(2.0, 0.0, 0.0)), torus(Vec3::new(4.0, 0.0, 0.0))];
        let c = compose_tangential(parts, 1e-6).unwrap();
        assert_eq!(c.components.len(), 3);
        assert_eq!(c.contacts.len(), 2);
        assert_eq!(c.contacts[0].components, (0, 1));
        assert_eq!(c.contacts[1].components, (1, 2));
    }
}
