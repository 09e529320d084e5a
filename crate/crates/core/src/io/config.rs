//! Structured sculpture configuration.

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curves::ClosedCurve;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::hyperspace::{project_curve, projection_simplicity, sweep_nd_project, ProjectionMap};
use crate::profiles::{preset_profile, CurvilinearPolygon, Density, PresetParams};
use crate::schedules::{DeformationSchedule, ScheduleMode};
use crate::sweep::{self, SculptureMesh, SweepOptions};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Uniformly spaced samples on `[0, 2π)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<PresetParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
    /// Two Bézier control points per edge; straight edges when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controls: Option<Vec<[[f64; 2]; 2]>>,
    /// `"uniform"` or an expression in `x` and `y`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    /// Domain end; the curve's when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// `[t, s(t)]` rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical_points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist_angles: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seam_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_table: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist_table: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    pub sections: usize,
    pub ring: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        let d = SweepOptions::default();
        Self { sections: d.sections, ring: d.ring }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checks {
    #[serde(default)]
    pub self_intersection: bool,
    /// Minimum distance between non-adjacent curve samples; 0 disables
    /// the curve simplicity check.
    #[serde(default)]
    pub clearance: f64,
}

/// Projection applied to curves of dimension four and up.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SculptureConfig {
    pub mode: ScheduleMode,
    pub curve: CurveSpec,
    pub profile: ProfileSpec,
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<ProjectionSpec>,
}

/// Everything a config describes, built and checked.
#[derive(Debug, Clone)]
pub struct Sculpture {
    pub curve: ClosedCurve,
    pub profile: CurvilinearPolygon,
    pub schedule: DeformationSchedule,
    pub projection: Option<ProjectionMap>,
    pub resolution: Resolution,
    pub checks: Checks,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn rows(v: &[[f64; 2]]) -> Vec<(f64, f64)> {
    v.iter().map(|r| (r[0], r[1])).collect()
}

impl CurveSpec {
    pub fn build(&self) -> Result<ClosedCurve> {
        match (&self.preset, &self.samples) {
            (Some(name), None) => {
                if self.closed.is_some() {
                    return Err(config_err("`closed` applies to sampled curves only"));
                }
                ClosedCurve::preset(name)
            }
            (None, Some(samples)) => {
                if self.closed != Some(true) {
                    return Err(config_err("sampled curves must declare `closed = true`"));
                }
                ClosedCurve::from_samples(samples, TAU)
            }
            _ => Err(config_err("curve needs exactly one of `preset` or `samples`")),
        }
    }
}

impl ProfileSpec {
    pub fn build(&self) -> Result<CurvilinearPolygon> {
        let density = match &self.density {
            Some(d) => Density::parse(d)?,
            None => Density::Uniform,
        };
        let profile = match (&self.preset, &self.vertices) {
            (Some(name), None) => {
                if self.controls.is_some() {
                    return Err(config_err("`controls` needs explicit `vertices`"));
                }
                preset_profile(name, &self.params.clone().unwrap_or_default())?
            }
            (None, Some(vertices)) => {
                if self.params.is_some() {
                    return Err(config_err("`params` applies to presets only"));
                }
                let vs: Vec<Vec2> = vertices.iter().map(|p| Vec2::new(p[0], p[1])).collect();
                match &self.controls {
                    None => CurvilinearPolygon::with_straight_edges(vs)?,
                    Some(c) => {
                        let cs = c.iter().map(|e| [Vec2::new(e[0][0], e[0][1]), Vec2::new(e[1][0], e[1][1])]).collect();
                        CurvilinearPolygon::new(vs, cs, Density::Uniform)?
                    }
                }
            }
            _ => return Err(config_err("profile needs exactly one of `preset` or `vertices`")),
        };
        Ok(profile.with_density(density))
    }
}

impl ScheduleSpec {
    pub fn build(&self, mode: ScheduleMode, curve_domain: f64) -> Result<DeformationSchedule> {
        let a = self.a.unwrap_or(curve_domain);
        let base = match mode {
            ScheduleMode::Simple | ScheduleMode::Ferguson => {
                if self.critical_points.is_some() || self.twist_angles.is_some() || self.seam_scale.is_some() {
                    return Err(config_err(format!(
                        "{mode:?} schedules take `t_star` and `alpha`, not critical points or twist angles"
                    )));
                }
                let t_star = self.t_star.ok_or_else(|| config_err("schedule needs `t_star`"))?;
                let alpha = self.alpha.ok_or_else(|| config_err("schedule needs `alpha`"))?;
                if mode == ScheduleMode::Simple {
                    DeformationSchedule::preset_simple(a, t_star, alpha)?
                } else {
                    DeformationSchedule::preset_ferguson(a, t_star, alpha)?
                }
            }
            ScheduleMode::Complex => {
                if self.t_star.is_some() || self.alpha.is_some() {
                    return Err(config_err("complex schedules take `critical_points` and `twist_angles`"));
                }
                let cps =
                    self.critical_points.as_ref().ok_or_else(|| config_err("schedule needs `critical_points`"))?;
                let angles = self.twist_angles.as_ref().ok_or_else(|| config_err("schedule needs `twist_angles`"))?;
                DeformationSchedule::preset_complex(a, &rows(cps), angles, self.seam_scale.unwrap_or(1.0))?
            }
        };
        let mut s = base;
        if let Some(t) = &self.scale_table {
            s = s.with_scale_table(&rows(t))?;
        }
        if let Some(t) = &self.twist_table {
            s = s.with_twist_table(&rows(t))?;
        }
        Ok(s)
    }
}

impl ProjectionSpec {
    pub fn build(&self, dimension: usize) -> Result<ProjectionMap> {
        match (&self.axes, &self.matrix) {
            (Some(axes), None) => ProjectionMap::axes(axes, dimension),
            (None, Some(m)) => ProjectionMap::general(m),
            _ => Err(config_err("projection needs exactly one of `axes` or `matrix`")),
        }
    }
}

impl SculptureConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn build(&self) -> Result<Sculpture> {
        let curve = self.curve.build()?;
        let profile = self.profile.build()?;
        let schedule = self.schedule.build(self.mode, curve.domain_end())?;
        let projection = match (&self.projection, curve.dimension()) {
            (None, 3) => None,
            (Some(_), 3) => return Err(config_err("`projection` applies to curves of dimension 4 and up")),
            (Some(p), d) => Some(p.build(d)?),
            (None, d) => return Err(config_err(format!("a {d}-dimensional curve needs a `projection`"))),
        };
        Ok(Sculpture { curve, profile, schedule, projection, resolution: self.resolution, checks: self.checks })
    }
}

impl Sculpture {
    /// Sweeps the sculpture, running the configured checks.
    pub fn generate(&self) -> Result<SculptureMesh> {
        let Resolution { sections, ring } = self.resolution;
        let clearance = self.checks.clearance;
        match &self.projection {
            None => {
                if clearance > 0.0 {
                    check_simple(&self.curve, sections, clearance)?;
                }
                let opts = SweepOptions {
                    sections,
                    ring,
                    check_self_intersection: self.checks.self_intersection,
                    require_valid_schedule: true,
                };
                sweep::generate(&self.curve, &self.profile, &self.schedule, &opts)
            }
            Some(p) => {
                if clearance > 0.0 {
                    check_simple(&project_curve(&self.curve, p)?, sections, clearance)?;
                }
                let mesh = sweep_nd_project(&self.curve, &self.profile, &self.schedule, p, sections, ring)?;
                if self.checks.self_intersection {
                    sweep::check_self_intersection(&mesh)?;
                }
                Ok(mesh)
            }
        }
    }
}

fn check_simple(curve: &ClosedCurve, n: usize, clearance: f64) -> Result<()> {
    let r = projection_simplicity(curve, n.max(256), clearance)?;
    if r.pass {
        Ok(())
    } else {
        Err(Error::CurveClearance { min_distance: r.min_distance, pair: r.pair })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIMPLE: &str = r#"
mode = "simple"

[curve]
preset = "fels3d"

[profile]
preset = "shaved_circle"
params = { radius = 0.25 }

[schedule]
t_star = 3.141592653589793
alpha = 2.0

[resolution]
sections = 64
ring = 16
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = SculptureConfig::parse(SIMPLE).unwrap();
        assert_eq!(c.mode, ScheduleMode::Simple);
        assert_eq!(c.resolution, Resolution { sections: 64, ring: 16 });
        let again = SculptureConfig::parse(&c.to_toml().unwrap()).unwrap();
        assert_eq!(again, c);
        let s = c.build().unwrap();
        let mesh = s.generate().unwrap();
        assert_eq!(mesh.triangles.len(), 2 * 64 * 16);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = SIMPLE.replace("alpha = 2.0", "alpha = 2.0\nbeta = 1.0");
        assert!(matches!(SculptureConfig::parse(&bad), Err(Error::Config(_))));
        let bad = format!("{SIMPLE}\ncolour = \"red\"\n");
        assert!(matches!(SculptureConfig::parse(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn exclusive_choices() {
        let mut c = SculptureConfig::parse(SIMPLE).unwrap();
        c.curve.samples = Some(vec![vec![0.0; 3]; 4]);
        assert!(matches!(c.build(), Err(Error::Config(_))));
        let mut c = SculptureConfig::parse(SIMPLE).unwrap();
        c.schedule.twist_angles = Some(vec![1.0]);
        assert!(matches!(c.build(), Err(Error::Config(_))));
        let mut c = SculptureConfig::parse(SIMPLE).unwrap();
        c.curve.preset = Some("fels4d".into());
        assert!(matches!(c.build(), Err(Error::Config(_))));
    }

    #[test]
    fn sampled_curve_and_explicit_profile() {
        let samples: Vec<Vec<f64>> = (0..64)
            .map(|i| {
                let t = i as f64 * TAU / 64.0;
                vec![3.0 * t.cos(), 3.0 * t.sin(), 0.0]
            })
            .collect();
        let c = SculptureConfig {
            mode: ScheduleMode::Simple,
            curve: CurveSpec { samples: Some(samples), closed: Some(true), ..Default::default() },
            profile: ProfileSpec {
                vertices: Some(vec![[0.0, 0.0], [0.4, 0.0], [0.4, 0.4], [0.0, 0.4]]),
                density: Some("1 + x".into()),
                ..Default::default()
            },
            schedule: ScheduleSpec { t_star: Some(2.0), alpha: Some(1.0), ..Default::default() },
            resolution: Resolution { sections: 32, ring: 16 },
            checks: Checks { self_intersection: true, clearance: 0.01 },
            projection: None,
        };
        let text = c.to_toml().unwrap();
        assert_eq!(SculptureConfig::parse(&text).unwrap(), c);
        assert!(c.build().unwrap().generate().is_ok());
    }

    #[test]
    fn four_dimensional_config() {
        let text = r#"
mode = "simple"
curve = { preset = "fels4d" }
profile = { preset = "hyperbolic_triangle", params = { radius = 0.1 } }
schedule = { t_star = 3.0, alpha = 2.0 }
resolution = { sections = 128, ring = 12 }
projection = { axes = "xyz" }
"#;
        let c = SculptureConfig::parse(text).unwrap();
        assert_eq!(SculptureConfig::parse(&c.to_toml().unwrap()).unwrap(), c);
        let mesh = c.build().unwrap().generate().unwrap();
        assert_eq!(mesh.triangles.len(), 2 * 128 * 12);
    }
}
