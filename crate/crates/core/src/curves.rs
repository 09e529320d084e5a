//! Closed parametric center-of-mass curves.
//!
//! A [`ClosedCurve`] maps `t ∈ [0, a]` into ℝᵐ with `r(0) = r(a)`. Curves are
//! either analytic (presets or user closures, optionally with an exact
//! derivative and a normal field) or interpolated through samples with a
//! periodic cubic spline.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::spline::PeriodicSpline;

pub const MAX_DIMENSION: usize = 16;
pub const CLOSURE_TOLERANCE: f64 = 1e-9;
const TANGENT_FLOOR: f64 = 1e-12;

type VectorFn = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;

#[derive(Clone)]
enum Evaluator {
    Analytic { eval: VectorFn, derivative: Option<VectorFn> },
    Sampled(PeriodicSpline),
}

#[derive(Clone)]
pub struct ClosedCurve {
    name: String,
    dimension: usize,
    domain_end: f64,
    evaluator: Evaluator,
    normal_field: Option<VectorFn>,
}

impl fmt::Debug for ClosedCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedCurve")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("domain_end", &self.domain_end)
            .field("sampled", &matches!(self.evaluator, Evaluator::Sampled(_)))
            .field("normal_field", &self.normal_field.is_some())
            .finish()
    }
}

fn dvec<const N: usize>(v: [f64; N]) -> DVector<f64> {
    DVector::from_row_slice(&v)
}

impl ClosedCurve {
    /// Named analytic curves: `fels3d`, `fels4d` and `circle`.
    pub fn preset(name: &str) -> Result<Self> {
        use std::f64::consts::TAU;
        let curve = match name {
            "fels3d" => Self {
                name: name.into(),
                dimension: 3,
                domain_end: TAU,
                evaluator: Evaluator::Analytic {
                    eval: Arc::new(|t: f64| dvec([t.cos(), t.sin(), (2.0 * t).cos()])),
                    derivative: Some(Arc::new(|t: f64| dvec([-t.sin(), t.cos(), -2.0 * (2.0 * t).sin()]))),
                },
                normal_field: Some(Arc::new(|t: f64| dvec([t.cos(), 5.0 * t.sin(), 1.0]))),
            },
            "fels4d" => Self {
                name: name.into(),
                dimension: 4,
                domain_end: TAU,
                evaluator: Evaluator::Analytic {
                    eval: Arc::new(|t: f64| dvec([t.cos(), t.sin(), (2.0 * t).cos() + t.cos(), (4.0 * t).sin()])),
                    derivative: Some(Arc::new(|t: f64| {
                        dvec([-t.sin(), t.cos(), -2.0 * (2.0 * t).sin() - t.sin(), 4.0 * (4.0 * t).cos()])
                    })),
                },
                normal_field: None,
            },
            "circle" => Self::circle(Vec3::zeros(), 1.0)?,
            other => return Err(Error::NotFound(format!("curve preset `{other}`"))),
        };
        Ok(curve)
    }

    /// Circle of the given radius in the plane `z = center.z`, traversed
    /// counterclockwise from `center + (radius, 0, 0)`.
    pub fn circle(center: Vec3, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter("circle radius must be positive".into()));
        }
        let c = center;
        Ok(Self {
            name: "circle".into(),
            dimension: 3,
            domain_end: std::f64::consts::TAU,
            evaluator: Evaluator::Analytic {
                eval: Arc::new(move |t: f64| dvec([c.x + radius * t.cos(), c.y + radius * t.sin(), c.z])),
                derivative: Some(Arc::new(move |t: f64| dvec([-radius * t.sin(), radius * t.cos(), 0.0]))),
            },
            normal_field: None,
        })
    }

    /// Analytic curve from closures. Without a derivative, tangents fall back
    /// to centered finite differences.
    pub fn from_fn<F, D>(name: &str, dimension: usize, domain_end: f64, eval: F, derivative: Option<D>) -> Result<Self>
    where
        F: Fn(f64) -> DVector<f64> + Send + Sync + 'static,
        D: Fn(f64) -> DVector<f64> + Send + Sync + 'static,
    {
        check_shape(dimension, domain_end)?;
        let curve = Self {
            name: name.into(),
            dimension,
            domain_end,
            evaluator: Evaluator::Analytic {
                eval: Arc::new(eval),
                derivative: derivative.map(|d| Arc::new(d) as VectorFn),
            },
            normal_field: None,
        };
        if curve.eval(0.0).len() != dimension {
            return Err(Error::DimensionMismatch { expected: dimension, found: curve.eval(0.0).len() });
        }
        let gap = curve.closure_gap();
        if gap > CLOSURE_TOLERANCE {
            return Err(Error::NotClosed { gap });
        }
        Ok(curve)
    }

    /// Periodic cubic interpolation through samples taken at uniform
    /// parameters `i·a/n`. A trailing sample repeating the first is dropped.
    pub fn from_samples(samples: &[Vec<f64>], domain_end: f64) -> Result<Self> {
        let mut pts: Vec<Vec<f64>> = samples.to_vec();
        if pts.len() >= 2 {
            let first = &pts[0];
            let last = &pts[pts.len() - 1];
            let gap = first.iter().zip(last).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if first.len() == last.len() && gap <= CLOSURE_TOLERANCE {
                pts.pop();
            }
        }
        if pts.len() < 4 {
            return Err(Error::InvalidParameter("a sampled curve needs at least 4 distinct samples".into()));
        }
        let dimension = pts[0].len();
        check_shape(dimension, domain_end)?;
        let spline = PeriodicSpline::uniform(domain_end, &pts)?;
        Ok(Self {
            name: "sampled".into(),
            dimension,
            domain_end,
            evaluator: Evaluator::Sampled(spline),
            normal_field: None,
        })
    }

    /// Replaces the curve's normal field.
    pub fn with_normal_field<F>(mut self, field: F) -> Self
    where
        F: Fn(f64) -> DVector<f64> + Send + Sync + 'static,
    {
        self.normal_field = Some(Arc::new(field));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Parameter interval end `a`.
    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.evaluator, Evaluator::Sampled(_))
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        match &self.evaluator {
            Evaluator::Analytic { eval, .. } => eval(t),
            Evaluator::Sampled(s) => DVector::from_vec(s.eval(t)),
        }
    }

    /// Evaluates a 3-dimensional curve. Panics on other dimensions.
    pub fn eval3(&self, t: f64) -> Vec3 {
        assert_eq!(self.dimension, 3, "eval3 on a {}-dimensional curve", self.dimension);
        let p = self.eval(t);
        Vec3::new(p[0], p[1], p[2])
    }

    pub fn closure_gap(&self) -> f64 {
        (self.eval(0.0) - self.eval(self.domain_end)).norm()
    }

    /// `r'(t)`: exact for analytic curves with a derivative, otherwise a
    /// centered difference with step `a/2²⁰`.
    pub fn tangent(&self, t: f64) -> Result<DVector<f64>> {
        let d = match &self.evaluator {
            Evaluator::Analytic { derivative: Some(d), .. } => d(t),
            _ => {
                let h = self.domain_end / (1u64 << 20) as f64;
                (self.eval(t + h) - self.eval(t - h)) / (2.0 * h)
            }
        };
        if !(d.norm() > TANGENT_FLOOR) {
            return Err(Error::DegenerateTangent { t });
        }
        Ok(d)
    }

    pub fn tangent3(&self, t: f64) -> Result<Vec3> {
        self.require_dimension(3)?;
        let d = self.tangent(t)?;
        Ok(Vec3::new(d[0], d[1], d[2]))
    }

    pub fn unit_tangent3(&self, t: f64) -> Result<Vec3> {
        Ok(self.tangent3(t)?.normalize())
    }

    pub fn normal_field(&self, t: f64) -> Option<DVector<f64>> {
        self.normal_field.as_ref().map(|f| f(t))
    }

    pub fn require_dimension(&self, expected: usize) -> Result<()> {
        if self.dimension != expected {
            return Err(Error::DimensionMismatch { expected, found: self.dimension });
        }
        Ok(())
    }

    /// Points at `t_i = i·a/n`, `i = 0..n`.
    pub fn sample(&self, n: usize) -> Vec<DVector<f64>> {
        (0..n).map(|i| self.eval(i as f64 * self.domain_end / n as f64)).collect()
    }

    /// Plane through `r(t0)` orthogonal to the tangent there.
    pub fn section_plane(&self, t0: f64) -> Result<SectionPlane> {
        self.require_dimension(3)?;
        let base_point = self.eval3(t0);
        let unit_normal = self.tangent3(t0)?.normalize();
        let line_direction = self.normal_field(t0).map(|n| Vec3::new(n[0], n[1], n[2]));
        Ok(SectionPlane { t0, base_point, unit_normal, offset: unit_normal.dot(&base_point), line_direction })
    }

    /// Angle between the section plane and `z = 0`, read off the normal
    /// field as `π/2 − arccos(n·e₁/|n|)`.
    pub fn xy_plane_angle(&self, t0: f64) -> Result<f64> {
        let n = self.normal_field(t0).ok_or(Error::MissingNormalField)?;
        let norm = n.norm();
        if norm == 0.0 {
            return Err(Error::MissingNormalField);
        }
        let cos_theta = (n[0] / norm).clamp(-1.0, 1.0);
        Ok(std::f64::consts::FRAC_PI_2 - cos_theta.acos())
    }

    /// Smallest distance between samples whose circular index separation
    /// exceeds `n/64`; a sample-resolution proxy for self-intersection.
    pub fn min_nonadjacent_distance(&self, n: usize) -> (f64, usize, usize) {
        let pts = self.sample(n);
        let gap = n / 64;
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..n {
            for j in i + gap + 1..n {
                if n - (j - i) <= gap {
                    continue;
                }
                let d = (&pts[i] - &pts[j]).norm();
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        best
    }
}

fn check_shape(dimension: usize, domain_end: f64) -> Result<()> {
    if dimension == 0 || dimension > MAX_DIMENSION {
        return Err(Error::InvalidParameter(format!(
            "curve dimension must be in 1..={MAX_DIMENSION}, got {dimension}"
        )));
    }
    if !(domain_end > 0.0) || !domain_end.is_finite() {
        return Err(Error::InvalidParameter("domain end must be a positive real".into()));
    }
    Ok(())
}

/// A cross-section plane `unit_normal · x = offset` through `r(t0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionPlane {
    pub t0: f64,
    pub base_point: Vec3,
    pub unit_normal: Vec3,
    pub offset: f64,
    /// Direction of the line through the base point parallel to the curve's
    /// normal field, when the curve has one.
    pub line_direction: Option<Vec3>,
}

impl SectionPlane {
    pub fn residual(&self, p: &Vec3) -> f64 {
        self.unit_normal.dot(p) - self.offset
    }

    /// Plane coefficients `(n, d)` rescaled so that the normal matches
    /// `reference` in length and direction.
    pub fn scaled_like(&self, reference: &Vec3) -> (Vec3, f64) {
        let k = reference.norm() * self.unit_normal.dot(reference).signum();
        (self.unit_normal * k, self.offset * k)
    }
}

/// Implicit conic `A x² + B xy + C y² + D x + E y + F = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Conic {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a * x * x + self.b * x * y + self.c * y * y + self.d * x + self.e * y + self.f
    }
}

/// Projection onto `z = 0` of a sphere/section-plane circle on the `fels3d`
/// curve, as the expanded form of
/// `16(x − cos t0)² + 16(y − sin t0)² + (y csc t0 − x sec t0)² = R²`.
///
/// An independent derivation from the sphere and the section plane gives the
/// same left side with right side `16R²`: the formula above describes the
/// projected circle of radius `R/4`. The printed right side is kept.
pub fn fels3d_sphere_section(t0: f64, radius: f64) -> Result<Conic> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("sphere radius must be positive".into()));
    }
    let (s, c) = t0.sin_cos();
    if s.abs() < 1e-12 || c.abs() < 1e-12 {
        return Err(Error::SingularParameter { t: t0 });
    }
    let csc = 1.0 / s;
    let sec = 1.0 / c;
    Ok(Conic {
        a: 16.0 + sec * sec,
        b: -2.0 * csc * sec,
        c: 16.0 + csc * csc,
        d: -32.0 * c,
        e: -32.0 * s,
        f: 16.0 * (c * c + s * s) - radius * radius,
    })
}
