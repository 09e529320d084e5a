//! Interpolating splines: C² periodic cubics for closed curves and
//! shape-preserving (monotone) cubic Hermite curves for schedules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Solves a cyclic tridiagonal system. `sub[i]` multiplies `x[i-1]`
/// (wrapping to `x[n-1]` for row 0), `sup[i]` multiplies `x[i+1]`
/// (wrapping to `x[0]` for the last row).
fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let beta = sub[0];
    let alpha = sup[n - 1];
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    let x = solve_tridiagonal(sub, &bb, sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiagonal(sub, &bb, sup, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / m } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Periodic natural cubic spline through vector-valued samples.
///
/// Knot `i` sits at `knots[i]`; the curve wraps with the given period so the
/// last span joins the final knot back to the first one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSpline {
    knots: Vec<f64>,
    period: f64,
    dim: usize,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl PeriodicSpline {
    pub fn new(knots: Vec<f64>, period: f64, values: &[Vec<f64>]) -> Result<Self> {
        let n = knots.len();
        if n < 3 || values.len() != n {
            return Err(Error::InvalidParameter("periodic spline needs at least 3 knots with one value each".into()));
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidParameter("inconsistent sample dimension".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) || knots[n - 1] - knots[0] >= period {
            return Err(Error::InvalidParameter("knots must increase within one period".into()));
        }
        let h: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { knots[i + 1] - knots[i] } else { knots[0] + period - knots[n - 1] })
            .collect();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        for i in 0..n {
            let hp = h[(i + n - 1) % n];
            sub[i] = hp;
            diag[i] = 2.0 * (hp + h[i]);
            sup[i] = h[i];
        }
        let flat: Vec<f64> = values.iter().flatten().copied().collect();
        let mut second = vec![0.0; n * dim];
        for k in 0..dim {
            let y = |i: usize| flat[(i % n) * dim + k];
            let rhs: Vec<f64> = (0..n)
                .map(|i| {
                    let hp = h[(i + n - 1) % n];
                    6.0 * ((y(i + 1) - y(i)) / h[i] - (y(i) - y(i + n - 1)) / hp)
                })
                .collect();
            let m = solve_cyclic(&sub, &diag, &sup, &rhs);
            for i in 0..n {
                second[i * dim + k] = m[i];
            }
        }
        Ok(Self { knots, period, dim, values: flat, second })
    }

    /// Spline with knots spaced uniformly over `[0, period)`.
    pub fn uniform(period: f64, values: &[Vec<f64>]) -> Result<Self> {
        let n = values.len();
        let knots = (0..n).map(|i| i as f64 * period / n as f64).collect();
        Self::new(knots, period, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn locate(&self, t: f64) -> (usize, f64, f64) {
        let n = self.knots.len();
        let t0 = self.knots[0];
        let mut u = (t - t0).rem_euclid(self.period) + t0;
        if u >= t0 + self.period {
            u = t0;
        }
        let i = match self.knots.binary_search_by(|k| k.partial_cmp(&u).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let next = if i + 1 < n { self.knots[i + 1] } else { t0 + self.period };
        (i, u - self.knots[i], next - self.knots[i])
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let n = self.knots.len();
        let (i, s, h) = self.locate(t);
        let j = (i + 1) % n;
        let r = h - s;
        (0..self.dim)
            .map(|k| {
                let (y0, y1) = (self.values[i * self.dim + k], self.values[j * self.dim + k]);
                let (m0, m1) = (self.second[i * self.dim + k], self.second[j * self.dim + k]);
                m0 * r * r * r / (6.0 * h)
                    + m1 * s * s * s / (6.0 * h)
                    + (y0 / h - m0 * h / 6.0) * r
                    + (y1 / h - m1 * h / 6.0) * s
            })
            .collect()
    }

    pub fn derivative(&self, t: f64) -> Vec<f64> {
        let n = self.knots.len();
        let (i, s, h) = self.locate(t);
        let j = (i + 1) % n;
        let r = h - s;
        (0..self.dim)
            .map(|k| {
                let (y0, y1) = (self.values[i * self.dim + k], self.values[j * self.dim + k]);
                let (m0, m1) = (self.second[i * self.dim + k], self.second[j * self.dim + k]);
                -m0 * r * r / (2.0 * h) + m1 * s * s / (2.0 * h) + (y1 - y0) / h - (m1 - m0) * h / 6.0
            })
            .collect()
    }
}

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson style slopes.
/// Between consecutive knots it is monotone, and every interior knot where
/// the data changes direction is a local extremum with zero slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneHermite {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

fn harmonic_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    if d0 * d1 <= 0.0 {
        return 0.0;
    }
    let w1 = 2.0 * h1 + h0;
    let w2 = h1 + 2.0 * h0;
    (w1 + w2) / (w1 / d0 + w2 / d1)
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

impl MonotoneHermite {
    /// With `periodic_slope` the end slopes are shared, computed from the
    /// last and first secants as if the data wrapped around; the curve is
    /// then C¹ across the seam whenever the values there differ by a
    /// constant offset.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, periodic_slope: bool) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(Error::InvalidParameter("Hermite interpolation needs ≥ 2 matching knots".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("Hermite knots must strictly increase".into()));
        }
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut slopes = vec![0.0; n];
        for i in 1..n - 1 {
            slopes[i] = harmonic_slope(h[i - 1], h[i], d[i - 1], d[i]);
        }
        if periodic_slope {
            let m = harmonic_slope(h[n - 2], h[0], d[n - 2], d[0]);
            slopes[0] = m;
            slopes[n - 1] = m;
        } else if n == 2 {
            slopes[0] = d[0];
            slopes[1] = d[0];
        } else {
            slopes[0] = end_slope(h[0], h[1], d[0], d[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = match self.xs.binary_search_by(|k| k.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let u = (x - self.xs[i]) / h;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn cyclic_solver_matches_dense_solution() {
        // 4x4 cyclic system with a known solution.
        let x_true = [1.0, -2.0, 0.5, 3.0];
        let sub = [1.0, 0.5, 0.25, 2.0];
        let diag = [5.0, 6.0, 7.0, 8.0];
        let sup = [0.3, 0.7, 1.1, 0.9];
        let n = 4;
        let rhs: Vec<f64> = (0..n)
            .map(|i| sub[i] * x_true[(i + n - 1) % n] + diag[i] * x_true[i] + sup[i] * x_true[(i + 1) % n])
            .collect();
        let x = solve_cyclic(&sub, &diag, &sup, &rhs);
        for i in 0..n {
            assert!((x[i] - x_true[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_spline_reproduces_circle() {
        let n = 256;
        let vals: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let t = i as f64 * TAU / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let s = PeriodicSpline::uniform(TAU, &vals).unwrap();
        for k in 0..100 {
            let t = 0.0137 + k as f64 * 0.0629;
            let p = s.eval(t);
            assert!((p[0] - t.cos()).abs() < 1e-8 && (p[1] - t.sin()).abs() < 1e-8);
            let d = s.derivative(t);
            assert!((d[0] + t.sin()).abs() < 1e-5 && (d[1] - t.cos()).abs() < 1e-5);
        }
        // exact at knots and across the wrap
        assert!((s.eval(TAU)[0] - 1.0).abs() < 1e-15);
        assert!((s.eval(-TAU / n as f64)[0] - vals[n - 1][0]).abs() < 1e-14);
    }

    #[test]
    fn constant_data_interpolates_constantly() {
        let vals = vec![vec![2.5]; 5];
        let s = PeriodicSpline::new(vec![0.0, 0.3, 1.0, 1.7, 2.2], 3.0, &vals).unwrap();
        for k in 0..30 {
            assert!((s.eval(k as f64 * 0.1)[0] - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn hermite_keeps_extrema_at_knots() {
        let h = MonotoneHermite::new(vec![0.0, 1.0, 2.5, 4.0], vec![1.0, 0.3, 0.8, 1.0], true).unwrap();
        let mut prev = h.eval(0.0);
        for k in 1..=400 {
            let x = k as f64 * 0.01;
            let y = h.eval(x);
            if x <= 1.0 {
                assert!(y < prev + 1e-15);
            } else {
                assert!(y > prev - 1e-15);
            }
            prev = y;
        }
        assert!(h.eval(1.0) == 0.3);
    }
}
