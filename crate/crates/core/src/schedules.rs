//! Twist and dilation schedules `(θ(t), s(t))` on `[0, a]`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrema::{classify_circular, ExtremumKind};
use crate::spline::MonotoneHermite;

/// Sample count used by [`DeformationSchedule::validate`].
pub const VALIDATION_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    Simple,
    Complex,
    Ferguson,
}

#[derive(Debug, Clone, PartialEq)]
enum Scale {
    /// `(1+t)⁻¹` falling to `t*`, then the mirrored leg back to 1.
    Reciprocal {
        t_star: f64,
        a: f64,
    },
    Constant(f64),
    Interpolated(MonotoneHermite),
}

impl Scale {
    fn eval(&self, t: f64) -> f64 {
        match self {
            Scale::Reciprocal { t_star, a } => {
                if t <= *t_star {
                    1.0 / (1.0 + t)
                } else {
                    1.0 / (1.0 + t_star * (a - t) / (a - t_star))
                }
            }
            Scale::Constant(c) => *c,
            Scale::Interpolated(h) => h.eval(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationSchedule {
    mode: ScheduleMode,
    domain_end: f64,
    alpha: Option<f64>,
    critical_points: Vec<f64>,
    scale: Scale,
    twist: MonotoneHermite,
}

fn check_domain(a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::BadSchedule(format!("domain end must be positive, got {a}")));
    }
    Ok(())
}

fn check_t_star(a: f64, t_star: f64, alpha: f64) -> Result<()> {
    check_domain(a)?;
    if !(t_star > 0.0 && t_star < a) {
        return Err(Error::BadSchedule(format!("t* = {t_star} must lie strictly inside (0, {a})")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::BadSchedule(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

impl DeformationSchedule {
    /// Shrink with `(1+t)⁻¹` to the unique minimum at `t*`, grow back to 1;
    /// twist monotonically through `π/α` at `t*` to the smallest multiple of
    /// 2π not below it.
    pub fn preset_simple(a: f64, t_star: f64, alpha: f64) -> Result<Self> {
        check_t_star(a, t_star, alpha)?;
        let peak = PI / alpha;
        let end = TAU * (peak / TAU).ceil();
        let twist = MonotoneHermite::new(vec![0.0, t_star, a], vec![0.0, peak, end], true)?;
        Ok(Self {
            mode: ScheduleMode::Simple,
            domain_end: a,
            alpha: Some(alpha),
            critical_points: vec![t_star],
            scale: Scale::Reciprocal { t_star, a },
            twist,
        })
    }

    /// Same dilation as the simple preset; the twist reaches `π/α` at `t*`
    /// and holds there, so the end section is the start section turned by
    /// `π/α` (`2π/3` for `α = 3/2`).
    pub fn preset_ferguson(a: f64, t_star: f64, alpha: f64) -> Result<Self> {
        check_t_star(a, t_star, alpha)?;
        let peak = PI / alpha;
        let twist = MonotoneHermite::new(vec![0.0, t_star, a], vec![0.0, peak, peak], true)?;
        Ok(Self {
            mode: ScheduleMode::Ferguson,
            domain_end: a,
            alpha: Some(alpha),
            critical_points: vec![t_star],
            scale: Scale::Reciprocal { t_star, a },
            twist,
        })
    }

    /// `critical` holds `(t_k, s(t_k))`; the scale is a monotone Hermite
    /// through `(0, seam_scale)`, the critical points and `(a, seam_scale)`,
    /// so each `t_k` where the data turns is a local extremum. The twist
    /// turns by `|twist_angles[k]|` on the segment ending at `t_k`, with
    /// alternating direction; the final segment shares the first segment's
    /// direction (they meet across the seam) and runs to the nearest
    /// multiple of 2π.
    pub fn preset_complex(a: f64, critical: &[(f64, f64)], twist_angles: &[f64], seam_scale: f64) -> Result<Self> {
        check_domain(a)?;
        if critical.is_empty() {
            return Err(Error::BadSchedule("complex schedule needs at least one critical point".into()));
        }
        if twist_angles.len() != critical.len() {
            return Err(Error::BadSchedule(format!(
                "{} critical points need {} twist angles, got {}",
                critical.len(),
                critical.len(),
                twist_angles.len()
            )));
        }
        let mut ts = vec![0.0];
        ts.extend(critical.iter().map(|c| c.0));
        ts.push(a);
        if ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::BadSchedule("critical points must increase strictly inside (0, a)".into()));
        }
        let mut ss = vec![seam_scale];
        ss.extend(critical.iter().map(|c| c.1));
        ss.push(seam_scale);
        if ss.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::BadSchedule("scale values must be positive".into()));
        }
        let values = &ss[..ss.len() - 1];
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if values.iter().filter(|&&s| s == lo).count() > 1 {
            return Err(Error::NonUniqueExtremum { kind: "minimum" });
        }
        if values.iter().filter(|&&s| s == hi).count() > 1 {
            return Err(Error::NonUniqueExtremum { kind: "maximum" });
        }
        let mut thetas = vec![0.0];
        let mut sign = 1.0;
        for &phi in twist_angles {
            if !phi.is_finite() {
                return Err(Error::BadSchedule("twist angles must be finite".into()));
            }
            let last = *thetas.last().unwrap();
            thetas.push(last + sign * phi.abs());
            sign = -sign;
        }
        let last = *thetas.last().unwrap();
        thetas.push(TAU * (last / TAU).ceil());
        let twist = MonotoneHermite::new(ts.clone(), thetas, true)?;
        let scale = MonotoneHermite::new(ts, ss, true)?;
        Ok(Self {
            mode: ScheduleMode::Complex,
            domain_end: a,
            alpha: None,
            critical_points: critical.iter().map(|c| c.0).collect(),
            scale: Scale::Interpolated(scale),
            twist,
        })
    }

    /// Constant scale, no twist. Never a valid Fels schedule on its own,
    /// but useful for plain tubes.
    pub fn constant(a: f64, scale: f64) -> Result<Self> {
        check_domain(a)?;
        if !(scale > 0.0) {
            return Err(Error::BadSchedule("scale must be positive".into()));
        }
        Ok(Self {
            mode: ScheduleMode::Simple,
            domain_end: a,
            alpha: None,
            critical_points: Vec::new(),
            scale: Scale::Constant(scale),
            twist: MonotoneHermite::new(vec![0.0, a], vec![0.0, 0.0], false)?,
        })
    }

    fn table(&self, points: &[(f64, f64)], what: &str) -> Result<MonotoneHermite> {
        if points.len() < 2 {
            return Err(Error::BadSchedule(format!("{what} table needs at least 2 rows")));
        }
        let (first, last) = (points[0].0, points[points.len() - 1].0);
        if first != 0.0 || (last - self.domain_end).abs() > 1e-12 * self.domain_end {
            return Err(Error::BadSchedule(format!("{what} table must span [0, {}]", self.domain_end)));
        }
        MonotoneHermite::new(points.iter().map(|p| p.0).collect(), points.iter().map(|p| p.1).collect(), true)
            .map_err(|e| Error::BadSchedule(format!("{what} table: {e}")))
    }

    /// Replaces the scale by a monotone interpolant of `(t, s)` rows.
    pub fn with_scale_table(mut self, points: &[(f64, f64)]) -> Result<Self> {
        if points.iter().any(|p| !(p.1 > 0.0)) {
            return Err(Error::BadSchedule("scale table values must be positive".into()));
        }
        self.scale = Scale::Interpolated(self.table(points, "scale")?);
        Ok(self)
    }

    /// Replaces the twist by a monotone interpolant of `(t, θ)` rows.
    pub fn with_twist_table(mut self, points: &[(f64, f64)]) -> Result<Self> {
        self.twist = self.table(points, "twist")?;
        Ok(self)
    }

    pub fn with_mode(mut self, mode: ScheduleMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_critical_points(mut self, points: Vec<f64>) -> Self {
        self.critical_points = points;
        self
    }

    pub fn mode(&self) -> ScheduleMode {
        self.mode
    }

    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn critical_points(&self) -> &[f64] {
        &self.critical_points
    }

    pub fn scale(&self, t: f64) -> f64 {
        self.scale.eval(t)
    }

    pub fn twist(&self, t: f64) -> f64 {
        self.twist.eval(t)
    }

    pub fn total_twist(&self) -> f64 {
        self.twist(self.domain_end)
    }

    /// Samples both functions on `VALIDATION_SAMPLES` points and checks the
    /// invariants of the schedule's mode.
    pub fn validate(&self) -> ScheduleReport {
        self.validate_as(self.mode)
    }

    pub fn validate_as(&self, mode: ScheduleMode) -> ScheduleReport {
        let a = self.domain_end;
        let n = VALIDATION_SAMPLES;
        let ts: Vec<f64> = (0..=n).map(|i| i as f64 * a / n as f64).collect();
        let s: Vec<f64> = ts.iter().map(|&t| self.scale(t)).collect();
        let th: Vec<f64> = ts.iter().map(|&t| self.twist(t)).collect();
        let mut failures = Vec::new();
        let step = a / n as f64;

        if s.iter().any(|v| !(*v > 0.0)) {
            failures.push("scale must stay positive".to_string());
        }
        let scale_closure = s[n] - s[0];
        if scale_closure.abs() > 1e-12 {
            failures.push(format!("scale does not close: s(a) - s(0) = {scale_closure:e}"));
        }

        let ext = classify_circular(&s[..n]);
        let scale_extrema: Vec<ScheduleExtremum> =
            ext.items.iter().map(|e| ScheduleExtremum { t: ts[e.index], value: s[e.index], kind: e.kind }).collect();
        if !ext.unique_min {
            failures.push("scale has no unique global minimum".to_string());
        }
        if !ext.unique_max {
            failures.push("scale has no unique global maximum".to_string());
        }
        let near = |t: f64, u: f64| {
            let d = (t - u).rem_euclid(a);
            d.min(a - d) <= step * (1.0 + 1e-9)
        };
        match mode {
            ScheduleMode::Simple | ScheduleMode::Ferguson => {
                if scale_extrema.len() != 2 {
                    failures.push(format!(
                        "scale has {} extrema, expected one minimum and one maximum",
                        scale_extrema.len()
                    ));
                }
                if let (Some(&t_star), Some(min)) = (self.critical_points.first(), ext.global_min()) {
                    if !near(ts[min.index], t_star) {
                        failures.push(format!("scale minimum at t = {} is not at t* = {t_star}", ts[min.index]));
                    }
                }
            }
            ScheduleMode::Complex => {
                for e in &scale_extrema {
                    if !near(e.t, 0.0) && !self.critical_points.iter().any(|&c| near(e.t, c)) {
                        failures.push(format!("scale extremum at t = {} is not a critical point", e.t));
                    }
                }
                for &c in &self.critical_points {
                    if !scale_extrema.iter().any(|e| near(e.t, c)) {
                        failures.push(format!("critical point t = {c} is not a scale extremum"));
                    }
                }
            }
        }

        let twist_start = th[0];
        if twist_start.abs() > 1e-12 {
            failures.push(format!("twist must start at 0, got {twist_start}"));
        }
        let twist_end = th[n];
        let period = match mode {
            ScheduleMode::Ferguson => TAU / 3.0,
            _ => TAU,
        };
        let twist_closure = twist_end - period * (twist_end / period).round();
        if twist_closure.abs() > 1e-9 {
            failures.push(format!("twist closure residue {twist_closure} (θ(a) = {twist_end})"));
        }
        let diffs: Vec<f64> = th.windows(2).map(|w| w[1] - w[0]).collect();
        let twist_monotone = diffs.iter().all(|d| *d >= -1e-12) || diffs.iter().all(|d| *d <= 1e-12);
        match mode {
            ScheduleMode::Simple | ScheduleMode::Ferguson => {
                if !twist_monotone {
                    failures.push("twist is not monotone".to_string());
                }
                if let (Some(alpha), Some(&t_star)) = (self.alpha, self.critical_points.first()) {
                    let at = self.twist(t_star);
                    if (at - PI / alpha).abs() > 1e-9 {
                        failures.push(format!("θ(t*) = {at}, expected π/α = {}", PI / alpha));
                    }
                }
            }
            ScheduleMode::Complex => {
                let mut bounds = vec![0.0];
                bounds.extend(self.critical_points.iter().cloned());
                let mut prev_sign = 0.0;
                for w in bounds.windows(2) {
                    let (lo, hi) = (w[0], w[1]);
                    let delta = self.twist(hi) - self.twist(lo);
                    let sign = if delta > 1e-12 {
                        1.0
                    } else if delta < -1e-12 {
                        -1.0
                    } else {
                        0.0
                    };
                    let i0 = (lo / step).ceil() as usize;
                    let i1 = ((hi / step).floor() as usize).min(n);
                    if (i0..i1).any(|i| diffs[i] * sign < -1e-12) {
                        failures.push(format!("twist is not monotone on [{lo}, {hi}]"));
                    }
                    if sign != 0.0 && sign == prev_sign {
                        failures.push(format!("twist direction does not alternate at t = {lo}"));
                    }
                    if sign != 0.0 {
                        prev_sign = sign;
                    }
                }
            }
        }

        ScheduleReport {
            mode,
            samples: n,
            scale_extrema,
            unique_min: ext.unique_min,
            unique_max: ext.unique_max,
            scale_closure,
            twist_start,
            twist_end,
            twist_closure,
            twist_monotone,
            pass: failures.is_empty(),
            failures,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleExtremum {
    pub t: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub mode: ScheduleMode,
    pub samples: usize,
    pub scale_extrema: Vec<ScheduleExtremum>,
    pub unique_min: bool,
    pub unique_max: bool,
    pub scale_closure: f64,
    pub twist_start: f64,
    pub twist_end: f64,
    /// Signed distance of `θ(a)` from the nearest admissible multiple.
    pub twist_closure: f64,
    pub twist_monotone: bool,
    pub failures: Vec<String>,
    pub pass: bool,
}

impl ScheduleReport {
    pub fn into_result(self) -> Result<()> {
        if self.pass {
            return Ok(());
        }
        if !self.unique_min && !self.scale_extrema.is_empty() {
            return Err(Error::NonUniqueExtremum { kind: "minimum" });
        }
        if !self.unique_max && !self.scale_extrema.is_empty() {
            return Err(Error::NonUniqueExtremum { kind: "maximum" });
        }
        Err(Error::BadSchedule(self.failures.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_preset_values() {
        let s = DeformationSchedule::preset_simple(TAU, PI, 2.0).unwrap();
        assert_eq!(s.scale(0.0), 1.0);
        assert!((s.scale(PI) - 1.0 / (1.0 + PI)).abs() < 1e-15);
        assert!((s.scale(TAU) - 1.0).abs() < 1e-15);
        assert!((s.twist(PI) - PI / 2.0).abs() < 1e-15);
        assert!((s.total_twist() - TAU).abs() < 1e-15);
        let r = s.validate();
        assert!(r.pass, "{:?}", r.failures);
        let min = r.scale_extrema.iter().find(|e| e.kind == ExtremumKind::GlobalMin).unwrap();
        assert!((min.t - PI).abs() <= TAU / 4096.0);
    }

    #[test]
    fn large_twist_rounds_up_to_full_turns() {
        let s = DeformationSchedule::preset_simple(TAU, 2.0, 0.25).unwrap();
        assert!((s.total_twist() - 4.0 * PI).abs() < 1e-12);
        assert!(s.validate().pass);
    }

    #[test]
    fn bad_ordering() {
        assert!(matches!(DeformationSchedule::preset_simple(1.0, 2.0, 2.0), Err(Error::BadSchedule(_))));
        assert!(matches!(DeformationSchedule::preset_simple(1.0, 0.5, 0.0), Err(Error::BadSchedule(_))));
    }

    #[test]
    fn open_twist_fails_simple_mode() {
        let s = DeformationSchedule::preset_simple(TAU, PI, 2.0)
            .unwrap()
            .with_twist_table(&[(0.0, 0.0), (PI, PI / 2.0), (TAU, 3.0 * PI)])
            .unwrap();
        let r = s.validate();
        assert!(!r.pass);
        assert!((r.twist_closure.abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn ferguson_closes_only_in_its_mode() {
        let s = DeformationSchedule::preset_ferguson(TAU, PI, 1.5).unwrap();
        assert!((s.total_twist() - TAU / 3.0).abs() < 1e-15);
        assert!(s.validate().pass);
        assert!(!s.validate_as(ScheduleMode::Simple).pass);
    }

    #[test]
    fn complex_presets() {
        let ok = DeformationSchedule::preset_complex(TAU, &[(2.0, 0.5), (4.0, 0.7)], &[1.0, 0.5], 1.0).unwrap();
        let r = ok.validate();
        let min = r.scale_extrema.iter().find(|e| e.kind == ExtremumKind::GlobalMin).unwrap();
        assert!((min.t - 2.0).abs() <= TAU / 4096.0);

        let tie = DeformationSchedule::preset_complex(TAU, &[(2.0, 0.5), (4.0, 0.5)], &[1.0, 0.5], 1.0);
        assert_eq!(tie, Err(Error::NonUniqueExtremum { kind: "minimum" }));

        let three =
            DeformationSchedule::preset_complex(TAU, &[(1.5, 0.4), (3.0, 0.8), (4.5, 0.6)], &[1.0, 0.7, 0.9], 1.0)
                .unwrap();
        let r = three.validate();
        assert!(r.pass, "{:?}", r.failures);
        assert_eq!(r.scale_extrema.len(), 4);

        let single = DeformationSchedule::preset_complex(TAU, &[(PI, 0.3)], &[PI / 2.0], 1.0).unwrap();
        assert!(single.validate().pass);
        assert!(single.validate_as(ScheduleMode::Simple).pass);
    }

    #[test]
    fn twin_minima_table_fails_validation() {
        let s = DeformationSchedule::preset_complex(TAU, &[(1.5, 0.4), (3.0, 0.8), (4.5, 0.6)], &[1.0, 0.7, 0.9], 1.0)
            .unwrap()
            .with_critical_points(vec![TAU / 4.0, TAU / 2.0, 3.0 * TAU / 4.0])
            .with_scale_table(&[(0.0, 1.0), (TAU / 4.0, 0.4), (TAU / 2.0, 0.8), (3.0 * TAU / 4.0, 0.4), (TAU, 1.0)])
            .unwrap();
        let r = s.validate();
        assert!(!r.pass && !r.unique_min);
        assert_eq!(r.into_result(), Err(Error::NonUniqueExtremum { kind: "minimum" }));
    }

    #[test]
    fn constant_schedule_has_no_extrema() {
        let r = DeformationSchedule::constant(TAU, 1.0).unwrap().validate();
        assert!(r.scale_extrema.is_empty());
        assert!(!r.pass);
    }
}
