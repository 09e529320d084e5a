//! Circular extremum classification of sampled sequences.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtremumKind {
    LocalMin,
    LocalMax,
    GlobalMin,
    GlobalMax,
}

impl ExtremumKind {
    pub fn is_min(self) -> bool {
        matches!(self, ExtremumKind::LocalMin | ExtremumKind::GlobalMin)
    }
}

/// An extremum spanning `len` equal samples starting at `index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub index: usize,
    pub len: usize,
    pub kind: ExtremumKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    /// Ordered by index.
    pub items: Vec<Extremum>,
    /// Exactly one single-sample run attains the minimum.
    pub unique_min: bool,
    pub unique_max: bool,
}

impl Extrema {
    pub fn global_min(&self) -> Option<&Extremum> {
        self.items.iter().find(|e| e.kind == ExtremumKind::GlobalMin)
    }

    pub fn global_max(&self) -> Option<&Extremum> {
        self.items.iter().find(|e| e.kind == ExtremumKind::GlobalMax)
    }

    /// True when minima and maxima alternate around the circle.
    pub fn alternates(&self) -> bool {
        let n = self.items.len();
        n.is_multiple_of(2) && (0..n).all(|i| self.items[i].kind.is_min() != self.items[(i + 1) % n].kind.is_min())
    }
}

/// Rounds to 12 significant digits so noise below that is not mistaken for
/// a genuine difference.
pub fn round_significant(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

/// Treats `values` as circular. Runs of equal (rounded) values form one
/// candidate; a run lower than both neighbors is a minimum, higher than both
/// a maximum. Runs attaining the overall extreme value are global.
pub fn classify_circular(values: &[f64]) -> Extrema {
    let rounded: Vec<f64> = values.iter().map(|&v| round_significant(v)).collect();
    let n = rounded.len();
    let empty = Extrema { items: Vec::new(), unique_min: false, unique_max: false };
    if n < 3 {
        return empty;
    }
    // Start at a run boundary so no run wraps.
    let Some(start) = (0..n).find(|&i| rounded[i] != rounded[(i + n - 1) % n]) else {
        return empty;
    };
    let mut runs: Vec<(usize, usize, f64)> = Vec::new();
    for k in 0..n {
        let i = (start + k) % n;
        match runs.last_mut() {
            Some(run) if run.2 == rounded[i] => run.1 += 1,
            _ => runs.push((i, 1, rounded[i])),
        }
    }
    let lo = rounded.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = rounded.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let r = runs.len();
    let mut items = Vec::new();
    for j in 0..r {
        let (index, len, v) = runs[j];
        let prev = runs[(j + r - 1) % r].2;
        let next = runs[(j + 1) % r].2;
        let kind = if v < prev && v < next {
            if v == lo {
                ExtremumKind::GlobalMin
            } else {
                ExtremumKind::LocalMin
            }
        } else if v > prev && v > next {
            if v == hi {
                ExtremumKind::GlobalMax
            } else {
                ExtremumKind::LocalMax
            }
        } else {
            continue;
        };
        items.push(Extremum { index, len, kind });
    }
    let unique = |target: f64| {
        let hits: Vec<_> = runs.iter().filter(|run| run.2 == target).collect();
        hits.len() == 1 && hits[0].1 == 1
    };
    items.sort_by_key(|e| e.index);
    Extrema { items, unique_min: unique(lo), unique_max: unique(hi) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valley_with_seam_peak() {
        let v: Vec<f64> = (0..16).map(|i| ((i as f64) - 8.0).abs()).collect();
        let e = classify_circular(&v);
        assert_eq!(e.items.len(), 2);
        assert_eq!(e.items[0], Extremum { index: 0, len: 1, kind: ExtremumKind::GlobalMax });
        assert_eq!(e.items[1], Extremum { index: 8, len: 1, kind: ExtremumKind::GlobalMin });
        assert!(e.unique_min && e.unique_max && e.alternates());
    }

    #[test]
    fn constant_has_no_extrema() {
        let e = classify_circular(&[2.0; 10]);
        assert!(e.items.is_empty());
        assert!(!e.unique_min);
    }

    #[test]
    fn plateau_minimum_is_not_unique() {
        let e = classify_circular(&[3.0, 2.0, 1.0, 1.0, 2.0, 3.0, 4.0]);
        let min = e.global_min().unwrap();
        assert_eq!((min.index, min.len), (2, 2));
        assert!(!e.unique_min);
        assert!(e.unique_max);
    }

    #[test]
    fn noise_below_twelve_digits_is_ignored() {
        let e = classify_circular(&[1.0, 0.5, 0.5 + 1e-15, 1.0 + 1e-14, 0.8]);
        assert!(!e.unique_min);
        assert!(!e.unique_max);
    }

    #[test]
    fn twin_minima() {
        let e = classify_circular(&[1.0, 0.5, 0.9, 0.5, 1.2]);
        assert_eq!(e.items.len(), 4);
        assert!(!e.unique_min);
        assert!(e.unique_max);
        assert_eq!(e.items.iter().filter(|x| x.kind == ExtremumKind::GlobalMin).count(), 2);
    }
}
