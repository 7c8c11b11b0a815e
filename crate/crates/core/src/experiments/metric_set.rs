use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SimError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    pub axis_name: String,
    pub axis: Vec<f64>,
    pub values: Vec<f64>,
}

/// Named results of one simulator run. `inputs` records the numeric
/// parameters the run actually used, so a result can be checked against a
/// setup without re-running anything.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSet {
    pub scalars: BTreeMap<String, f64>,
    pub series: BTreeMap<String, Series>,
    pub inputs: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

/// Lowercase with every non-alphanumeric run collapsed to `_`.
pub fn normalize_name(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        if ch.is_alphanumeric() {
            out.extend(ch.to_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

impl MetricSet {
    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.scalars.insert(name.into(), value);
    }

    pub fn input(&mut self, name: impl Into<String>, value: f64) {
        self.inputs.insert(name.into(), value);
    }

    pub fn series(&mut self, name: impl Into<String>, axis_name: &str, axis: Vec<f64>, values: Vec<f64>) {
        debug_assert_eq!(axis.len(), values.len());
        self.series.insert(
            name.into(),
            Series {
                axis_name: axis_name.into(),
                axis,
                values,
            },
        );
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.get(name).copied()
    }

    /// Scalar lookup that panics with the missing name; for tests and examples.
    pub fn get(&self, name: &str) -> f64 {
        self.scalar(name).unwrap_or_else(|| panic!("no scalar named {name}"))
    }

    /// Whether an outcome name matches a scalar or series after normalization.
    pub fn covers(&self, outcome: &str) -> bool {
        let want = normalize_name(outcome);
        self.scalars.keys().chain(self.series.keys()).any(|k| normalize_name(k) == want)
    }

    pub fn check_finite(&self) -> Result<(), SimError> {
        for (k, v) in self.scalars.iter().chain(&self.inputs) {
            if !v.is_finite() {
                return Err(SimError::NonFinite(k.clone()));
            }
        }
        for (k, s) in &self.series {
            if s.axis.len() != s.values.len() {
                return Err(SimError::Precondition(format!("series {k} has mismatched lengths")));
            }
            if s.axis.iter().chain(&s.values).any(|v| !v.is_finite()) {
                return Err(SimError::NonFinite(k.clone()));
            }
        }
        Ok(())
    }
}

/// (max − min)/(max + min), 0 for an all-zero signal.
pub fn contrast(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max + min == 0.0 {
        0.0
    } else {
        (max - min) / (max + min)
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_normalize() {
        assert_eq!(normalize_name("CHSH"), "chsh");
        assert_eq!(normalize_name("  Fringe period (nm) "), "fringe_period_nm");
        assert_eq!(normalize_name("g2-zero"), "g2_zero");
    }

    #[test]
    fn covers_scalars_and_series() {
        let mut m = MetricSet::default();
        m.set("visibility", 0.9);
        m.series("coincidence_vs_delay", "delay_fs", vec![0.0], vec![1.0]);
        assert!(m.covers("Visibility"));
        assert!(m.covers("coincidence vs delay"));
        assert!(!m.covers("chsh"));
    }

    #[test]
    fn contrast_and_grid() {
        assert_eq!(contrast(&[0.0, 0.0]), 0.0);
        assert!((contrast(&[1.0, 3.0]) - 0.5).abs() < 1e-15);
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
