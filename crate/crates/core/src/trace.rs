//! Per-iteration metric records.

use std::collections::BTreeMap;

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub trial: usize,
    pub iteration: u64,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    records: Vec<Record>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records(records: Vec<Record>) -> Self {
        Self { records }
    }

    pub fn push(&mut self, trial: usize, iteration: u64, metric: &str, value: f64) {
        self.records.push(Record {
            trial,
            iteration,
            metric: metric.to_string(),
            value,
        });
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn extend(&mut self, other: Trace) {
        self.records.extend(other.records);
    }

    /// Metric ids in first-appearance order.
    pub fn metrics(&self) -> Vec<String> {
        let mut seen = Vec::<String>::new();
        for r in &self.records {
            if !seen.contains(&r.metric) {
                seen.push(r.metric.clone());
            }
        }
        seen
    }

    pub fn trials(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.records.iter().map(|r| r.trial).collect();
        t.sort_unstable();
        t.dedup();
        t
    }

    pub fn series(&self, trial: usize, metric: &str) -> Vec<(u64, f64)> {
        self.records
            .iter()
            .filter(|r| r.trial == trial && r.metric == metric)
            .map(|r| (r.iteration, r.value))
            .collect()
    }

    /// Mean over trials at each recorded iteration.
    pub fn mean_series(&self, metric: &str) -> Vec<(u64, f64)> {
        let mut acc: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
        for r in self.records.iter().filter(|r| r.metric == metric) {
            let e = acc.entry(r.iteration).or_insert((0.0, 0));
            e.0 += r.value;
            e.1 += 1;
        }
        acc.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect()
    }

    /// Checks finite values and strictly increasing iterations per trial and metric.
    pub fn validate(&self) -> Result<()> {
        let mut last: BTreeMap<(usize, &str), u64> = BTreeMap::new();
        for r in &self.records {
            if !r.value.is_finite() {
                return Err(CoreError::Numerical(format!(
                    "non-finite {} at trial {} iteration {}",
                    r.metric, r.trial, r.iteration
                )));
            }
            if let Some(prev) = last.insert((r.trial, r.metric.as_str()), r.iteration) {
                if prev >= r.iteration {
                    return Err(CoreError::InvalidInput(format!(
                        "iterations not increasing for {} in trial {}",
                        r.metric, r.trial
                    )));
                }
            }
        }
        Ok(())
    }

    /// Stable order by trial, keeping each trial's record order.
    pub fn sort_by_trial(&mut self) {
        self.records.sort_by_key(|r| r.trial);
    }
}

/// Least-squares fit of `log v` against `k`; returns the per-step factor `exp(slope)`.
/// Points with nonpositive values are skipped.
pub fn geometric_fit(points: &[(u64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, v)| *v > 0.0 && v.is_finite())
        .map(|(k, v)| (*k as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some((sxy / sxx).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_factor() {
        let pts: Vec<(u64, f64)> = (0..50).map(|k| (k, 3.0 * 0.9f64.powi(k as i32))).collect();
        assert!((geometric_fit(&pts).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn validate_catches_order() {
        let mut t = Trace::new();
        t.push(0, 1, "a", 1.0);
        t.push(0, 1, "b", 1.0);
        assert!(t.validate().is_ok());
        t.push(0, 1, "a", 1.0);
        assert!(t.validate().is_err());
    }

    #[test]
    fn mean_over_trials() {
        let mut t = Trace::new();
        t.push(0, 0, "e", 1.0);
        t.push(1, 0, "e", 3.0);
        assert_eq!(t.mean_series("e"), vec![(0, 2.0)]);
    }
}
