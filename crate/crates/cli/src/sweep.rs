//! One experiment repeated over several values of a single config key.

use crate::config::{ExperimentConfig, RawConfig};
use crate::error::Result;
use crate::experiment::{median_iterations, prepare, run_prepared, Outcome};

#[derive(Debug, Clone)]
pub struct SweepPoint {
    /// `key=value`
    pub label: String,
    pub outcome: Outcome,
    /// Median iterations to the config target on `rel_error`.
    pub median: Option<f64>,
}

/// All variants are parsed and built before the first run.
pub fn sweep(raw: &RawConfig, key: &str, values: &[&str]) -> Result<Vec<SweepPoint>> {
    let mut planned = Vec::with_capacity(values.len());
    for v in values {
        let mut r = raw.clone();
        r.set(key, *v);
        let config = ExperimentConfig::from_raw(&r)?;
        let prepared = prepare(&config)?;
        planned.push((format!("{key}={v}"), config, prepared));
    }
    planned
        .into_iter()
        .map(|(label, config, prepared)| {
            let outcome = run_prepared(&prepared, &config)?;
            let median = config
                .stopping
                .target
                .and_then(|t| median_iterations(&outcome.trace, "rel_error", t));
            Ok(SweepPoint { label, outcome, median })
        })
        .collect()
}
