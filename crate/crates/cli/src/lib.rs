//! Experiment harness: config files, problem generators, parallel trials,
//! CSV traces and plot scripts.

// `!(x > 0.0)` style checks are kept so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod output;
pub mod sweep;

pub use config::{ExperimentConfig, RawConfig};
pub use error::{HarnessError, Result};
pub use experiment::{prepare, run_experiment, Outcome, Prepared, THREADS_ENV};
pub use output::{emit_plot_script, emit_sweep_script, read_csv, write_csv, PlotStyle};
