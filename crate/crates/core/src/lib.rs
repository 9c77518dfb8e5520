//! Randomized sketch-and-project solvers for consistent linear systems `Ax = b`
//! in a `B`-weighted geometry, with momentum, acceleration, inexact inner
//! solves, and the dual ascent view.

// `!(x > 0.0)` style checks are kept so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accelerated;
pub mod duality;
pub mod error;
pub mod inexact;
pub mod linalg;
pub mod momentum;
pub mod sketch;
pub mod solver;
pub mod system;
pub mod trace;

pub use error::{CoreError, Result};
pub use linalg::{DenseMatrix, SpdMatrix, Spectrum};
pub use sketch::{Sketch, SketchDistribution};
pub use solver::{SolverConfig, SolverState, Stopping, Variant};
pub use system::LinearSystem;
pub use trace::Trace;
