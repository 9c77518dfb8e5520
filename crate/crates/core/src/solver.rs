//! The basic sketch-and-project iteration, its rate, and run orchestration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::accelerated::{acc_step, normalize_rows, AccParams, AccState};
use crate::error::{param, CoreError, Result};
use crate::inexact::{ibasic_step, InexactnessSpec};
use crate::linalg::{dot, pseudoinverse, SpdMatrix};
use crate::momentum::{momentum_step, stochastic_momentum_step};
use crate::sketch::{Sketch, SketchDistribution};
use crate::system::{expected_objective, LinearSystem};
use crate::trace::Trace;

/// Independent stream for `(seed, trial)`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub x: Vec<f64>,
    pub x_prev: Vec<f64>,
    pub iteration: u64,
    pub rng: ChaCha8Rng,
}

impl SolverState {
    /// Starts with `x_prev = x0`.
    pub fn new(x0: Vec<f64>, rng: ChaCha8Rng) -> Self {
        Self {
            x_prev: x0.clone(),
            x: x0,
            iteration: 0,
            rng,
        }
    }

    pub fn seeded(x0: Vec<f64>, seed: u64, trial: usize) -> Self {
        Self::new(x0, trial_rng(seed, trial))
    }

    pub(crate) fn advance(&mut self, next: Vec<f64>) {
        self.x_prev = std::mem::replace(&mut self.x, next);
        self.iteration += 1;
    }
}

/// `x − ω∇f_S(x)` for a given sketch.
///
/// Single-row sketches on identity or diagonal geometries take a scalar path
/// whose operation order the gossip protocols reproduce exactly.
pub fn exact_update(system: &LinearSystem, sketch: &Sketch, omega: f64, x: &[f64]) -> Result<Vec<f64>> {
    if let (Sketch::Indices(c), Some(invw)) = (sketch, system.inverse_weights()) {
        if c.len() == 1 {
            let i = c[0];
            let row = system.a().row(i);
            let r = dot(row, x) - system.b()[i];
            let mut denom = 0.0;
            for (a, w) in row.iter().zip(invw) {
                denom += (a * a) * w;
            }
            let t = if denom > 0.0 { (omega * r) / denom } else { 0.0 };
            return Ok(x
                .iter()
                .zip(row)
                .zip(invw)
                .map(|((xl, a), w)| xl - (t * a) * w)
                .collect());
        }
    }
    let rows = system.sketch_rows(sketch);
    let gap = rows.residual_gap(x);
    let lam = if gap.len() == 1 {
        let m = dot(rows.rows.row(0), rows.rows_binv.row(0));
        vec![if m > 0.0 { gap[0] / m } else { 0.0 }]
    } else {
        pseudoinverse(&rows.inner_matrix())?.matvec(&gap)
    };
    let inc = rows.lift(&lam);
    Ok(x.iter().zip(&inc).map(|(xl, d)| xl + omega * d).collect())
}

/// One step with a caller-supplied sketch.
pub fn basic_step_with(state: &mut SolverState, system: &LinearSystem, sketch: &Sketch, omega: f64) -> Result<()> {
    let next = exact_update(system, sketch, omega, &state.x)?;
    state.advance(next);
    Ok(())
}

/// `x⁺ = x − ω B⁻¹AᵀS(SᵀAB⁻¹AᵀS)†Sᵀ(Ax − b)` with a fresh sketch.
pub fn basic_step(state: &mut SolverState, system: &LinearSystem, dist: &SketchDistribution, omega: f64) -> Result<()> {
    let sketch = dist.draw(&mut state.rng);
    basic_step_with(state, system, &sketch, omega)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePrediction {
    pub rho: f64,
}

impl RatePrediction {
    /// Iterations `k ≥ log(1/ε)/(1 − ρ)` sufficient for relative error `ε`.
    pub fn iteration_bound(&self, eps: f64) -> u64 {
        ((1.0 / eps).ln() / (1.0 - self.rho)).ceil().max(0.0) as u64
    }
}

/// `ρ = 1 − ω(2 − ω)λ⁺min`
pub fn predicted_rate(lambda_min_plus: f64, omega: f64) -> Result<RatePrediction> {
    if !(omega > 0.0 && omega < 2.0) {
        return Err(param("omega", format!("must lie in (0, 2), got {omega}")));
    }
    Ok(RatePrediction {
        rho: 1.0 - omega * (2.0 - omega) * lambda_min_plus,
    })
}

#[derive(Debug, Clone)]
pub enum Variant {
    Basic,
    Momentum { beta: f64 },
    StochasticMomentum { gamma: f64 },
    Accelerated(AccParams),
    Inexact(InexactnessSpec),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub omega: f64,
    pub variant: Variant,
    pub seed: u64,
    pub trial: usize,
}

impl SolverConfig {
    pub fn basic(omega: f64, seed: u64) -> Self {
        Self {
            omega,
            variant: Variant::Basic,
            seed,
            trial: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stopping {
    pub max_iterations: u64,
    pub target: Option<f64>,
    pub record_every: u64,
}

impl Stopping {
    pub fn iterations(max_iterations: u64) -> Self {
        Self {
            max_iterations,
            target: None,
            record_every: 1,
        }
    }
}

/// Named scalar computed from the current iterate.
pub struct MetricHook {
    pub name: String,
    pub f: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl MetricHook {
    pub fn new(name: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Box::new(f),
        }
    }
}

impl std::fmt::Debug for MetricHook {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricHook").field("name", &self.name).finish()
    }
}

/// Supports larger than this skip the `f` metric.
const F_METRIC_SUPPORT: usize = 20_000;

enum Engine {
    Plain(SolverState),
    Acc(AccState, LinearSystem),
}

impl Engine {
    fn x(&self) -> &[f64] {
        match self {
            Self::Plain(s) => &s.x,
            Self::Acc(s, _) => &s.x,
        }
    }
}

/// Runs the configured variant from `x0`, recording relative error, `f`
/// where `E[Z]` has a small finite support, and any hooks.
pub fn run(
    system: &LinearSystem,
    dist: &SketchDistribution,
    config: &SolverConfig,
    x0: &[f64],
    stopping: &Stopping,
    hooks: &[MetricHook],
) -> Result<Trace> {
    if x0.len() != system.cols() {
        return Err(CoreError::DimensionMismatch {
            expected: system.cols(),
            got: x0.len(),
        });
    }
    if dist.rows() != system.rows() {
        return Err(CoreError::DimensionMismatch {
            expected: system.rows(),
            got: dist.rows(),
        });
    }
    if stopping.record_every == 0 {
        return Err(param("record_every", "must be positive"));
    }
    let omega = config.omega;
    let x_star = system.project(x0);
    let geometry: &SpdMatrix = system.geometry();
    let e0 = geometry.norm_sq(&crate::linalg::sub(x0, &x_star));
    let rel = |x: &[f64]| {
        if e0 == 0.0 {
            0.0
        } else {
            geometry.norm_sq(&crate::linalg::sub(x, &x_star)) / e0
        }
    };
    let ez = match dist.support() {
        Some(s) if s.len() <= F_METRIC_SUPPORT => Some(system.expected_z(dist)?),
        _ => None,
    };

    let rng = trial_rng(config.seed, config.trial);
    let mut engine = match &config.variant {
        Variant::Accelerated(_) => {
            if !system.geometry().is_identity() {
                return Err(CoreError::UnsupportedGeometry);
            }
            Engine::Acc(AccState::new(x0.to_vec(), rng), normalize_rows(system)?)
        }
        Variant::StochasticMomentum { .. } if !system.geometry().is_identity() => {
            return Err(CoreError::UnsupportedGeometry);
        }
        _ => Engine::Plain(SolverState::new(x0.to_vec(), rng)),
    };

    let mut trace = Trace::new();
    let record = |trace: &mut Trace, k: u64, x: &[f64], r: f64| {
        trace.push(config.trial, k, "rel_error", r);
        if let Some(ez) = &ez {
            trace.push(config.trial, k, "f", expected_objective(ez, x, &x_star));
        }
        for h in hooks {
            trace.push(config.trial, k, &h.name, (h.f)(x));
        }
    };

    let mut k = 0;
    let mut r = rel(engine.x());
    record(&mut trace, 0, engine.x(), r);
    let reached = |r: f64| stopping.target.is_some_and(|t| r <= t);
    while k < stopping.max_iterations && !reached(r) {
        match (&mut engine, &config.variant) {
            (Engine::Plain(s), Variant::Basic) => basic_step(s, system, dist, omega)?,
            (Engine::Plain(s), Variant::Momentum { beta }) => momentum_step(s, system, dist, omega, *beta)?,
            (Engine::Plain(s), Variant::StochasticMomentum { gamma }) => {
                stochastic_momentum_step(s, system, dist, omega, *gamma)?
            }
            (Engine::Plain(s), Variant::Inexact(spec)) => ibasic_step(s, system, dist, omega, spec, &x_star)?,
            (Engine::Acc(s, normalized), Variant::Accelerated(p)) => acc_step(s, normalized, p)?,
            _ => unreachable!("engine matches variant"),
        }
        k += 1;
        r = rel(engine.x());
        if !r.is_finite() {
            return Err(CoreError::Numerical(format!("iterate diverged at iteration {k}")));
        }
        if k % stopping.record_every == 0 || k == stopping.max_iterations || reached(r) {
            record(&mut trace, k, engine.x(), r);
        }
    }
    Ok(trace)
}
