//! The dual of the best-approximation problem and dual subspace ascent.

use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{self, dot, pseudoinverse};
use crate::sketch::{Sketch, SketchDistribution};
use crate::system::LinearSystem;

#[derive(Debug, Clone)]
pub struct DualState {
    pub y: Vec<f64>,
    pub y_prev: Vec<f64>,
    pub x0: Vec<f64>,
    pub iteration: u64,
    pub rng: ChaCha8Rng,
}

impl DualState {
    /// `y⁰ = y¹ = 0`.
    pub fn new(x0: Vec<f64>, m: usize, rng: ChaCha8Rng) -> Self {
        Self {
            y: vec![0.0; m],
            y_prev: vec![0.0; m],
            x0,
            iteration: 0,
            rng,
        }
    }

    pub fn primal(&self, system: &LinearSystem) -> Vec<f64> {
        primal_from_dual(system, &self.x0, &self.y)
    }

    pub(crate) fn advance(&mut self, next: Vec<f64>) {
        self.y_prev = std::mem::replace(&mut self.y, next);
        self.iteration += 1;
    }
}

/// `φ(y) = x⁰ + B⁻¹Aᵀy`
pub fn primal_from_dual(system: &LinearSystem, x0: &[f64], y: &[f64]) -> Vec<f64> {
    let lift = system.geometry().solve(&system.a().tr_matvec(y));
    x0.iter().zip(&lift).map(|(a, b)| a + b).collect()
}

/// `D(y) = (b − Ax⁰)ᵀy − ½‖Aᵀy‖²_{B⁻¹}`
pub fn dual_value(system: &LinearSystem, x0: &[f64], y: &[f64]) -> f64 {
    let r = system.residual(x0);
    let aty = system.a().tr_matvec(y);
    -dot(&r, y) - 0.5 * dot(&aty, &system.geometry().solve(&aty))
}

/// Least-norm maximizer `(AB⁻¹Aᵀ)†(b − Ax⁰)`.
pub fn optimal_dual(system: &LinearSystem, x0: &[f64]) -> Vec<f64> {
    let gap = linalg::scaled(-1.0, &system.residual(x0));
    let kp = system.k_pinv();
    kp.tr_matvec(&kp.matvec(&gap))
}

/// `D(y*) − D(y)`, evaluated as `½‖φ(y*) − φ(y)‖²_B`.
pub fn dual_suboptimality(system: &LinearSystem, x0: &[f64], y: &[f64]) -> f64 {
    let x_star = system.project(x0);
    let x = primal_from_dual(system, x0, y);
    0.5 * system.geometry().norm_sq(&linalg::sub(&x_star, &x))
}

/// The multiplier `λ = (SᵀAB⁻¹AᵀS)†Sᵀ(b − Ax)`.
pub(crate) fn exact_multiplier(system: &LinearSystem, sketch: &Sketch, x: &[f64]) -> Result<Vec<f64>> {
    let rows = system.sketch_rows(sketch);
    let gap = rows.residual_gap(x);
    if gap.len() == 1 {
        let m = dot(rows.rows.row(0), rows.rows_binv.row(0));
        return Ok(vec![if m > 0.0 { gap[0] / m } else { 0.0 }]);
    }
    Ok(pseudoinverse(&rows.inner_matrix())?.matvec(&gap))
}

/// `y += scale · Sλ`
pub(crate) fn add_sketched(y: &mut [f64], sketch: &Sketch, scale: f64, lambda: &[f64]) {
    match sketch {
        Sketch::Indices(c) => {
            for (&i, l) in c.iter().zip(lambda) {
                y[i] += scale * l;
            }
        }
        Sketch::Dense(s) => linalg::axpy(scale * lambda[0], s, y),
    }
}

/// `y⁺ = y + ωSλ + β(y − y_prev)` with a given sketch.
pub fn msdsa_step_with(
    state: &mut DualState,
    system: &LinearSystem,
    sketch: &Sketch,
    omega: f64,
    beta: f64,
) -> Result<()> {
    let x = state.primal(system);
    let lam = exact_multiplier(system, sketch, &x)?;
    let mut next = state.y.clone();
    add_sketched(&mut next, sketch, omega, &lam);
    if beta != 0.0 {
        for ((n, y), p) in next.iter_mut().zip(&state.y).zip(&state.y_prev) {
            *n += beta * (y - p);
        }
    }
    state.advance(next);
    Ok(())
}

pub fn sdsa_step_with(state: &mut DualState, system: &LinearSystem, sketch: &Sketch, omega: f64) -> Result<()> {
    msdsa_step_with(state, system, sketch, omega, 0.0)
}

pub fn sdsa_step(state: &mut DualState, system: &LinearSystem, dist: &SketchDistribution, omega: f64) -> Result<()> {
    let sketch = dist.draw(&mut state.rng);
    sdsa_step_with(state, system, &sketch, omega)
}

pub fn msdsa_step(
    state: &mut DualState,
    system: &LinearSystem,
    dist: &SketchDistribution,
    omega: f64,
    beta: f64,
) -> Result<()> {
    let sketch = dist.draw(&mut state.rng);
    msdsa_step_with(state, system, &sketch, omega, beta)
}
