//! Heavy-ball and stochastic momentum, their rates, and Cesàro averaging.

use rand::Rng;

use crate::error::{param, CoreError, Result};
use crate::linalg::Spectrum;
use crate::sketch::{Sketch, SketchDistribution};
use crate::solver::{exact_update, SolverState};
use crate::system::LinearSystem;

/// `x⁺ = x − ω∇f_S(x) + β(x − x_prev)` for a given sketch.
pub fn momentum_step_with(
    state: &mut SolverState,
    system: &LinearSystem,
    sketch: &Sketch,
    omega: f64,
    beta: f64,
) -> Result<()> {
    let mut next = exact_update(system, sketch, omega, &state.x)?;
    if beta != 0.0 {
        for ((n, x), p) in next.iter_mut().zip(&state.x).zip(&state.x_prev) {
            *n += beta * (x - p);
        }
    }
    state.advance(next);
    Ok(())
}

pub fn momentum_step(
    state: &mut SolverState,
    system: &LinearSystem,
    dist: &SketchDistribution,
    omega: f64,
    beta: f64,
) -> Result<()> {
    let sketch = dist.draw(&mut state.rng);
    momentum_step_with(state, system, &sketch, omega, beta)
}

/// Adds only coordinate `coord` of the momentum term, scaled by `γ`.
pub fn stochastic_momentum_step_with(
    state: &mut SolverState,
    system: &LinearSystem,
    sketch: &Sketch,
    coord: usize,
    omega: f64,
    gamma: f64,
) -> Result<()> {
    if !system.geometry().is_identity() {
        return Err(CoreError::UnsupportedGeometry);
    }
    let mut next = exact_update(system, sketch, omega, &state.x)?;
    if gamma != 0.0 {
        next[coord] += gamma * (state.x[coord] - state.x_prev[coord]);
    }
    state.advance(next);
    Ok(())
}

/// Draws the sketch, then a uniform coordinate.
pub fn stochastic_momentum_step(
    state: &mut SolverState,
    system: &LinearSystem,
    dist: &SketchDistribution,
    omega: f64,
    gamma: f64,
) -> Result<()> {
    let sketch = dist.draw(&mut state.rng);
    let coord = state.rng.gen_range(0..system.cols());
    stochastic_momentum_step_with(state, system, &sketch, coord, omega, gamma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumRate {
    pub a1: f64,
    pub a2: f64,
    pub q: f64,
    pub delta: f64,
}

impl MomentumRate {
    fn from_coefficients(a1: f64, a2: f64) -> Self {
        let q = 0.5 * (a1 + (a1 * a1 + 4.0 * a2).sqrt());
        Self {
            a1,
            a2,
            q,
            delta: q - a1,
        }
    }

    /// `q^k (1 + δ)`, the factor bounding iterate `k + 1`.
    pub fn bound_factor(&self, k: u64) -> f64 {
        self.q.powf(k as f64) * (1.0 + self.delta)
    }
}

/// Largest `β` (exclusive) with `a1 + a2 < 1`.
pub fn admissible_beta_bound(omega: f64, lambda_min_plus: f64, lambda_max: f64) -> f64 {
    let (l, lm) = (lambda_min_plus, lambda_max);
    let s = 4.0 - omega * l + omega * lm;
    (-4.0 + omega * l - omega * lm + (s * s + 16.0 * omega * (2.0 - omega) * l).sqrt()) / 8.0
}

pub fn momentum_coefficients(lambda_min_plus: f64, lambda_max: f64, omega: f64, beta: f64) -> (f64, f64) {
    let a1 = 1.0 + 3.0 * beta + 2.0 * beta * beta - (omega * (2.0 - omega) + omega * beta) * lambda_min_plus;
    let a2 = beta + 2.0 * beta * beta + omega * beta * lambda_max;
    (a1, a2)
}

/// `(a1, a2, q, δ)` for heavy-ball momentum.
pub fn momentum_rate(spectrum: &Spectrum, omega: f64, beta: f64) -> Result<MomentumRate> {
    if !(omega > 0.0 && omega < 2.0) {
        return Err(param("omega", format!("must lie in (0, 2), got {omega}")));
    }
    if !(beta >= 0.0) {
        return Err(param("beta", "must be nonnegative"));
    }
    let (a1, a2) = momentum_coefficients(spectrum.lambda_min_plus, spectrum.lambda_max, omega, beta);
    if a1 + a2 >= 1.0 {
        return Err(CoreError::Inadmissible {
            beta,
            sum: a1 + a2,
            bound: admissible_beta_bound(omega, spectrum.lambda_min_plus, spectrum.lambda_max),
        });
    }
    Ok(MomentumRate::from_coefficients(a1, a2))
}

/// Rate of stochastic momentum with parameter `γ` on `n` coordinates.
pub fn stochastic_momentum_rate(spectrum: &Spectrum, n: usize, omega: f64, gamma: f64) -> Result<MomentumRate> {
    if !(omega > 0.0 && omega < 2.0) {
        return Err(param("omega", format!("must lie in (0, 2), got {omega}")));
    }
    if !(gamma >= 0.0) {
        return Err(param("gamma", "must be nonnegative"));
    }
    let nf = n as f64;
    let (l, lm) = (spectrum.lambda_min_plus, spectrum.lambda_max);
    let a1 = 1.0 + 3.0 * gamma / nf + 2.0 * gamma * gamma / nf - (omega * (2.0 - omega) + omega * gamma / nf) * l;
    let a2 = (gamma + 2.0 * gamma * gamma + omega * gamma * lm) / nf;
    if a1 + a2 >= 1.0 {
        return Err(CoreError::Inadmissible {
            beta: gamma / nf,
            sum: a1 + a2,
            bound: f64::NAN,
        });
    }
    Ok(MomentumRate::from_coefficients(a1, a2))
}

/// Predicted total-cost ratio of heavy-ball over stochastic momentum.
pub fn speedup_ratio(n: usize, g: f64) -> f64 {
    1.0 + n as f64 / g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complexity {
    pub ratio: f64,
    pub cost_momentum: f64,
    pub cost_stochastic: f64,
}

/// `C_m = (g + n)/(1 − q(β))` and `C_sm = g/(1 − q̄(nβ))`.
pub fn smc_vs_mc_complexity(n: usize, g: f64, beta: f64, spectrum: &Spectrum, omega: f64) -> Result<Complexity> {
    if !(g >= 1.0) {
        return Err(param("g", "must be at least 1"));
    }
    let q = momentum_rate(spectrum, omega, beta)?.q;
    let qbar = stochastic_momentum_rate(spectrum, n, omega, n as f64 * beta)?.q;
    Ok(Complexity {
        ratio: speedup_ratio(n, g),
        cost_momentum: (g + n as f64) / (1.0 - q),
        cost_stochastic: g / (1.0 - qbar),
    })
}

/// Running mean of iterates.
#[derive(Debug, Clone, Default)]
pub struct CesaroAverage {
    sum: Vec<f64>,
    count: u64,
}

impl CesaroAverage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: &[f64]) {
        if self.sum.is_empty() {
            self.sum = vec![0.0; x.len()];
        }
        for (s, v) in self.sum.iter_mut().zip(x) {
            *s += v;
        }
        self.count += 1;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> Option<Vec<f64>> {
        (self.count > 0).then(|| self.sum.iter().map(|s| s / self.count as f64).collect())
    }
}

/// `(1/k) Σ xᵗ`
pub fn cesaro_average(iterates: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut acc = CesaroAverage::new();
    for x in iterates {
        acc.push(x);
    }
    acc.mean().ok_or_else(|| param("iterates", "need at least one iterate"))
}

/// Bound on `E f(x̂ᵏ)`; needs `ω + 2β < 2`.
pub fn cesaro_bound(omega: f64, beta: f64, dist0_sq: f64, f0: f64, k: u64) -> Result<f64> {
    let slack = 2.0 - 2.0 * beta - omega;
    if !(slack > 0.0) || omega <= 0.0 {
        return Err(param("omega", "needs omega > 0 and omega + 2 beta < 2"));
    }
    Ok(((1.0 - beta).powi(2) * dist0_sq + 2.0 * omega * beta * f0) / (2.0 * omega * slack * k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(l: f64, lm: f64) -> Spectrum {
        Spectrum::from_eigenvalues(vec![lm, l])
    }

    #[test]
    fn zero_beta_reduces_to_basic_rate() {
        let r = momentum_rate(&spec(0.3, 0.5), 1.0, 0.0).unwrap();
        assert!((r.q - 0.7).abs() < 1e-15);
        assert!((r.a1 - 0.7).abs() < 1e-15);
        assert_eq!(r.a2, 0.0);
        assert_eq!(r.delta, 0.0);
    }

    #[test]
    fn full_formula_example() {
        let r = momentum_rate(&spec(1.0, 1.0), 1.0, 0.1).unwrap();
        assert!((r.a1 - 0.22).abs() < 1e-12);
        assert!((r.a2 - 0.22).abs() < 1e-12);
        assert!((r.q - 0.5 * (0.22 + (0.0484f64 + 0.88).sqrt())).abs() < 1e-12);
    }

    #[test]
    fn inadmissible_reports_bound() {
        match momentum_rate(&spec(0.01, 0.1), 1.0, 0.3) {
            Err(CoreError::Inadmissible { bound, .. }) => assert!(bound > 0.0 && bound < 0.3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ratio_substitution() {
        assert_eq!(speedup_ratio(100, 100.0), 2.0);
        assert_eq!(speedup_ratio(100, 10.0), 11.0);
    }

    #[test]
    fn cesaro_small() {
        assert_eq!(
            cesaro_average(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap(),
            vec![2.0, 3.0]
        );
        assert_eq!(cesaro_average(&vec![vec![5.0]; 7]).unwrap(), vec![5.0]);
        assert!(cesaro_average(&[]).is_err());
    }
}
