//! Inexact sketch-and-project: injected errors and approximate inner solves.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::duality::{add_sketched, exact_multiplier, DualState};
use crate::error::{param, CoreError, Result};
use crate::linalg::{self, dot, DenseMatrix, Spectrum};
use crate::sketch::{Sketch, SketchDistribution};
use crate::solver::{exact_update, SolverState};
use crate::system::LinearSystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaSchedule {
    Constant(f64),
    /// `σ_k = a · ratioᵏ`
    Geometric {
        a: f64,
        ratio: f64,
    },
}

impl SigmaSchedule {
    pub fn sigma(&self, k: u64) -> f64 {
        match *self {
            Self::Constant(s) => s,
            Self::Geometric { a, ratio } => a * ratio.powf(k as f64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolver {
    Cg,
    SketchProject,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InexactnessSpec {
    AbstractBounded(SigmaSchedule),
    NormProportional(f64),
    FunctionProportional(f64),
    StructuredInner { inner: InnerSolver, r: usize },
}

impl InexactnessSpec {
    /// Checks the parameter ranges under which the rate results hold.
    /// `rho` is the exact method's rate, needed for `NormProportional`.
    pub fn validate(&self, omega: f64, rho: Option<f64>) -> Result<()> {
        match *self {
            Self::AbstractBounded(SigmaSchedule::Constant(s)) if !(s >= 0.0) => {
                Err(param("sigma", "must be nonnegative"))
            }
            Self::AbstractBounded(SigmaSchedule::Geometric { a, ratio }) if !(a >= 0.0 && ratio >= 0.0) => {
                Err(param("sigma", "geometric schedule needs a >= 0 and ratio >= 0"))
            }
            Self::NormProportional(q) => {
                let upper = rho.map_or(1.0, |r| 1.0 - r.sqrt());
                if q >= 0.0 && q < upper {
                    Ok(())
                } else {
                    Err(param("q", format!("must lie in [0, {upper:.6}), got {q}")))
                }
            }
            Self::FunctionProportional(q) => {
                let upper = (omega * (2.0 - omega)).sqrt();
                if q > 0.0 && q < upper {
                    Ok(())
                } else {
                    Err(param("q", format!("must lie in (0, {upper:.6}), got {q}")))
                }
            }
            _ => Ok(()),
        }
    }
}

/// `r` conjugate-gradient iterations on `Mλ = d` from `λ₀ = 0`.
pub fn inner_cg(m: &DenseMatrix, d: &[f64], r: usize) -> Result<Vec<f64>> {
    let spec = Spectrum::of_symmetric(m)?;
    if spec.rank < m.rows() || spec.lambda_max <= 0.0 {
        return Err(CoreError::NotPositiveDefinite);
    }
    let n = d.len();
    let mut lam = vec![0.0; n];
    let mut res = d.to_vec();
    let mut p = res.clone();
    let mut rs = dot(&res, &res);
    let floor = (1e-15 * linalg::norm(d)).powi(2);
    for _ in 0..r {
        if rs <= floor {
            break;
        }
        let mp = m.matvec(&p);
        let a = rs / dot(&p, &mp);
        linalg::axpy(a, &p, &mut lam);
        linalg::axpy(-a, &mp, &mut res);
        let rs_new = dot(&res, &res);
        let b = rs_new / rs;
        for (pi, ri) in p.iter_mut().zip(&res) {
            *pi = ri + b * *pi;
        }
        rs = rs_new;
    }
    Ok(lam)
}

/// `r` randomized Kaczmarz iterations on `Mλ = d` from `λ₀ = 0`, rows
/// sampled proportionally to their squared norms.
pub fn inner_sketch_project<R: Rng + ?Sized>(m: &DenseMatrix, d: &[f64], r: usize, rng: &mut R) -> Result<Vec<f64>> {
    let mut lam = vec![0.0; d.len()];
    if r == 0 {
        return Ok(lam);
    }
    let norms: Vec<f64> = (0..m.rows()).map(|i| linalg::norm_sq(m.row(i))).collect();
    let total: f64 = norms.iter().sum();
    if total == 0.0 {
        return Ok(lam);
    }
    let dist = SketchDistribution::coordinate(norms.iter().map(|v| v / total).collect()).or_else(|_| {
        // renormalize away rounding before validating
        let p: Vec<f64> = norms.iter().map(|v| v / total).collect();
        let s: f64 = p.iter().sum();
        SketchDistribution::coordinate(p.iter().map(|v| v / s).collect())
    })?;
    for _ in 0..r {
        let i = match dist.draw(rng) {
            Sketch::Indices(c) => c[0],
            Sketch::Dense(_) => unreachable!(),
        };
        let row = m.row(i);
        let t = (dot(row, &lam) - d[i]) / norms[i];
        linalg::axpy(-t, row, &mut lam);
    }
    Ok(lam)
}

/// `((√κ − 1)/(√κ + 1))⁴` for positive definite `M`.
pub fn cg_contraction(m: &DenseMatrix) -> Result<f64> {
    let s = Spectrum::of_symmetric(m)?;
    if s.rank < m.rows() {
        return Err(CoreError::NotPositiveDefinite);
    }
    let k = s.condition_number().sqrt();
    Ok(((k - 1.0) / (k + 1.0)).powi(4))
}

/// `1 − λ⁺min(MᵀM)/‖M‖²_F`
pub fn sketch_project_contraction(m: &DenseMatrix) -> Result<f64> {
    let g = m.transpose().matmul(m)?;
    let s = Spectrum::of_symmetric(&g)?;
    Ok(1.0 - s.lambda_min_plus / m.frobenius_norm_sq())
}

/// Worst inner contraction over the support of `dist`.
pub fn structured_theta(system: &LinearSystem, dist: &SketchDistribution, inner: InnerSolver) -> Result<f64> {
    let support = dist.support().ok_or(CoreError::UnsupportedClosedForm)?;
    let mut theta: f64 = 0.0;
    for (s, _) in support {
        let m = system.sketch_rows(&s).inner_matrix();
        let t = match inner {
            InnerSolver::Cg => cg_contraction(&m)?,
            InnerSolver::SketchProject => sketch_project_contraction(&m)?,
        };
        theta = theta.max(t);
    }
    Ok(theta)
}

/// `1 − (1 − θʳ)λ⁺min`
pub fn structured_rate(lambda_min_plus: f64, theta: f64, r: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&theta) {
        return Err(param("theta", format!("must lie in [0, 1), got {theta}")));
    }
    Ok(1.0 - (1.0 - theta.powi(r as i32)) * lambda_min_plus)
}

fn inner_solve(m: &DenseMatrix, d: &[f64], inner: InnerSolver, r: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    match inner {
        InnerSolver::Cg => inner_cg(m, d, r),
        InnerSolver::SketchProject => inner_sketch_project(m, d, r, rng),
    }
}

/// Random error in `Range(B⁻¹Aᵀ)` with `‖ε‖_B = sigma`. When `orthogonal_to`
/// is given the direction is made `B`-orthogonal to it.
pub fn abstract_error<R: Rng + ?Sized>(
    system: &LinearSystem,
    sigma: f64,
    orthogonal_to: Option<&[f64]>,
    rng: &mut R,
) -> Vec<f64> {
    let n = system.cols();
    if sigma == 0.0 {
        return vec![0.0; n];
    }
    let mut dir = system.random_range_direction(rng);
    if let Some(u) = orthogonal_to {
        let b = system.geometry();
        let uu = b.norm_sq(u);
        if uu > 0.0 {
            let c = b.inner(&dir, u) / uu;
            linalg::axpy(-c, u, &mut dir);
            let len = b.norm_sq(&dir).sqrt();
            if len <= 1e-12 {
                return vec![0.0; n];
            }
            dir = linalg::scaled(1.0 / len, &dir);
        }
    }
    linalg::scaled(sigma, &dir)
}

/// Exact step plus the spec's error. Returns the next iterate.
fn inexact_next(
    system: &LinearSystem,
    sketch: &Sketch,
    omega: f64,
    spec: &InexactnessSpec,
    x: &[f64],
    x_star: &[f64],
    k: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    match spec {
        InexactnessSpec::StructuredInner { inner, r } => {
            let rows = system.sketch_rows(sketch);
            let lam = inner_solve(&rows.inner_matrix(), &rows.residual_gap(x), *inner, *r, rng)?;
            let inc = rows.lift(&lam);
            Ok(x.iter().zip(&inc).map(|(a, d)| a + omega * d).collect())
        }
        _ => {
            let mut next = exact_update(system, sketch, omega, x)?;
            let err = primal_error(system, sketch, spec, x, &next, x_star, k, rng)?;
            linalg::axpy(1.0, &err, &mut next);
            Ok(next)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn primal_error(
    system: &LinearSystem,
    sketch: &Sketch,
    spec: &InexactnessSpec,
    x: &[f64],
    exact_next: &[f64],
    x_star: &[f64],
    k: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let b = system.geometry();
    Ok(match *spec {
        InexactnessSpec::AbstractBounded(s) => abstract_error(system, s.sigma(k), None, rng),
        InexactnessSpec::NormProportional(q) => {
            let sigma = q * b.norm_sq(&linalg::sub(x, x_star)).sqrt();
            abstract_error(system, sigma, None, rng)
        }
        InexactnessSpec::FunctionProportional(q) => {
            let f = system.stochastic_objective(sketch, x)?.max(0.0);
            let sigma = q * (2.0 * f).sqrt();
            let u = linalg::sub(exact_next, x_star);
            abstract_error(system, sigma, Some(&u), rng)
        }
        InexactnessSpec::StructuredInner { .. } => unreachable!("structured errors arise from the inner solve"),
    })
}

/// iBasic with a caller-supplied sketch and additive error.
pub fn ibasic_step_with(
    state: &mut SolverState,
    system: &LinearSystem,
    sketch: &Sketch,
    omega: f64,
    error: &[f64],
) -> Result<()> {
    let mut next = exact_update(system, sketch, omega, &state.x)?;
    linalg::axpy(1.0, error, &mut next);
    state.advance(next);
    Ok(())
}

/// One inexact step. `x_star` is the limit `Π_{L,B}(x⁰)`.
pub fn ibasic_step(
    state: &mut SolverState,
    system: &LinearSystem,
    dist: &SketchDistribution,
    omega: f64,
    spec: &InexactnessSpec,
    x_star: &[f64],
) -> Result<()> {
    if let InexactnessSpec::FunctionProportional(_) | InexactnessSpec::NormProportional(_) = spec {
        spec.validate(omega, None)?;
    }
    let sketch = dist.draw(&mut state.rng);
    let k = state.iteration;
    let next = inexact_next(system, &sketch, omega, spec, &state.x, x_star, k, &mut state.rng)?;
    state.advance(next);
    Ok(())
}

/// iSDSA with a caller-supplied sketch and dual error.
pub fn isdsa_step_with(
    state: &mut DualState,
    system: &LinearSystem,
    sketch: &Sketch,
    omega: f64,
    dual_error: &[f64],
) -> Result<()> {
    let x = state.primal(system);
    let lam = exact_multiplier(system, sketch, &x)?;
    let mut next = state.y.clone();
    add_sketched(&mut next, sketch, omega, &lam);
    linalg::axpy(1.0, dual_error, &mut next);
    state.advance(next);
    Ok(())
}

/// One inexact dual step. Draws from the RNG in the same order as
/// [`ibasic_step`], and its dual error maps to the primal error of that step.
pub fn isdsa_step(
    state: &mut DualState,
    system: &LinearSystem,
    dist: &SketchDistribution,
    omega: f64,
    spec: &InexactnessSpec,
    x_star: &[f64],
) -> Result<()> {
    if let InexactnessSpec::FunctionProportional(_) | InexactnessSpec::NormProportional(_) = spec {
        spec.validate(omega, None)?;
    }
    let sketch = dist.draw(&mut state.rng);
    let k = state.iteration;
    let x = state.primal(system);
    let mut next = state.y.clone();
    match spec {
        InexactnessSpec::StructuredInner { inner, r } => {
            let rows = system.sketch_rows(&sketch);
            let lam = inner_solve(&rows.inner_matrix(), &rows.residual_gap(&x), *inner, *r, &mut state.rng)?;
            add_sketched(&mut next, &sketch, omega, &lam);
        }
        _ => {
            let lam = exact_multiplier(system, &sketch, &x)?;
            let exact = exact_update(system, &sketch, omega, &x)?;
            let err = primal_error(system, &sketch, spec, &x, &exact, x_star, k, &mut state.rng)?;
            add_sketched(&mut next, &sketch, omega, &lam);
            linalg::axpy(1.0, &system.dual_preimage(&err), &mut next);
        }
    }
    state.advance(next);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn cg_trivial_cases() {
        let m = DenseMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(inner_cg(&m, &[0.0, 0.0], 5).unwrap(), vec![0.0, 0.0]);
        let l = inner_cg(&m, &[1.0, 2.0], 2).unwrap();
        let r = m.matvec(&l);
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cg_rejects_singular() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(inner_cg(&m, &[1.0, 1.0], 3), Err(CoreError::NotPositiveDefinite));
    }

    #[test]
    fn sp_zero_iterations() {
        let m = DenseMatrix::identity(3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            inner_sketch_project(&m, &[1.0, 2.0, 3.0], 0, &mut rng).unwrap(),
            vec![0.0; 3]
        );
    }

    #[test]
    fn rate_substitution() {
        assert!((structured_rate(0.4, 0.25, 2).unwrap() - 0.625).abs() < 1e-15);
        assert_eq!(structured_rate(0.4, 0.25, 0).unwrap(), 1.0);
        assert!((structured_rate(0.4, 1e-9, 3).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn validate_ranges() {
        assert!(InexactnessSpec::NormProportional(0.1).validate(1.0, Some(0.64)).is_ok());
        assert!(InexactnessSpec::NormProportional(0.25)
            .validate(1.0, Some(0.64))
            .is_err());
        assert!(InexactnessSpec::FunctionProportional(0.0).validate(1.0, None).is_err());
        assert!(InexactnessSpec::FunctionProportional(0.99).validate(1.0, None).is_ok());
        assert!(InexactnessSpec::FunctionProportional(1.0).validate(1.0, None).is_err());
    }
}
