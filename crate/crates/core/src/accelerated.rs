//! Nesterov-accelerated randomized Kaczmarz on row-normalized systems.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{param, CoreError, Result};
use crate::linalg::{dot, norm, symmetric_eigen, DenseMatrix, Spectrum};
use crate::system::LinearSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccOption {
    /// Iteration-dependent sequences from a lower bound `λ` on `λ⁺min(AᵀA)`.
    One,
    /// Constant sequences from `ν` and `λ⁺min(W)`, `W = AᵀA/m`.
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccParams {
    pub option: AccOption,
    pub m: usize,
    pub lambda: f64,
    pub nu: f64,
    pub lambda_min_plus_w: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AccParams {
    /// `(α_k, β_k, γ_k)` given `γ_{k−1}`. Option Two ignores `gamma_prev`.
    pub fn coefficients(&self, gamma_prev: f64) -> (f64, f64, f64) {
        match self.option {
            AccOption::Two => (self.alpha, self.beta, self.gamma),
            AccOption::One => {
                let m = self.m as f64;
                let lam = self.lambda;
                let g = option_one_root(m, lam, gamma_prev);
                let alpha = (m - g * lam) / (g * (m * m - lam));
                let beta = 1.0 - g * lam / m;
                (alpha, beta, g)
            }
        }
    }

    /// Contraction `1 − √(λ⁺min(W)/ν)` of the Option Two Lyapunov function.
    pub fn lyapunov_rate(&self) -> f64 {
        1.0 - (self.lambda_min_plus_w / self.nu).sqrt()
    }
}

/// Larger root of `γ² − γ/m = (1 − γλ/m)γ_prev²`.
pub fn option_one_root(m: f64, lambda: f64, gamma_prev: f64) -> f64 {
    let g2 = gamma_prev * gamma_prev;
    let b = (lambda * g2 - 1.0) / m;
    let disc = (b * b + 4.0 * g2).sqrt();
    if b > 0.0 {
        2.0 * g2 / (b + disc)
    } else {
        0.5 * (disc - b)
    }
}

/// Largest admissible `ν`: `min{m, 1/λ⁺min(W)}`.
pub fn default_nu(m: usize, w_spectrum: &Spectrum) -> f64 {
    (m as f64).min(1.0 / w_spectrum.lambda_min_plus)
}

/// `value` is `λ` for Option One and `ν` for Option Two; `w_spectrum` is the
/// spectrum of `AᵀA/m` for the row-normalized matrix.
pub fn acc_params(option: AccOption, m: usize, value: f64, w_spectrum: &Spectrum) -> Result<AccParams> {
    let lmin = w_spectrum.lambda_min_plus;
    if !(lmin > 0.0) {
        return Err(param("spectrum", "lambda_min_plus must be positive"));
    }
    let mf = m as f64;
    match option {
        AccOption::One => {
            let upper = mf * lmin;
            if !(value >= 0.0 && value <= upper * (1.0 + 1e-12)) {
                return Err(param("lambda", format!("must lie in [0, {upper:.6e}], got {value}")));
            }
            Ok(AccParams {
                option,
                m,
                lambda: value,
                nu: f64::NAN,
                lambda_min_plus_w: lmin,
                alpha: f64::NAN,
                beta: f64::NAN,
                gamma: f64::NAN,
            })
        }
        AccOption::Two => {
            let upper = mf.min(1.0 / lmin);
            if !(value >= 1.0 - 1e-12 && value <= upper * (1.0 + 1e-12)) {
                return Err(param("nu", format!("must lie in [1, {upper:.6e}], got {value}")));
            }
            let beta = 1.0 - (lmin / value).sqrt();
            let gamma = (1.0 / (lmin * value)).sqrt();
            let alpha = 1.0 / (1.0 + gamma * value);
            Ok(AccParams {
                option,
                m,
                lambda: f64::NAN,
                nu: value,
                lambda_min_plus_w: lmin,
                alpha,
                beta,
                gamma,
            })
        }
    }
}

/// Spectrum of `AᵀA/m`.
pub fn w_spectrum(a: &DenseMatrix) -> Result<Spectrum> {
    let g = a.transpose().matmul(a)?;
    Spectrum::of_symmetric(&g.scale(1.0 / a.rows() as f64))
}

/// Rescales each row (and `b`) to unit norm. Rows already within `1e-12`
/// of unit norm are left untouched.
pub fn normalize_rows(system: &LinearSystem) -> Result<LinearSystem> {
    let a = system.a();
    let mut data = Vec::with_capacity(a.rows() * a.cols());
    let mut b = system.b().to_vec();
    let mut changed = false;
    for i in 0..a.rows() {
        let row = a.row(i);
        let len = norm(row);
        if len == 0.0 {
            return Err(CoreError::InvalidInput(format!("row {i} has zero norm")));
        }
        if (len - 1.0).abs() <= 1e-12 {
            data.extend_from_slice(row);
        } else {
            changed = true;
            let inv = 1.0 / len;
            data.extend(row.iter().map(|v| v * inv));
            b[i] *= inv;
        }
    }
    if !changed {
        return Ok(system.clone());
    }
    LinearSystem::new(
        DenseMatrix::new(a.rows(), a.cols(), data)?,
        b,
        system.geometry().clone(),
    )
}

/// `ν = max_{u ∈ Range(Aᵀ)} uᵀ[Σ A_iᵀA_i(AᵀA)†A_iᵀA_i]u / uᵀ(AᵀA/m)u`
pub fn nu_parameter(a: &DenseMatrix) -> Result<f64> {
    let m = a.rows() as f64;
    let g = a.transpose().matmul(a)?;
    let eig = symmetric_eigen(&g)?;
    let spec = Spectrum::from_eigenvalues(eig.values.clone());
    let r = spec.rank;
    // Range(Aᵀ) basis from the eigenvectors of AᵀA; W is diagonal there.
    let basis: Vec<Vec<f64>> = (0..r).map(|k| eig.vectors.column(k)).collect();
    let mut reduced = DenseMatrix::zeros(r, r);
    for i in 0..a.rows() {
        let row = a.row(i);
        let coords: Vec<f64> = basis.iter().map(|v| dot(v, row)).collect();
        let leverage: f64 = coords.iter().zip(&eig.values).map(|(c, l)| c * c / l).sum();
        reduced.add_outer(leverage, &coords, &coords);
    }
    let scale: Vec<f64> = eig.values[..r].iter().map(|l| (m / l).sqrt()).collect();
    let scaled = DenseMatrix::from_fn(r, r, |i, j| reduced[(i, j)] * scale[i] * scale[j]);
    Ok(Spectrum::of_symmetric(&scaled)?.lambda_max)
}

#[derive(Debug, Clone)]
pub struct AccState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub iteration: u64,
    pub gamma_prev: f64,
    pub rng: ChaCha8Rng,
}

impl AccState {
    /// `v⁰ = x⁰`, `γ_{−1} = 0`.
    pub fn new(x0: Vec<f64>, rng: ChaCha8Rng) -> Self {
        Self {
            v: x0.clone(),
            x: x0,
            iteration: 0,
            gamma_prev: 0.0,
            rng,
        }
    }
}

/// One accelerated iteration with row `i`.
pub fn acc_step_with(state: &mut AccState, system: &LinearSystem, params: &AccParams, i: usize) {
    let (alpha, beta, gamma) = params.coefficients(state.gamma_prev);
    let y: Vec<f64> = state
        .v
        .iter()
        .zip(&state.x)
        .map(|(v, x)| alpha * v + (1.0 - alpha) * x)
        .collect();
    let row = system.a().row(i);
    let t = (dot(row, &y) - system.b()[i]) / dot(row, row);
    let gt = gamma * t;
    for l in 0..y.len() {
        state.x[l] = y[l] - t * row[l];
        state.v[l] = (beta * state.v[l] + (1.0 - beta) * y[l]) - gt * row[l];
    }
    state.gamma_prev = gamma;
    state.iteration += 1;
}

/// Uniform row sampling. `system` must already be row-normalized.
pub fn acc_step(state: &mut AccState, system: &LinearSystem, params: &AccParams) -> Result<()> {
    if params.m != system.rows() {
        return Err(CoreError::DimensionMismatch {
            expected: system.rows(),
            got: params.m,
        });
    }
    let i = state.rng.gen_range(0..system.rows());
    acc_step_with(state, system, params, i);
    Ok(())
}
