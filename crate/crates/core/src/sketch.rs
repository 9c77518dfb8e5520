//! Distributions over sketch matrices `S`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{param, CoreError, Result};
use crate::linalg::{DenseMatrix, SpdMatrix};

/// Largest finite support enumerated when forming `E[Z]` exactly.
pub const SUPPORT_LIMIT: usize = 1_000_000;

/// A drawn sketch: `S = I_{:C}` for an index set, or a dense column.
#[derive(Debug, Clone, PartialEq)]
pub enum Sketch {
    Indices(Vec<usize>),
    Dense(Vec<f64>),
}

impl Sketch {
    pub fn single(i: usize) -> Self {
        Self::Indices(vec![i])
    }

    pub fn indices(&self) -> Option<&[usize]> {
        match self {
            Self::Indices(c) => Some(c),
            Self::Dense(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SketchDistribution {
    Coordinate {
        probabilities: Vec<f64>,
        cumulative: Vec<f64>,
        uniform: bool,
    },
    UniformBlock {
        m: usize,
        tau: usize,
    },
    FixedSets {
        sets: Vec<Vec<usize>>,
        probabilities: Vec<f64>,
        cumulative: Vec<f64>,
        m: usize,
    },
    GaussianVector {
        m: usize,
    },
}

fn check_probabilities(p: &[f64]) -> Result<Vec<f64>> {
    if p.is_empty() {
        return Err(param("probabilities", "empty"));
    }
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(param("probabilities", "entries must be finite and nonnegative"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(param("probabilities", format!("sum to {total}, not 1")));
    }
    let mut acc = 0.0;
    Ok(p.iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect())
}

fn pick(cumulative: &[f64], u: f64) -> usize {
    let target = u * cumulative.last().copied().unwrap_or(1.0);
    let i = cumulative.partition_point(|c| *c <= target);
    // guards against u landing past the last positive mass
    let mut i = i.min(cumulative.len() - 1);
    while i > 0 && cumulative[i] == cumulative[i - 1] {
        i -= 1;
    }
    i
}

impl SketchDistribution {
    pub fn coordinate(probabilities: Vec<f64>) -> Result<Self> {
        let cumulative = check_probabilities(&probabilities)?;
        Ok(Self::Coordinate {
            probabilities,
            cumulative,
            uniform: false,
        })
    }

    pub fn uniform_coordinates(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(param("m", "must be positive"));
        }
        let probabilities = vec![1.0 / m as f64; m];
        let mut cumulative = check_probabilities(&probabilities).unwrap_or_default();
        if cumulative.is_empty() {
            // rounding on large m can push the sum off by more than 1e-12
            cumulative = (1..=m).map(|k| k as f64 / m as f64).collect();
        }
        Ok(Self::Coordinate {
            probabilities,
            cumulative,
            uniform: true,
        })
    }

    /// Coordinate sketch with `p_i ∝ ‖B^{-1/2} A_{i:}ᵀ‖²`.
    pub fn row_norms(a: &DenseMatrix, b: &SpdMatrix) -> Result<Self> {
        let w: Vec<f64> = (0..a.rows())
            .map(|i| {
                let r = a.row(i);
                crate::linalg::dot(r, &b.solve(r))
            })
            .collect();
        if let Some(i) = w.iter().position(|v| *v <= 0.0) {
            return Err(CoreError::InvalidInput(format!("row {i} has zero norm")));
        }
        let total: f64 = w.iter().sum();
        let probabilities: Vec<f64> = w.iter().map(|v| v / total).collect();
        let mut acc = 0.0;
        let cumulative = probabilities
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        Ok(Self::Coordinate {
            probabilities,
            cumulative,
            uniform: false,
        })
    }

    pub fn uniform_block(m: usize, tau: usize) -> Result<Self> {
        if tau == 0 || tau > m {
            return Err(param("tau", format!("must lie in [1, {m}], got {tau}")));
        }
        Ok(Self::UniformBlock { m, tau })
    }

    pub fn fixed_sets(m: usize, sets: Vec<Vec<usize>>, probabilities: Vec<f64>) -> Result<Self> {
        if sets.len() != probabilities.len() {
            return Err(CoreError::DimensionMismatch {
                expected: sets.len(),
                got: probabilities.len(),
            });
        }
        let cumulative = check_probabilities(&probabilities)?;
        let mut clean = Vec::with_capacity(sets.len());
        for s in sets {
            let mut s = s;
            s.sort_unstable();
            s.dedup();
            if s.is_empty() || s.iter().any(|&i| i >= m) {
                return Err(param("sets", "each set must be a nonempty subset of [m]"));
            }
            clean.push(s);
        }
        Ok(Self::FixedSets {
            sets: clean,
            probabilities,
            cumulative,
            m,
        })
    }

    pub fn gaussian(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(param("m", "must be positive"));
        }
        Ok(Self::GaussianVector { m })
    }

    /// Row count of the systems this distribution sketches.
    pub fn rows(&self) -> usize {
        match self {
            Self::Coordinate { probabilities, .. } => probabilities.len(),
            Self::UniformBlock { m, .. } | Self::FixedSets { m, .. } | Self::GaussianVector { m } => *m,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Sketch {
        match self {
            Self::Coordinate {
                cumulative, uniform, ..
            } => {
                if *uniform {
                    Sketch::single(rng.gen_range(0..cumulative.len()))
                } else {
                    Sketch::single(pick(cumulative, rng.gen::<f64>()))
                }
            }
            Self::UniformBlock { m, tau } => Sketch::Indices(partial_fisher_yates(*m, *tau, rng)),
            Self::FixedSets { sets, cumulative, .. } => {
                Sketch::Indices(sets[pick(cumulative, rng.gen::<f64>())].clone())
            }
            Self::GaussianVector { m } => Sketch::Dense((0..*m).map(|_| rng.sample(StandardNormal)).collect()),
        }
    }

    /// Probability of each atom of a finite support, or `None` for
    /// continuous distributions and supports beyond [`SUPPORT_LIMIT`].
    pub fn support(&self) -> Option<Vec<(Sketch, f64)>> {
        match self {
            Self::Coordinate { probabilities, .. } => Some(
                probabilities
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| **p > 0.0)
                    .map(|(i, p)| (Sketch::single(i), *p))
                    .collect(),
            ),
            Self::UniformBlock { m, tau } => {
                let count = binomial(*m, *tau)?;
                if count > SUPPORT_LIMIT as u128 {
                    return None;
                }
                let p = 1.0 / count as f64;
                Some(
                    combinations(*m, *tau)
                        .into_iter()
                        .map(|c| (Sketch::Indices(c), p))
                        .collect(),
                )
            }
            Self::FixedSets {
                sets, probabilities, ..
            } => Some(
                sets.iter()
                    .zip(probabilities)
                    .filter(|(_, p)| **p > 0.0)
                    .map(|(s, p)| (Sketch::Indices(s.clone()), *p))
                    .collect(),
            ),
            Self::GaussianVector { .. } => None,
        }
    }
}

/// Uniform `tau`-subset of `0..m`, returned sorted.
pub fn partial_fisher_yates<R: Rng + ?Sized>(m: usize, tau: usize, rng: &mut R) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..m).collect();
    for k in 0..tau {
        let j = rng.gen_range(k..m);
        pool.swap(k, j);
    }
    pool.truncate(tau);
    pool.sort_unstable();
    pool
}

fn binomial(m: usize, k: usize) -> Option<u128> {
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((m - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        while i > 0 && c[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        c[i - 1] += 1;
        for j in i..k {
            c[j] = c[j - 1] + 1;
        }
    }
}
