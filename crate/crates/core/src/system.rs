//! Consistent linear systems `Ax = b` in the geometry of `B`, and the
//! sketched quantities built from them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{CoreError, Result};
use crate::linalg::{self, dot, norm, pinv_from_svd, svd, DenseMatrix, SpdMatrix, Spectrum};
use crate::sketch::{Sketch, SketchDistribution};

/// Rows `SᵀA`, their `B⁻¹` images, and `Sᵀb` for one sketch.
#[derive(Debug, Clone)]
pub struct SketchedRows {
    pub rows: DenseMatrix,
    pub rows_binv: DenseMatrix,
    pub rhs: Vec<f64>,
}

impl SketchedRows {
    /// `M = SᵀAB⁻¹AᵀS`
    pub fn inner_matrix(&self) -> DenseMatrix {
        let k = self.rows.rows();
        let mut m = DenseMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = dot(self.rows.row(i), self.rows_binv.row(j));
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// `Sᵀ(b − Ax)`
    pub fn residual_gap(&self, x: &[f64]) -> Vec<f64> {
        self.rhs
            .iter()
            .enumerate()
            .map(|(i, bi)| bi - dot(self.rows.row(i), x))
            .collect()
    }

    /// `B⁻¹AᵀSλ`
    pub fn lift(&self, lambda: &[f64]) -> Vec<f64> {
        self.rows_binv.tr_matvec(lambda)
    }
}

#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: DenseMatrix,
    b: Vec<f64>,
    geometry: SpdMatrix,
    a_binv: DenseMatrix,
    inv_diag: Option<Vec<f64>>,
    k_pinv: DenseMatrix,
    range_basis: DenseMatrix,
    rank: usize,
}

impl LinearSystem {
    /// Builds the system and certifies consistency.
    pub fn new(a: DenseMatrix, b: Vec<f64>, geometry: SpdMatrix) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(CoreError::DimensionMismatch {
                expected: a.rows(),
                got: b.len(),
            });
        }
        if geometry.dim() != a.cols() {
            return Err(CoreError::DimensionMismatch {
                expected: a.cols(),
                got: geometry.dim(),
            });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidInput("non-finite right-hand side".into()));
        }
        let k = geometry.right_inv_sqrt(&a);
        let dec = svd(&k);
        let rank = dec.rank();
        let k_pinv = pinv_from_svd(&dec);
        let n = a.cols();
        let range_basis = DenseMatrix::from_fn(n, rank.max(1), |i, j| if j < rank { dec.v[(i, j)] } else { 0.0 });
        let a_binv = geometry.right_inverse(&a);
        let inv_diag = geometry.inverse_diagonal();
        let sys = Self {
            a,
            b,
            geometry,
            a_binv,
            inv_diag,
            k_pinv,
            range_basis,
            rank,
        };
        let x_ls = sys.geometry.apply_inv_sqrt(&sys.k_pinv.matvec(&sys.b));
        let residual = norm(&sys.residual(&x_ls));
        if residual > 1e-8 * norm(&sys.b).max(1.0) {
            return Err(CoreError::Inconsistent { residual });
        }
        Ok(sys)
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn geometry(&self) -> &SpdMatrix {
        &self.geometry
    }

    /// `A B⁻¹`; row `i` is `(B⁻¹A_{i:}ᵀ)ᵀ`.
    pub fn a_binv(&self) -> &DenseMatrix {
        &self.a_binv
    }

    /// `1/w` for identity or diagonal geometries.
    pub fn inverse_weights(&self) -> Option<&[f64]> {
        self.inv_diag.as_deref()
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `Ax − b`
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.a.matvec(x);
        for (ri, bi) in r.iter_mut().zip(&self.b) {
            *ri -= bi;
        }
        r
    }

    /// `Π_{L,B}(x) = x − B⁻¹Aᵀ(AB⁻¹Aᵀ)†(Ax − b)`
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let r = self.residual(x);
        let corr = self.geometry.apply_inv_sqrt(&self.k_pinv.matvec(&r));
        linalg::sub(x, &corr)
    }

    /// `(AB^{-1/2})†`, an `n × m` matrix.
    pub fn k_pinv(&self) -> &DenseMatrix {
        &self.k_pinv
    }

    /// Component of `v` in `Null(A)`, orthogonal in the `B` inner product.
    pub fn null_component(&self, v: &[f64]) -> Vec<f64> {
        let half = self.geometry.apply_sqrt(v);
        let coef = self.range_basis.tr_matvec(&half);
        let in_range = self.geometry.apply_inv_sqrt(&self.range_basis.matvec(&coef));
        linalg::sub(v, &in_range)
    }

    /// Random direction in `Range(B⁻¹Aᵀ)` with unit `B`-norm, uniform on that sphere.
    pub fn random_range_direction<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        if self.rank == 0 {
            return vec![0.0; self.cols()];
        }
        loop {
            let g: Vec<f64> = (0..self.rank).map(|_| rng.sample(StandardNormal)).collect();
            let len = norm(&g);
            if len > 0.0 {
                let mut coef = linalg::scaled(1.0 / len, &g);
                coef.resize(self.range_basis.cols(), 0.0);
                return self.geometry.apply_inv_sqrt(&self.range_basis.matvec(&coef));
            }
        }
    }

    /// Least-norm `y` with `B⁻¹Aᵀy = e` for `e ∈ Range(B⁻¹Aᵀ)`.
    pub fn dual_preimage(&self, e: &[f64]) -> Vec<f64> {
        self.k_pinv.tr_matvec(&self.geometry.apply_sqrt(e))
    }

    pub fn sketch_rows(&self, sketch: &Sketch) -> SketchedRows {
        match sketch {
            Sketch::Indices(c) => SketchedRows {
                rows: self.a.select_rows(c),
                rows_binv: self.a_binv.select_rows(c),
                rhs: c.iter().map(|&i| self.b[i]).collect(),
            },
            Sketch::Dense(s) => {
                let row = self.a.tr_matvec(s);
                let row_binv = self.geometry.solve(&row);
                let n = row.len();
                SketchedRows {
                    rows: DenseMatrix::from_fn(1, n, |_, j| row[j]),
                    rows_binv: DenseMatrix::from_fn(1, n, |_, j| row_binv[j]),
                    rhs: vec![dot(s, &self.b)],
                }
            }
        }
    }

    /// `λ* = (SᵀAB⁻¹AᵀS)† Sᵀ(b − Ax)`
    pub fn multiplier(&self, sketch: &Sketch, x: &[f64]) -> Result<Vec<f64>> {
        let rows = self.sketch_rows(sketch);
        let m = rows.inner_matrix();
        Ok(linalg::pseudoinverse(&m)?.matvec(&rows.residual_gap(x)))
    }

    /// `∇f_S(x) = B⁻¹AᵀS(SᵀAB⁻¹AᵀS)†Sᵀ(Ax − b)`
    pub fn stochastic_gradient(&self, sketch: &Sketch, x: &[f64]) -> Result<Vec<f64>> {
        let rows = self.sketch_rows(sketch);
        let lam = linalg::pseudoinverse(&rows.inner_matrix())?.matvec(&rows.residual_gap(x));
        Ok(linalg::scaled(-1.0, &rows.lift(&lam)))
    }

    /// `f_S(x) = ½ (Ax − b)ᵀ S (SᵀAB⁻¹AᵀS)† Sᵀ(Ax − b)`
    pub fn stochastic_objective(&self, sketch: &Sketch, x: &[f64]) -> Result<f64> {
        let rows = self.sketch_rows(sketch);
        let gap = rows.residual_gap(x);
        let lam = linalg::pseudoinverse(&rows.inner_matrix())?.matvec(&gap);
        Ok(0.5 * dot(&gap, &lam))
    }

    /// `Z = AᵀS(SᵀAB⁻¹AᵀS)†SᵀA`
    pub fn z_matrix(&self, sketch: &Sketch) -> Result<DenseMatrix> {
        let rows = self.sketch_rows(sketch);
        let mp = linalg::pseudoinverse(&rows.inner_matrix())?;
        let tmp = mp.matmul(&rows.rows)?;
        rows.rows.transpose().matmul(&tmp)
    }

    /// Exact `E[Z]` by enumerating the support.
    pub fn expected_z(&self, dist: &SketchDistribution) -> Result<DenseMatrix> {
        self.check_rows(dist)?;
        let support = dist.support().ok_or(CoreError::UnsupportedClosedForm)?;
        let n = self.cols();
        let mut ez = DenseMatrix::zeros(n, n);
        for (s, p) in support {
            if let Sketch::Indices(c) = &s {
                if c.len() == 1 {
                    let i = c[0];
                    let row = self.a.row(i);
                    let denom = dot(row, self.a_binv.row(i));
                    if denom > 0.0 {
                        ez.add_outer(p / denom, row, row);
                    }
                    continue;
                }
            }
            let z = self.z_matrix(&s)?;
            ez = ez.add(&z.scale(p));
        }
        Ok(ez.symmetrized())
    }

    /// `W = B^{-1/2} E[Z] B^{-1/2}`
    pub fn w_matrix(&self, ez: &DenseMatrix) -> DenseMatrix {
        let half = self.geometry.right_inv_sqrt(ez);
        self.geometry.right_inv_sqrt(&half.transpose()).symmetrized()
    }

    fn check_rows(&self, dist: &SketchDistribution) -> Result<()> {
        if dist.rows() != self.rows() {
            return Err(CoreError::DimensionMismatch {
                expected: self.rows(),
                got: dist.rows(),
            });
        }
        Ok(())
    }
}

/// Eigenvalues of `W = B^{-1/2}E[Z]B^{-1/2}` in closed form.
pub fn spectrum_of_w(system: &LinearSystem, dist: &SketchDistribution) -> Result<Spectrum> {
    let ez = system.expected_z(dist)?;
    Spectrum::of_symmetric(&system.w_matrix(&ez))
}

/// Monte-Carlo average of `Z` over `samples` draws.
pub fn estimate_ez(system: &LinearSystem, dist: &SketchDistribution, samples: usize, seed: u64) -> Result<DenseMatrix> {
    if samples == 0 {
        return Err(crate::error::param("samples", "must be at least 1"));
    }
    system.check_rows(dist)?;
    let n = system.cols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = DenseMatrix::zeros(n, n);
    for _ in 0..samples {
        let z = system.z_matrix(&dist.draw(&mut rng))?;
        acc = acc.add(&z);
    }
    Ok(acc.scale(1.0 / samples as f64))
}

/// `f(x) = ½ (x − x*)ᵀ E[Z] (x − x*)`
pub fn expected_objective(ez: &DenseMatrix, x: &[f64], x_star: &[f64]) -> f64 {
    let e = linalg::sub(x, x_star);
    0.5 * dot(&e, &ez.matvec(&e))
}
