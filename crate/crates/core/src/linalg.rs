//! Dense linear algebra: matrices, Jacobi SVD and eigensolvers, pseudoinverse,
//! the geometry matrix `B`, and spectra.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{param, CoreError, Result};

const MAX_SWEEPS: usize = 100;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(CoreError::InvalidInput(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(CoreError::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(CoreError::InvalidInput("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(CoreError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                axpy(a, other.row(k), orow);
            }
        }
        Ok(out)
    }

    /// `A x`
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Aᵀ y`
    pub fn tr_matvec(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            if *yi != 0.0 {
                axpy(*yi, self.row(i), &mut out);
            }
        }
        out
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: scaled(alpha, &self.data),
        }
    }

    pub fn add(&self, other: &DenseMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        norm_sq(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Symmetric to within `tol` relative to the largest entry.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if (self[(i, j)] - self[(j, i)]).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// `(A + Aᵀ)/2`
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    /// `x yᵀ` accumulated with weight `alpha`.
    pub fn add_outer(&mut self, alpha: f64, x: &[f64], y: &[f64]) {
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0.0 {
                continue;
            }
            axpy(alpha * xi, y, self.row_mut(i));
        }
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Thin SVD `A = U diag(s) Vᵀ`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

impl Svd {
    /// Singular values treated as zero by the pseudoinverse.
    pub fn threshold(&self) -> f64 {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        f64::EPSILON * self.u.rows().max(self.v.rows()) as f64 * smax
    }

    pub fn rank(&self) -> usize {
        let t = self.threshold();
        self.singular_values.iter().filter(|s| **s > t).count()
    }
}

/// One-sided Jacobi SVD.
pub fn svd(a: &DenseMatrix) -> Svd {
    if a.rows() >= a.cols() {
        jacobi_svd_tall(a)
    } else {
        let t = jacobi_svd_tall(&a.transpose());
        Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        }
    }
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*xi, *yi);
        *xi = c * a - s * b;
        *yi = s * a + c * b;
    }
}

fn pair_mut(v: &mut [Vec<f64>], p: usize, q: usize) -> (&mut Vec<f64>, &mut Vec<f64>) {
    debug_assert!(p < q);
    let (lo, hi) = v.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

fn jacobi_svd_tall(a: &DenseMatrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norm_sq(&cols[p]);
                let beta = norm_sq(&cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                let (cp, cq) = pair_mut(&mut cols, p, q);
                rotate(cp, cq, c, s);
                let (vp, vq) = pair_mut(&mut v, p, q);
                rotate(vp, vq, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sv: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));

    let mut u = DenseMatrix::zeros(m, n);
    let mut vm = DenseMatrix::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let s = sv[j];
        singular_values.push(s);
        if s > 0.0 {
            for i in 0..m {
                u[(i, k)] = cols[j][i] / s;
            }
        }
        for i in 0..n {
            vm[(i, k)] = v[j][i];
        }
    }
    Svd {
        u,
        singular_values,
        v: vm,
    }
}

/// Moore–Penrose pseudoinverse via SVD.
pub fn pseudoinverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    if m.data().iter().any(|v| !v.is_finite()) {
        return Err(CoreError::InvalidInput("non-finite matrix".into()));
    }
    Ok(pinv_from_svd(&svd(m)))
}

/// `V diag(1/s) Uᵀ` over the singular values above the threshold.
pub fn pinv_from_svd(s: &Svd) -> DenseMatrix {
    let t = s.threshold();
    let (m, n) = (s.u.rows(), s.v.rows());
    let mut out = DenseMatrix::zeros(n, m);
    for (k, &sk) in s.singular_values.iter().enumerate() {
        if sk <= t {
            continue;
        }
        let inv = 1.0 / sk;
        for i in 0..n {
            let vik = s.v[(i, k)] * inv;
            if vik == 0.0 {
                continue;
            }
            for j in 0..m {
                out[(i, j)] += vik * s.u[(j, k)];
            }
        }
    }
    out
}

/// Eigendecomposition of a symmetric matrix; eigenvalues descending,
/// eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

/// Cyclic Jacobi eigensolver. The input is symmetrized first.
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<SymmetricEigen> {
    if !a.is_square() {
        return Err(CoreError::InvalidInput(
            "eigendecomposition needs a square matrix".into(),
        ));
    }
    let n = a.rows();
    let mut w = a.symmetrized();
    let mut v = DenseMatrix::identity(n);
    let fro = w.frobenius_norm_sq().sqrt();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += w[(p, q)] * w[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * fro || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (w[(k, p)], w[(k, q)]);
                    w[(k, p)] = c * akp - s * akq;
                    w[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (w[(p, k)], w[(q, k)]);
                    w[(p, k)] = c * apk - s * aqk;
                    w[(q, k)] = s * apk + c * aqk;
                }
                w[(p, q)] = 0.0;
                w[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| w[(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Sorted eigenvalues with the rank decision applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub lambda_max: f64,
    pub lambda_min_plus: f64,
    pub rank: usize,
}

impl Spectrum {
    /// Relative zero threshold for eigenvalues.
    pub const ZERO_TOL: f64 = 1e-10;

    pub fn from_eigenvalues(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let lambda_max = values.first().copied().unwrap_or(0.0).max(0.0);
        let cut = Self::ZERO_TOL * lambda_max;
        let positive: Vec<f64> = values.iter().copied().filter(|v| *v > cut).collect();
        Self {
            lambda_min_plus: positive.last().copied().unwrap_or(0.0),
            rank: positive.len(),
            lambda_max,
            eigenvalues: values,
        }
    }

    pub fn of_symmetric(m: &DenseMatrix) -> Result<Self> {
        Ok(Self::from_eigenvalues(symmetric_eigen(m)?.values))
    }

    pub fn condition_number(&self) -> f64 {
        self.lambda_max / self.lambda_min_plus
    }
}

#[derive(Debug, Clone)]
pub struct DenseSpd {
    matrix: DenseMatrix,
    inverse: DenseMatrix,
    sqrt: DenseMatrix,
    inv_sqrt: DenseMatrix,
}

/// The symmetric positive definite geometry matrix `B`.
#[derive(Debug, Clone)]
pub enum SpdMatrix {
    Identity(usize),
    Diagonal(Vec<f64>),
    Dense(Box<DenseSpd>),
}

impl SpdMatrix {
    pub fn identity(n: usize) -> Self {
        Self::Identity(n)
    }

    pub fn diagonal(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(CoreError::InvalidInput("empty weight vector".into()));
        }
        if w.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(param("weights", "all weights must be finite and positive"));
        }
        Ok(Self::Diagonal(w))
    }

    pub fn dense(m: DenseMatrix) -> Result<Self> {
        if !m.is_symmetric(1e-12) {
            return Err(CoreError::InvalidInput("geometry matrix is not symmetric".into()));
        }
        let m = m.symmetrized();
        let eig = symmetric_eigen(&m)?;
        let lmax = eig.values[0];
        let lmin = *eig.values.last().unwrap();
        if lmax <= 0.0 || lmin <= 1e-14 * lmax {
            return Err(CoreError::NotPositiveDefinite);
        }
        let n = m.rows();
        let build = |f: &dyn Fn(f64) -> f64| {
            let mut out = DenseMatrix::zeros(n, n);
            for (k, lam) in eig.values.iter().enumerate() {
                let col = eig.vectors.column(k);
                out.add_outer(f(*lam), &col, &col);
            }
            out.symmetrized()
        };
        Ok(Self::Dense(Box::new(DenseSpd {
            inverse: build(&|l| 1.0 / l),
            sqrt: build(&|l| l.sqrt()),
            inv_sqrt: build(&|l| 1.0 / l.sqrt()),
            matrix: m,
        })))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Identity(n) => *n,
            Self::Diagonal(w) => w.len(),
            Self::Dense(d) => d.matrix.rows(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Self::Identity(_))
    }

    /// Reciprocal weights for the identity and diagonal forms.
    pub fn inverse_diagonal(&self) -> Option<Vec<f64>> {
        match self {
            Self::Identity(n) => Some(vec![1.0; *n]),
            Self::Diagonal(w) => Some(w.iter().map(|v| 1.0 / v).collect()),
            Self::Dense(_) => None,
        }
    }

    fn diag_map(&self, x: &[f64], f: impl Fn(f64) -> f64, dense: impl Fn(&DenseSpd) -> &DenseMatrix) -> Vec<f64> {
        match self {
            Self::Identity(_) => x.to_vec(),
            Self::Diagonal(w) => x.iter().zip(w).map(|(xi, wi)| xi * f(*wi)).collect(),
            Self::Dense(d) => dense(d).matvec(x),
        }
    }

    /// `B x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.diag_map(x, |w| w, |d| &d.matrix)
    }

    /// `B⁻¹ x`
    pub fn solve(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Self::Diagonal(w) => x.iter().zip(w).map(|(xi, wi)| xi / wi).collect(),
            _ => self.diag_map(x, |w| 1.0 / w, |d| &d.inverse),
        }
    }

    /// `B^{1/2} x`
    pub fn apply_sqrt(&self, x: &[f64]) -> Vec<f64> {
        self.diag_map(x, f64::sqrt, |d| &d.sqrt)
    }

    /// `B^{-1/2} x`
    pub fn apply_inv_sqrt(&self, x: &[f64]) -> Vec<f64> {
        self.diag_map(x, |w| 1.0 / w.sqrt(), |d| &d.inv_sqrt)
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.apply(y))
    }

    pub fn norm_sq(&self, x: &[f64]) -> f64 {
        self.inner(x, x)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Self::Identity(n) => DenseMatrix::identity(*n),
            Self::Diagonal(w) => DenseMatrix::from_diagonal(w),
            Self::Dense(d) => d.matrix.clone(),
        }
    }

    /// `M B^{-1/2}` for a matrix with `n` columns.
    pub fn right_inv_sqrt(&self, m: &DenseMatrix) -> DenseMatrix {
        let mut out = m.clone();
        for i in 0..m.rows() {
            let r = self.apply_inv_sqrt(m.row(i));
            out.row_mut(i).copy_from_slice(&r);
        }
        out
    }

    /// `M B^{-1}` for a matrix with `n` columns.
    pub fn right_inverse(&self, m: &DenseMatrix) -> DenseMatrix {
        let mut out = m.clone();
        for i in 0..m.rows() {
            let r = self.solve(m.row(i));
            out.row_mut(i).copy_from_slice(&r);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> bool {
        a.data().iter().zip(b.data()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn pinv_of_identity() {
        let i = DenseMatrix::identity(3);
        assert!(close(&pseudoinverse(&i).unwrap(), &i, 1e-15));
    }

    #[test]
    fn pinv_of_singular_diagonal() {
        let d = DenseMatrix::from_diagonal(&[2.0, 0.0]);
        let p = pseudoinverse(&d).unwrap();
        assert!(close(&p, &DenseMatrix::from_diagonal(&[0.5, 0.0]), 1e-15));
    }

    #[test]
    fn pinv_rejects_nan() {
        let m = DenseMatrix {
            rows: 1,
            cols: 1,
            data: vec![f64::NAN],
        };
        assert!(pseudoinverse(&m).is_err());
    }

    #[test]
    fn new_validates() {
        assert!(DenseMatrix::new(0, 1, vec![]).is_err());
        assert!(DenseMatrix::new(1, 2, vec![1.0]).is_err());
        assert!(DenseMatrix::new(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn eigen_of_2x2() {
        let m = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = symmetric_eigen(&m).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectrum_threshold() {
        let s = Spectrum::from_eigenvalues(vec![1e-12, 0.5, 2.0, 0.0]);
        assert_eq!(s.rank, 2);
        assert_eq!(s.lambda_max, 2.0);
        assert_eq!(s.lambda_min_plus, 0.5);
        assert_eq!(s.eigenvalues, vec![2.0, 0.5, 1e-12, 0.0]);
    }

    #[test]
    fn dense_spd_roots() {
        let m = DenseMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let b = SpdMatrix::dense(m.clone()).unwrap();
        let x = [0.3, -1.2];
        let y = b.apply_sqrt(&b.apply_sqrt(&x));
        let bx = m.matvec(&x);
        assert!((y[0] - bx[0]).abs() < 1e-12 && (y[1] - bx[1]).abs() < 1e-12);
        let z = b.apply(&b.solve(&x));
        assert!((z[0] - x[0]).abs() < 1e-12 && (z[1] - x[1]).abs() < 1e-12);
    }

    #[test]
    fn dense_spd_rejects_indefinite() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(SpdMatrix::dense(m), Err(CoreError::NotPositiveDefinite)));
    }
}
