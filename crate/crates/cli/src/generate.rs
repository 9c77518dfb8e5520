//! Random and file-backed problem instances.

use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use sketchgossip_core::{DenseMatrix, LinearSystem, SpdMatrix};

use crate::error::{HarnessError, Result};

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// `PᵀP` for Gaussian `P`, `n × n`.
pub fn spd_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseMatrix {
    let p = gaussian_matrix(n, n, rng);
    p.transpose().matmul(&p).expect("square").symmetrized()
}

/// Each row holds `nnz` standard normal entries at distinct random columns.
pub fn sparse_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, nnz: usize, rng: &mut R) -> DenseMatrix {
    let a = gaussian_matrix(rows, cols, rng);
    mask_rows(&a, nnz, rng)
}

/// Keeps `keep` random entries of every row of `a` and zeroes the rest.
pub fn mask_rows<R: Rng + ?Sized>(a: &DenseMatrix, keep: usize, rng: &mut R) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in sample(rng, a.cols(), keep.min(a.cols())).into_iter() {
            out[(i, j)] = a[(i, j)];
        }
    }
    out
}

/// Consistent system `Ax = b` with `b = Az`, `z` standard normal.
pub fn consistent_system<R: Rng + ?Sized>(a: DenseMatrix, geometry: SpdMatrix, rng: &mut R) -> Result<LinearSystem> {
    let z = gaussian_vector(a.cols(), rng);
    let b = a.matvec(&z);
    Ok(LinearSystem::new(a, b, geometry)?)
}

/// Whitespace-separated numbers: a header `rows cols`, then the entries row by row.
pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut nums = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace);
    let mut dim = |what: &str| -> Result<usize> {
        nums.next()
            .and_then(|s| s.parse().ok())
            .filter(|&d| d > 0)
            .ok_or_else(|| HarnessError::field("system.a", format!("header needs a positive {what} count")))
    };
    let (rows, cols) = (dim("row")?, dim("column")?);
    let data = nums
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| HarnessError::field("system.a", format!("bad entry `{s}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if data.len() != rows * cols {
        return Err(HarnessError::field(
            "system.a",
            format!("expected {} entries, found {}", rows * cols, data.len()),
        ));
    }
    Ok(DenseMatrix::new(rows, cols, data)?)
}

/// Whitespace-separated numbers.
pub fn parse_vector(text: &str, field: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| HarnessError::field(field, format!("bad entry `{s}`")))
        })
        .collect()
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sparse_rows_have_nnz() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = sparse_matrix(50, 20, 3, &mut rng);
        for i in 0..50 {
            assert_eq!(a.row(i).iter().filter(|v| **v != 0.0).count(), 3);
        }
    }

    #[test]
    fn spd_is_symmetric_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = spd_matrix(6, &mut rng);
        assert!(a.is_symmetric(0.0));
        assert!(SpdMatrix::dense(a).is_ok());
    }

    #[test]
    fn matrix_text() {
        let a = parse_matrix("# comment\n2 3\n1 2 3\n4 5 6\n").unwrap();
        assert_eq!(a.row(1), &[4.0, 5.0, 6.0]);
        assert!(parse_matrix("2 2\n1 2 3\n").is_err());
        assert!(parse_matrix("0 2\n").is_err());
        assert!(parse_matrix("1 2\n1 x\n").is_err());
    }
}
