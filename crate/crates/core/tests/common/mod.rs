#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sketchgossip_core::{DenseMatrix, LinearSystem, SpdMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// `A` Gaussian, `b = Az`.
pub fn gaussian_system(rows: usize, cols: usize, seed: u64) -> LinearSystem {
    let mut r = rng(seed);
    let a = gaussian_matrix(rows, cols, &mut r);
    let z = gaussian_vec(cols, &mut r);
    let b = a.matvec(&z);
    LinearSystem::new(a, b, SpdMatrix::identity(cols)).unwrap()
}

pub fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> SpdMatrix {
    let p = gaussian_matrix(n + 2, n, rng);
    let m = p.transpose().matmul(&p).unwrap();
    SpdMatrix::dense(m.add(&DenseMatrix::identity(n).scale(0.1))).unwrap()
}

pub fn random_weights(n: usize, rng: &mut ChaCha8Rng) -> SpdMatrix {
    SpdMatrix::diagonal((0..n).map(|_| rng.gen_range(0.5..3.0)).collect()).unwrap()
}

/// Rank-deficient consistent system in the given geometry.
pub fn low_rank_system(
    rows: usize,
    cols: usize,
    rank: usize,
    geometry: SpdMatrix,
    rng: &mut ChaCha8Rng,
) -> LinearSystem {
    let l = gaussian_matrix(rows, rank, rng);
    let r = gaussian_matrix(rank, cols, rng);
    let a = l.matmul(&r).unwrap();
    let z = gaussian_vec(cols, rng);
    let b = a.matvec(&z);
    LinearSystem::new(a, b, geometry).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

pub fn mat_close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> bool {
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    max_abs_diff(a.data(), b.data()) <= tol * scale
}

/// Dense Gaussian elimination with partial pivoting.
pub fn solve_dense(m: &DenseMatrix, rhs: &[f64]) -> Vec<f64> {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut b = rhs.to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// Incidence matrix of the cycle on `n` nodes, edges in lexicographic order.
pub fn cycle_incidence(n: usize) -> DenseMatrix {
    let mut edges: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            (i.min(j), i.max(j))
        })
        .collect();
    edges.sort_unstable();
    let mut q = DenseMatrix::zeros(edges.len(), n);
    for (e, (i, j)) in edges.iter().enumerate() {
        q[(e, *i)] = 1.0;
        q[(e, *j)] = -1.0;
    }
    q
}
