mod common;

use common::*;
use proptest::prelude::*;
use sketchgossip_core::accelerated::*;
use sketchgossip_core::linalg::{dot, pseudoinverse, sub, symmetric_eigen, DenseMatrix, SpdMatrix};
use sketchgossip_core::sketch::SketchDistribution;
use sketchgossip_core::solver::{run, trial_rng, SolverConfig, SolverState, Stopping, Variant};
use sketchgossip_core::system::LinearSystem;
use sketchgossip_core::trace::geometric_fit;

fn cholesky(a: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        let d = d.sqrt();
        l.row_mut(j)[j] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l.row_mut(i)[j] = s / d;
        }
    }
    l
}

fn lower_solve(l: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = l.rows();
    let mut x = DenseMatrix::zeros(n, b.cols());
    for c in 0..b.cols() {
        for i in 0..n {
            let mut s = b[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x.row_mut(i)[c] = s / l[(i, i)];
        }
    }
    x
}

/// Largest generalized eigenvalue of (M, W) via W = LLᵀ, for full column rank A.
fn nu_oracle(a: &DenseMatrix) -> f64 {
    let m = a.rows() as f64;
    let g = a.transpose().matmul(a).unwrap();
    let ginv = pseudoinverse(&g).unwrap();
    let mut mm = DenseMatrix::zeros(a.cols(), a.cols());
    for i in 0..a.rows() {
        let r = a.row(i);
        let outer = DenseMatrix::from_fn(a.cols(), a.cols(), |p, q| r[p] * r[q]);
        mm = mm.add(&outer.matmul(&ginv).unwrap().matmul(&outer).unwrap());
    }
    let l = cholesky(&g.scale(1.0 / m));
    let y = lower_solve(&l, &mm);
    let c = lower_solve(&l, &y.transpose());
    symmetric_eigen(&c.symmetrized()).unwrap().values[0]
}

fn normalized_gaussian(rows: usize, cols: usize, seed: u64) -> LinearSystem {
    normalize_rows(&gaussian_system(rows, cols, seed)).unwrap()
}

#[test]
fn nu_matches_generalized_eigen_oracle() {
    for seed in 0..10 {
        let sys = normalized_gaussian(12, 5, seed);
        let nu = nu_parameter(sys.a()).unwrap();
        let oracle = nu_oracle(sys.a());
        assert!((nu - oracle).abs() < 1e-9 * oracle, "{nu} vs {oracle}");
        assert!((1.0 - 1e-9..=12.0 + 1e-9).contains(&nu));
    }
}

#[test]
fn nu_of_orthogonal_rows_is_m() {
    // identity rows: leverage one, W = I/m
    let sys = LinearSystem::new(DenseMatrix::identity(4), vec![1.0; 4], SpdMatrix::identity(4)).unwrap();
    assert!((nu_parameter(sys.a()).unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn rank_deficient_nu_restricted_to_range() {
    let mut r = rng(4);
    let sys = normalize_rows(&low_rank_system(9, 6, 3, SpdMatrix::identity(6), &mut r)).unwrap();
    let nu = nu_parameter(sys.a()).unwrap();
    let w = w_spectrum(sys.a()).unwrap();
    assert!(nu.is_finite() && nu >= 1.0 - 1e-9);
    assert!(default_nu(9, &w) <= 9.0);
    assert!(acc_params(AccOption::Two, 9, default_nu(9, &w), &w).is_ok());
}

#[test]
fn normalization_is_idempotent() {
    let sys = normalized_gaussian(6, 3, 2);
    for i in 0..6 {
        assert!((dot(sys.a().row(i), sys.a().row(i)) - 1.0).abs() < 1e-12);
    }
    let again = normalize_rows(&sys).unwrap();
    assert_eq!(again.a(), sys.a());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn option_one_root_solves_quadratic(m in 1usize..200, frac in 0.0f64..1.0, gp in 0.0f64..1e3) {
        let mf = m as f64;
        let lam = frac * mf;
        let g = option_one_root(mf, lam, gp);
        let lhs = g * g - g / mf;
        let rhs = (1.0 - g * lam / mf) * gp * gp;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (g * g + gp * gp + 1.0));
        prop_assert!(g >= 0.0);
    }

    #[test]
    fn option_two_coefficients_in_range(lmin in 1e-4f64..1.0, m in 1usize..500, t in 0.0f64..1.0) {
        let s = sketchgossip_core::Spectrum::from_eigenvalues(vec![1.0, lmin]);
        let upper = (m as f64).min(1.0 / lmin);
        let nu = 1.0 + t * (upper - 1.0);
        let p = acc_params(AccOption::Two, m, nu, &s).unwrap();
        prop_assert!(p.alpha > 0.0 && p.alpha <= 1.0);
        prop_assert!(p.beta >= 0.0 && p.beta < 1.0);
        prop_assert!(p.gamma > 0.0);
        prop_assert!(p.lyapunov_rate() < 1.0);
    }
}

#[test]
fn option_one_converges() {
    let sys = normalized_gaussian(30, 10, 5);
    let w = w_spectrum(sys.a()).unwrap();
    let p = acc_params(AccOption::One, 30, 30.0 * w.lambda_min_plus, &w).unwrap();
    let d = SketchDistribution::uniform_coordinates(30).unwrap();
    let cfg = SolverConfig {
        variant: Variant::Accelerated(p),
        ..SolverConfig::basic(1.0, 3)
    };
    let t = run(&sys, &d, &cfg, &[0.0; 10], &Stopping::iterations(3000), &[]).unwrap();
    assert!(t.series(0, "rel_error").last().unwrap().1 < 1e-8);
}

#[test]
fn lyapunov_summands_decay_at_predicted_rate() {
    let sys = normalized_gaussian(20, 6, 8);
    let w = w_spectrum(sys.a()).unwrap();
    let nu = default_nu(20, &w);
    let p = acc_params(AccOption::Two, 20, nu, &w).unwrap();
    let wmat = sys.a().transpose().matmul(sys.a()).unwrap().scale(1.0 / 20.0);
    let wp = pseudoinverse(&wmat).unwrap();
    let x0 = vec![0.0; 6];
    let x_star = sys.project(&x0);
    let k = 300;
    let trials = 100;
    let mut vs = vec![0.0; k + 1];
    let mut xs = vec![0.0; k + 1];
    for t in 0..trials {
        let mut st = AccState::new(x0.clone(), trial_rng(13, t));
        for it in 0..=k {
            let dv = sub(&st.v, &x_star);
            vs[it] += dot(&dv, &wp.matvec(&dv)) / trials as f64;
            xs[it] += dot(&sub(&st.x, &x_star), &sub(&st.x, &x_star)) / trials as f64;
            if it < k {
                acc_step(&mut st, &sys, &p).unwrap();
            }
        }
    }
    let bound = p.lyapunov_rate() + 0.02;
    for series in [&vs, &xs] {
        let pts: Vec<(u64, f64)> = series
            .iter()
            .enumerate()
            .skip(10)
            .map(|(i, v)| (i as u64, *v))
            .collect();
        let fit = geometric_fit(&pts).unwrap();
        assert!(fit <= bound, "fit {fit} vs {bound}");
    }
}

#[test]
fn accelerated_beats_plain_kaczmarz_in_mean() {
    // Ill-conditioned tall system
    let mut r = rng(6);
    let base = gaussian_matrix(60, 8, &mut r);
    let scales = [1.0, 1.0, 1.0, 1.0, 0.3, 0.1, 0.05, 0.02];
    let a = DenseMatrix::from_fn(60, 8, |i, j| base[(i, j)] * scales[j]);
    let b = a.matvec(&gaussian_vec(8, &mut r));
    let sys = normalize_rows(&LinearSystem::new(a, b, SpdMatrix::identity(8)).unwrap()).unwrap();
    let w = w_spectrum(sys.a()).unwrap();
    let p = acc_params(AccOption::Two, 60, default_nu(60, &w), &w).unwrap();
    let d = SketchDistribution::uniform_coordinates(60).unwrap();
    let x0 = vec![0.0; 8];
    let (mut acc, mut plain) = (0.0, 0.0);
    let k = 4000;
    for trial in 0..10 {
        let cfg = SolverConfig {
            trial,
            variant: Variant::Accelerated(p),
            ..SolverConfig::basic(1.0, 2)
        };
        acc += run(&sys, &d, &cfg, &x0, &Stopping::iterations(k), &[])
            .unwrap()
            .series(trial, "rel_error")
            .last()
            .unwrap()
            .1;
        let mut s = SolverState::seeded(x0.clone(), 2, trial);
        for _ in 0..k {
            sketchgossip_core::solver::basic_step(&mut s, &sys, &d, 1.0).unwrap();
        }
        let xs = sys.project(&x0);
        plain += dot(&sub(&s.x, &xs), &sub(&s.x, &xs)) / dot(&xs, &xs);
    }
    assert!(acc < plain, "acc {acc} plain {plain}");
}

#[test]
fn accelerated_requires_identity_geometry() {
    let mut r = rng(7);
    let sys = low_rank_system(6, 3, 3, random_weights(3, &mut r), &mut r);
    let w = w_spectrum(sys.a()).unwrap();
    let p = acc_params(AccOption::Two, 6, 1.0, &w).unwrap();
    let cfg = SolverConfig {
        variant: Variant::Accelerated(p),
        ..SolverConfig::basic(1.0, 0)
    };
    let d = SketchDistribution::uniform_coordinates(6).unwrap();
    assert!(run(&sys, &d, &cfg, &[0.0; 3], &Stopping::iterations(1), &[]).is_err());
}
