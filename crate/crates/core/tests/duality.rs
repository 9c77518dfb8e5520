mod common;

use common::*;
use proptest::prelude::*;
use sketchgossip_core::duality::*;
use sketchgossip_core::linalg::{sub, SpdMatrix};
use sketchgossip_core::momentum::momentum_step;
use sketchgossip_core::sketch::SketchDistribution;
use sketchgossip_core::solver::{basic_step, predicted_rate, trial_rng, SolverState};
use sketchgossip_core::system::{spectrum_of_w, LinearSystem};
use sketchgossip_core::trace::geometric_fit;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn strong_duality_and_gap_identity(seed in any::<u64>(), dense_b in any::<bool>()) {
        let mut r = rng(seed);
        let geom = if dense_b { random_spd(5, &mut r) } else { random_weights(5, &mut r) };
        let sys = low_rank_system(4, 5, 3, geom, &mut r);
        let x0 = gaussian_vec(5, &mut r);
        let ys = optimal_dual(&sys, &x0);
        let x_star = sys.project(&x0);
        let p_star = 0.5 * sys.geometry().norm_sq(&sub(&x_star, &x0));
        let d_star = dual_value(&sys, &x0, &ys);
        prop_assert!((p_star - d_star).abs() <= 1e-8 * p_star.max(1.0));
        prop_assert!(max_abs_diff(&primal_from_dual(&sys, &x0, &ys), &x_star) < 1e-8);
        let y = gaussian_vec(4, &mut r);
        let gap = d_star - dual_value(&sys, &x0, &y);
        let sub_opt = dual_suboptimality(&sys, &x0, &y);
        prop_assert!(gap >= -1e-9);
        prop_assert!((gap - sub_opt).abs() <= 1e-8 * gap.abs().max(1.0));
    }

    #[test]
    fn sdsa_dual_never_decreases(seed in any::<u64>(), omega in 0.05f64..1.95, tau in 1usize..4) {
        let mut r = rng(seed);
        let sys = low_rank_system(5, 4, 3, random_weights(4, &mut r), &mut r);
        let d = SketchDistribution::uniform_block(5, tau).unwrap();
        let x0 = gaussian_vec(4, &mut r);
        let mut s = DualState::new(x0.clone(), 5, rng(seed ^ 5));
        let mut prev = dual_value(&sys, &x0, &s.y);
        for _ in 0..6 {
            sdsa_step(&mut s, &sys, &d, omega).unwrap();
            let now = dual_value(&sys, &x0, &s.y);
            prop_assert!(now >= prev - 1e-9 * prev.abs().max(1.0));
            prev = now;
        }
    }
}

#[test]
fn sdsa_maps_to_basic_iterates() {
    let mut r = rng(1);
    let sys = low_rank_system(7, 5, 4, random_spd(5, &mut r), &mut r);
    let d = SketchDistribution::uniform_block(7, 2).unwrap();
    let x0 = gaussian_vec(5, &mut r);
    let mut p = SolverState::new(x0.clone(), trial_rng(2, 0));
    let mut q = DualState::new(x0, 7, trial_rng(2, 0));
    for _ in 0..50 {
        basic_step(&mut p, &sys, &d, 1.2).unwrap();
        sdsa_step(&mut q, &sys, &d, 1.2).unwrap();
        assert!(max_abs_diff(&p.x, &q.primal(&sys)) < 1e-9);
    }
}

#[test]
fn msdsa_maps_to_momentum_iterates() {
    let mut r = rng(3);
    let sys = low_rank_system(6, 6, 5, random_weights(6, &mut r), &mut r);
    let d = SketchDistribution::uniform_coordinates(6).unwrap();
    let x0 = gaussian_vec(6, &mut r);
    let mut p = SolverState::new(x0.clone(), trial_rng(4, 0));
    let mut q = DualState::new(x0, 6, trial_rng(4, 0));
    for _ in 0..50 {
        momentum_step(&mut p, &sys, &d, 1.0, 0.3).unwrap();
        msdsa_step(&mut q, &sys, &d, 1.0, 0.3).unwrap();
        assert!(max_abs_diff(&p.x, &q.primal(&sys)) < 1e-9);
    }
}

#[test]
fn expected_dual_gap_decays_at_basic_rate() {
    let sys = gaussian_system(20, 6, 5);
    let d = SketchDistribution::uniform_coordinates(20).unwrap();
    let rho = predicted_rate(spectrum_of_w(&sys, &d).unwrap().lambda_min_plus, 1.0)
        .unwrap()
        .rho;
    let x0 = vec![1.0; 6];
    let k = 150;
    let trials = 100;
    let mut mean = vec![0.0; k + 1];
    for t in 0..trials {
        let mut s = DualState::new(x0.clone(), 20, trial_rng(7, t));
        for (it, m) in mean.iter_mut().enumerate() {
            *m += dual_suboptimality(&sys, &x0, &s.y) / trials as f64;
            if it < k {
                sdsa_step(&mut s, &sys, &d, 1.0).unwrap();
            }
        }
    }
    let pts: Vec<(u64, f64)> = mean.iter().enumerate().map(|(i, v)| (i as u64, *v)).collect();
    let fit = geometric_fit(&pts).unwrap();
    assert!(fit <= rho + 0.01, "fit {fit} vs {rho}");
    assert!(mean[k] <= rho.powi(k as i32) * mean[0] * 2.0);
}

#[test]
fn averaging_system_dual_gap_is_half_distance_to_mean() {
    let n = 8;
    let q = cycle_incidence(n);
    let sys = LinearSystem::new(q, vec![0.0; n], SpdMatrix::identity(n)).unwrap();
    let mut r = rng(9);
    let c = gaussian_vec(n, &mut r);
    let mean = c.iter().sum::<f64>() / n as f64;
    let avg = vec![mean; n];
    assert!(max_abs_diff(&sys.project(&c), &avg) < 1e-12);
    let ys = optimal_dual(&sys, &c);
    let d_star = dual_value(&sys, &c, &ys);
    assert!((d_star - 0.5 * sketchgossip_core::linalg::norm_sq(&sub(&c, &avg))).abs() < 1e-10);
    let y = gaussian_vec(n, &mut r);
    let x = primal_from_dual(&sys, &c, &y);
    let gap = d_star - dual_value(&sys, &c, &y);
    assert!((gap - 0.5 * sketchgossip_core::linalg::norm_sq(&sub(&x, &avg))).abs() < 1e-10);
    // every dual point keeps the sum
    assert!((x.iter().sum::<f64>() - c.iter().sum::<f64>()).abs() < 1e-10);
}
