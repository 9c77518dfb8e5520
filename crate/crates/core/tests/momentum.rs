mod common;

use common::*;
use proptest::prelude::*;
use sketchgossip_core::linalg::{sub, Spectrum};
use sketchgossip_core::momentum::*;
use sketchgossip_core::sketch::{Sketch, SketchDistribution};
use sketchgossip_core::solver::{basic_step, SolverState};
use sketchgossip_core::system::{expected_objective, spectrum_of_w};
use sketchgossip_core::CoreError;

#[test]
fn zero_beta_is_bitwise_basic() {
    let mut r = rng(1);
    let sys = low_rank_system(8, 5, 4, random_weights(5, &mut r), &mut r);
    let d = SketchDistribution::uniform_block(8, 3).unwrap();
    let x0 = gaussian_vec(5, &mut r);
    let mut a = SolverState::seeded(x0.clone(), 4, 2);
    let mut b = SolverState::seeded(x0, 4, 2);
    for _ in 0..50 {
        basic_step(&mut a, &sys, &d, 1.3).unwrap();
        momentum_step(&mut b, &sys, &d, 1.3, 0.0).unwrap();
    }
    assert_eq!(a.x, b.x);
}

#[test]
fn heavy_ball_kaczmarz_formula() {
    let mut r = rng(2);
    let sys = gaussian_system(6, 4, 7);
    let x0 = gaussian_vec(4, &mut r);
    let mut s = SolverState::seeded(x0, 0, 0);
    let (omega, beta) = (0.9, 0.4);
    for k in 0..6 {
        let i = (k * 5) % 6;
        let (x, prev) = (s.x.clone(), s.x_prev.clone());
        let a = sys.a().row(i);
        let t = omega * (sketchgossip_core::linalg::dot(a, &x) - sys.b()[i]) / sketchgossip_core::linalg::dot(a, a);
        let expect: Vec<f64> = (0..4).map(|l| x[l] - t * a[l] + beta * (x[l] - prev[l])).collect();
        momentum_step_with(&mut s, &sys, &Sketch::single(i), omega, beta).unwrap();
        assert!(max_abs_diff(&s.x, &expect) < 1e-13);
    }
}

#[test]
fn stochastic_momentum_is_heavy_ball_in_mean() {
    let mut r = rng(3);
    let sys = gaussian_system(6, 5, 9);
    let (omega, gamma) = (1.0, 0.8);
    let mut s = SolverState::seeded(gaussian_vec(5, &mut r), 0, 0);
    momentum_step_with(&mut s, &sys, &Sketch::single(2), omega, 0.0).unwrap();
    let sk = Sketch::single(4);
    let mut mean = vec![0.0; 5];
    for coord in 0..5 {
        let mut c = s.clone();
        stochastic_momentum_step_with(&mut c, &sys, &sk, coord, omega, gamma).unwrap();
        for (m, v) in mean.iter_mut().zip(&c.x) {
            *m += v / 5.0;
        }
    }
    let mut hb = s.clone();
    momentum_step_with(&mut hb, &sys, &sk, omega, gamma / 5.0).unwrap();
    assert!(max_abs_diff(&mean, &hb.x) < 1e-12);
}

#[test]
fn stochastic_momentum_needs_identity() {
    let mut r = rng(4);
    let sys = low_rank_system(4, 3, 3, random_weights(3, &mut r), &mut r);
    let mut s = SolverState::seeded(vec![0.0; 3], 0, 0);
    let err = stochastic_momentum_step_with(&mut s, &sys, &Sketch::single(0), 0, 1.0, 0.5).unwrap_err();
    assert!(matches!(err, CoreError::UnsupportedGeometry));
}

fn spec_strategy() -> impl Strategy<Value = (f64, f64, f64)> {
    (1e-4f64..1.0, 0.0f64..1.0, 0.05f64..1.95).prop_map(|(l, t, w)| (l, l + t * (1.0 - l), w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn admissible_bound_is_root((l, lm, w) in spec_strategy()) {
        let b = admissible_beta_bound(w, l, lm);
        let (a1, a2) = momentum_coefficients(l, lm, w, b);
        prop_assert!(b > 0.0);
        prop_assert!((a1 + a2 - 1.0).abs() < 1e-9);
        let s = Spectrum::from_eigenvalues(vec![lm, l]);
        prop_assert!(momentum_rate(&s, w, 0.999 * b).is_ok());
        let bad = matches!(momentum_rate(&s, w, 1.001 * b + 1e-12), Err(CoreError::Inadmissible { .. }));
        prop_assert!(bad);
    }

    #[test]
    fn rate_orderings((l, lm, w) in spec_strategy(), frac in 0.0f64..0.999) {
        let s = Spectrum::from_eigenvalues(vec![lm, l]);
        let b = frac * admissible_beta_bound(w, l, lm);
        let r = momentum_rate(&s, w, b).unwrap();
        let basic = 1.0 - w * (2.0 - w) * l;
        prop_assert!(r.q < 1.0);
        prop_assert!(r.q >= basic - 1e-12);
        prop_assert!(r.q >= r.a1 + r.a2 - 1e-12);
        prop_assert!((r.q * r.q - r.a1 * r.q - r.a2).abs() < 1e-12);
        prop_assert!(r.delta >= 0.0);
        let r2 = momentum_rate(&s, w, b * 0.5).unwrap();
        prop_assert!(r2.q <= r.q + 1e-12);
    }

    #[test]
    fn recurrence_is_dominated((l, lm, w) in spec_strategy(), frac in 0.0f64..0.999, k in 2u64..200) {
        let s = Spectrum::from_eigenvalues(vec![lm, l]);
        let r = momentum_rate(&s, w, frac * admissible_beta_bound(w, l, lm)).unwrap();
        let (mut f0, mut f1) = (1.0f64, 1.0f64);
        for _ in 1..k {
            let f2 = r.a1 * f1 + r.a2 * f0;
            f0 = f1;
            f1 = f2;
        }
        // F_k ≤ q^{k-1}(1 + δ)F_0
        prop_assert!(f1 <= r.bound_factor(k - 1) * (1.0 + 1e-9));
    }

    #[test]
    fn momentum_stays_in_affine_range(seed in any::<u64>(), beta in 0.0f64..0.9) {
        let mut r = rng(seed);
        let sys = low_rank_system(5, 4, 3, random_spd(4, &mut r), &mut r);
        let d = SketchDistribution::uniform_block(5, 2).unwrap();
        let x0 = gaussian_vec(4, &mut r);
        let x_star = sys.project(&x0);
        let mut s = SolverState::new(x0, rng(seed ^ 1));
        for _ in 0..6 {
            momentum_step(&mut s, &sys, &d, 1.0, beta).unwrap();
        }
        prop_assert!(max_abs_diff(&sys.project(&s.x), &x_star) < 1e-8 * (1.0 + sketchgossip_core::linalg::norm(&s.x)));
    }
}

#[test]
fn stochastic_rate_reduces_to_heavy_ball_at_n_one() {
    let s = Spectrum::from_eigenvalues(vec![0.6, 0.05]);
    let a = momentum_rate(&s, 1.0, 0.01).unwrap();
    let b = stochastic_momentum_rate(&s, 1, 1.0, 0.01).unwrap();
    assert!((a.q - b.q).abs() < 1e-15);
    let c = stochastic_momentum_rate(&s, 10, 1.0, 0.1).unwrap();
    assert!(c.q > a.q);
}

#[test]
fn complexity_ratio() {
    let s = Spectrum::from_eigenvalues(vec![0.6, 0.05]);
    let c = smc_vs_mc_complexity(50, 10.0, 0.0005, &s, 1.0).unwrap();
    assert_eq!(c.ratio, 6.0);
    assert!(c.cost_momentum > c.cost_stochastic);
    assert!(smc_vs_mc_complexity(50, 0.5, 0.0005, &s, 1.0).is_err());
}

#[test]
fn expected_distance_within_bound() {
    let sys = gaussian_system(12, 4, 31);
    let d = SketchDistribution::uniform_coordinates(12).unwrap();
    let s = spectrum_of_w(&sys, &d).unwrap();
    let beta = 0.5 * admissible_beta_bound(1.0, s.lambda_min_plus, s.lambda_max);
    let rate = momentum_rate(&s, 1.0, beta).unwrap();
    let x0 = vec![1.0; 4];
    let x_star = sys.project(&x0);
    let e0 = sys.geometry().norm_sq(&sub(&x0, &x_star));
    let trials = 300;
    let k = 60;
    let mut mean = 0.0;
    for t in 0..trials {
        let mut st = SolverState::seeded(x0.clone(), 17, t);
        for _ in 0..k {
            momentum_step(&mut st, &sys, &d, 1.0, beta).unwrap();
        }
        mean += sys.geometry().norm_sq(&sub(&st.x, &x_star)) / trials as f64;
    }
    assert!(
        mean <= rate.bound_factor(k - 1) * e0,
        "{mean} vs {}",
        rate.bound_factor(k - 1) * e0
    );
}

#[test]
fn cesaro_average_within_bound() {
    let sys = gaussian_system(10, 4, 41);
    let d = SketchDistribution::uniform_coordinates(10).unwrap();
    let ez = sys.expected_z(&d).unwrap();
    let (omega, beta) = (0.5, 0.5);
    let x0 = vec![2.0, -1.0, 0.0, 1.0];
    let x_star = sys.project(&x0);
    let dist0 = sys.geometry().norm_sq(&sub(&x0, &x_star));
    let f0 = expected_objective(&ez, &x0, &x_star);
    let trials = 200;
    for k in [10u64, 50, 200] {
        let mut mean = 0.0;
        for t in 0..trials {
            let mut st = SolverState::seeded(x0.clone(), 23, t);
            let mut avg = CesaroAverage::new();
            for _ in 0..k {
                avg.push(&st.x);
                momentum_step(&mut st, &sys, &d, omega, beta).unwrap();
            }
            mean += expected_objective(&ez, &avg.mean().unwrap(), &x_star) / trials as f64;
        }
        let bound = cesaro_bound(omega, beta, dist0, f0, k).unwrap();
        assert!(mean <= bound, "k {k}: {mean} vs {bound}");
    }
    assert!(cesaro_bound(1.0, 0.5, 1.0, 1.0, 1).is_err());
}
