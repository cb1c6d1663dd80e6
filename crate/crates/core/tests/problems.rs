use offo::problem::{derivative_errors, load_suite, noise_draws, with_noise, Quantity, SUITE_NAMES};
use offo::{Oracle, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// x0 and five random points near it.
fn sample_points(x0: &[f64], rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut pts = vec![x0.to_vec()];
    for _ in 0..5 {
        pts.push(x0.iter().map(|v| v + 0.1 * rng.random_range(-1.0..1.0) * (1.0 + v.abs())).collect());
    }
    pts
}

#[test]
fn derivatives_match_finite_differences_across_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for p in load_suite(None).unwrap() {
        for x in sample_points(&p.x0, &mut rng) {
            let (ge, he) = derivative_errors(&p, &x).unwrap();
            assert!(ge < 1e-5, "{} gradient error {ge:e} at {x:?}", p.name);
            assert!(he < 1e-5, "{} hessian error {he:e} at {x:?}", p.name);
        }
    }
}

#[test]
fn every_problem_has_a_reference_value() {
    for p in load_suite(None).unwrap() {
        assert!(p.f_ref.is_some_and(f64::is_finite), "{}", p.name);
        assert!(p.f_ref_provenance.is_some(), "{}", p.name);
    }
    assert_eq!(load_suite(None).unwrap().len(), SUITE_NAMES.len());
}

#[test]
fn noisy_gradient_is_unbiased() {
    let level = 0.25;
    let p = load_suite(Some(&["rosenbr"])).unwrap().remove(0);
    let x: Vec<f64> = p.x0.iter().map(|v| v + 0.3).collect();
    let g = p.gradient(&x).unwrap();
    let seeds = 10_000;
    let mut mean = vec![0.0; g.len()];
    for seed in 0..seeds {
        let noisy = with_noise(p.clone(), level, seed).unwrap();
        for (m, v) in mean.iter_mut().zip(noisy.gradient(&x).unwrap()) {
            *m += v / seeds as f64;
        }
    }
    // three standard errors of a mean of 10^4 draws
    for (m, gi) in mean.iter().zip(&g) {
        assert!((m - gi).abs() <= 3.0 * level * gi.abs() / 100.0, "mean {m} vs {gi}");
    }
}

#[test]
fn noise_draws_are_standard_normal() {
    let n = 20_000;
    let xi = noise_draws(99, &[0.5, -1.0], Quantity::Value, n);
    let mean = xi.iter().sum::<f64>() / n as f64;
    let var = xi.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "{mean}");
    assert!((var - 1.0).abs() < 0.05, "{var}");
}

#[test]
fn noisy_runs_are_reproducible() {
    let p = load_suite(Some(&["beale"])).unwrap().remove(0);
    let mut cfg = Variant::Adagi1.config();
    cfg.noise_level = 0.15;
    cfg.seed = 123;
    cfg.max_iter = 300;
    let a = offo::driver::run(&p, &cfg).unwrap();
    let b = offo::driver::run(&p, &cfg).unwrap();
    assert_eq!(a.x_final, b.x_final);
    cfg.seed = 124;
    let c = offo::driver::run(&p, &cfg).unwrap();
    assert_ne!(a.x_final, c.x_final);
}
