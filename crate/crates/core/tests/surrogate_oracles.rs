use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saga_core::numopt::finite_diff_grad;
use saga_core::surrogate::{
    expected_improvement, gp_log_marginal_likelihood, mlp_loss_and_gradient, GpModel, GpOptions, GpHyperparameters,
    TrainingSet,
};
use saga_core::Matrix;

fn random_set(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect()).collect();
    let y = x.iter().map(|r| r.iter().map(|v| (3.0 * v).sin()).sum::<f64>() + rng.random_range(-0.1..0.1)).collect();
    (x, y)
}

/// Posterior mean and std by a dense LU solve on the full kernel system.
fn dense_posterior(model: &GpModel<f64>, x: &[Vec<f64>], query: &[f64]) -> (f64, f64) {
    let h = model.hyperparameters();
    let (l, sf2) = (h.log_lengthscale.exp(), (2.0 * h.log_signal_std).exp());
    let k = |a: &[f64], b: &[f64]| {
        let r2: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
        sf2 * (-r2 / (2.0 * l * l)).exp()
    };
    let n = x.len();
    let kmat = DMatrix::from_fn(n, n, |i, j| k(&x[i], &x[j]) + if i == j { model.effective_noise_var() } else { 0.0 });
    let y = DVector::from_column_slice(model.training_targets());
    let ks = DVector::from_fn(n, |i, _| k(&x[i], query));
    let lu = kmat.lu();
    let alpha = lu.solve(&y).unwrap();
    let v = lu.solve(&ks).unwrap();
    let s = model.standardizer();
    let mean = ks.dot(&alpha) * s.std + s.mean;
    let var = (sf2 - ks.dot(&v)).max(0.0);
    (mean, var.sqrt() * s.std)
}

#[test]
fn gp_posterior_matches_dense_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let n = rng.random_range(2..=50);
        let (x, y) = random_set(&mut rng, n, 6);
        let h = GpHyperparameters::new(rng.random_range(0.3..3.0), rng.random_range(0.5..3.0), rng.random_range(0.01..0.5));
        let model = GpModel::with_hyperparameters(&TrainingSet::new(&x, &y).unwrap(), h, 1e-6).unwrap();
        for _ in 0..5 {
            let q: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let (m, s) = model.predict(&q);
            let (dm, ds) = dense_posterior(&model, &x, &q);
            assert!((m - dm).abs() <= 1e-8 * dm.abs().max(1.0), "mean {m} vs {dm}");
            assert!((s - ds).abs() <= 1e-8 * ds.abs().max(1.0), "std {s} vs {ds}");
        }
    }
}

#[test]
fn gp_interpolates_smooth_noiseless_function() {
    let x: Vec<Vec<f64>> = (0..10).map(|i| vec![-1.0 + 2.0 * i as f64 / 9.0]).collect();
    let y: Vec<f64> = x.iter().map(|r| (2.0 * r[0]).sin()).collect();
    let model = GpModel::fit(&TrainingSet::new(&x, &y).unwrap(), &GpOptions::default(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    for (xi, yi) in x.iter().zip(&y) {
        assert!((model.predict(xi).0 - yi).abs() < 1e-6);
    }
    assert!(model.hyperparameters().log_noise_std.exp() <= 1e-3);
}

#[test]
fn gp_variance_at_training_inputs_bounded_by_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let (x, y) = random_set(&mut rng, 15, 6);
        let h = GpHyperparameters::new(rng.random_range(0.2..2.0), 1.0, rng.random_range(1e-3..0.3));
        let model = GpModel::with_hyperparameters(&TrainingSet::new(&x, &y).unwrap(), h, 1e-6).unwrap();
        let sd = model.standardizer().std;
        for xi in &x {
            let (_, s) = model.predict(xi);
            assert!((s / sd).powi(2) <= model.effective_noise_var() + 1e-8);
        }
    }
}

#[test]
fn gp_lml_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let (x, y) = random_set(&mut rng, 12, 6);
        let p = [rng.random_range(-1.5..1.0), rng.random_range(-1.0..1.0), rng.random_range(-4.0..-0.5)];
        let f = |q: &[f64]| {
            let h = GpHyperparameters { log_lengthscale: q[0], log_signal_std: q[1], log_noise_std: q[2] };
            gp_log_marginal_likelihood(&h, &x, &y).unwrap().0
        };
        let (_, g) = gp_log_marginal_likelihood(&GpHyperparameters { log_lengthscale: p[0], log_signal_std: p[1], log_noise_std: p[2] }, &x, &y).unwrap();
        let fd = finite_diff_grad(f, &p, 1e-5).unwrap();
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-5 * b.abs().max(1.0), "{g:?} vs {fd:?}");
        }
    }
}

#[test]
fn mlp_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let hidden = 10;
    for _ in 0..20 {
        let (x, y) = random_set(&mut rng, 20, 6);
        let inputs = Matrix::from_rows(&x).unwrap();
        let params: Vec<f64> = (0..hidden * 6 + 2 * hidden + 1).map(|_| rng.random_range(-0.7..0.7)).collect();
        let mut g = vec![0.0; params.len()];
        mlp_loss_and_gradient(&params, hidden, &inputs, &y, &mut g);
        let mut scratch = vec![0.0; params.len()];
        let fd = finite_diff_grad(|p| mlp_loss_and_gradient(p, hidden, &inputs, &y, &mut scratch), &params, 1e-6).unwrap();
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-5 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}

proptest! {
    #[test]
    fn ei_non_negative_and_monotone(mean in -10.0f64..10.0, best in -10.0f64..10.0, std in 0.0f64..10.0, ds in 0.0f64..5.0, dm in 0.01f64..5.0) {
        let ei = expected_improvement(mean, std, best).unwrap();
        prop_assert!(ei >= 0.0);
        prop_assert!(expected_improvement(mean, std + ds, best).unwrap() >= ei - 1e-12);
        if std > 1e-3 {
            prop_assert!(expected_improvement(mean + dm, std, best).unwrap() < ei || ei == 0.0);
        }
    }
}
