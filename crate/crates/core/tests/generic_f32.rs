use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use saga_core::numopt::{lbfgs_minimize, LbfgsOptions};
use saga_core::surrogate::{expected_improvement, GpModel, GpOptions, MlpModel, MlpOptions, TrainingSet};

fn data() -> (Vec<Vec<f32>>, Vec<f32>) {
    let x: Vec<Vec<f32>> = (0..12).map(|i| vec![-1.0 + i as f32 / 6.0, (i as f32 * 0.7).sin()]).collect();
    let y = x.iter().map(|r| r[0] * 2.0 - r[1]).collect();
    (x, y)
}

#[test]
fn surrogates_run_in_single_precision() {
    let (x, y) = data();
    let set = TrainingSet::new(&x, &y).unwrap();
    let gp = GpModel::<f32>::fit(&set, &GpOptions::default(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let (m, s) = gp.predict(&x[3]);
    assert!((m - y[3]).abs() < 0.05 && s >= 0.0);
    let mlp = MlpModel::<f32>::fit(&set, &MlpOptions::default(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert!((mlp.predict(&x[3]) - y[3]).abs() < 0.1);
    assert!(expected_improvement(0.0f32, 1.0, 0.0).unwrap() > 0.39);
}

#[test]
fn lbfgs_in_single_precision() {
    let f = |x: &[f32], g: &mut [f32]| {
        g[0] = 2.0 * (x[0] - 1.5);
        g[1] = 8.0 * (x[1] + 0.5);
        (x[0] - 1.5).powi(2) + 4.0 * (x[1] + 0.5).powi(2)
    };
    let opts = LbfgsOptions { gradient_tolerance: 1e-4f32, ..LbfgsOptions::default() };
    let r = lbfgs_minimize(f, &[0.0f32, 0.0], &opts).unwrap();
    assert!((r.x[0] - 1.5).abs() < 1e-3 && (r.x[1] + 0.5).abs() < 1e-3);
}
