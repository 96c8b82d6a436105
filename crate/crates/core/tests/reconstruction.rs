use foresight_core::reconstruct::{init_model, reconstruction_error, FrameTensor, ReconstructorKind, TrainConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pixels(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, len)
}

proptest! {
    #[test]
    fn error_is_symmetric_and_zero_on_identity(a in pixels(12), b in pixels(12)) {
        let x = FrameTensor::new(4, 3, 1, a).unwrap();
        let y = FrameTensor::new(4, 3, 1, b).unwrap();
        let xy = reconstruction_error(&x, &y).unwrap();
        prop_assert_eq!(xy, reconstruction_error(&y, &x).unwrap());
        prop_assert!(xy >= 0.0);
        prop_assert_eq!(reconstruction_error(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn duplicating_channels_preserves_error(a in pixels(9), b in pixels(9)) {
        let triple = |v: &[f64]| v.iter().flat_map(|&p| [p, p, p]).collect::<Vec<_>>();
        let grey = reconstruction_error(
            &FrameTensor::new(3, 3, 1, a.clone()).unwrap(),
            &FrameTensor::new(3, 3, 1, b.clone()).unwrap(),
        ).unwrap();
        let rgb = reconstruction_error(
            &FrameTensor::new(3, 3, 3, triple(&a)).unwrap(),
            &FrameTensor::new(3, 3, 3, triple(&b)).unwrap(),
        ).unwrap();
        prop_assert!((grey - rgb).abs() <= 1e-15);
    }
}

#[test]
fn error_matches_a_coordinate_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let a: Vec<f64> = (0..16).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..16).map(|_| rng.random()).collect();
        let x = FrameTensor::new(4, 4, 1, a).unwrap();
        let y = FrameTensor::new(4, 4, 1, b).unwrap();
        let mut acc = 0.0;
        for row in 0..4 {
            for col in 0..4 {
                let d = x.get(col, row, 0) - y.get(col, row, 0);
                acc += d * d;
            }
        }
        assert!((reconstruction_error(&x, &y).unwrap() - acc / 16.0).abs() < 1e-15);
    }
}

#[test]
fn analytic_gradient_matches_central_differences() {
    let cfg = TrainConfig { hidden_sizes: vec![1], seed: 4, ..TrainConfig::default() };
    let model = init_model::<f64>(ReconstructorKind::Sae, 2, &cfg).unwrap();
    let (input, target) = ([0.3, 0.8], [0.3, 0.8]);
    let (_, grad) = model.loss_and_gradient(&input, &target);
    let step = 1e-5;

    let check = |analytic: f64, perturb: &dyn Fn(&mut foresight_core::ReconstructorModel, f64)| {
        let (mut plus, mut minus) = (model.clone(), model.clone());
        perturb(&mut plus, step);
        perturb(&mut minus, -step);
        let numeric = (plus.loss(&input, &target) - minus.loss(&input, &target)) / (2.0 * step);
        let scale = analytic.abs().max(numeric.abs()).max(1e-8);
        assert!((analytic - numeric).abs() / scale < 1e-4, "analytic {analytic} numeric {numeric}");
    };
    for (l, layer) in model.layers().iter().enumerate() {
        for i in 0..layer.weights().len() {
            check(grad.weights[l][i], &|m, d| *m.weight_mut(l, i) += d);
        }
        for i in 0..layer.biases().len() {
            check(grad.biases[l][i], &|m, d| *m.bias_mut(l, i) += d);
        }
    }
}
