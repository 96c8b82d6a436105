use foresight_core::gammafit::{
    digamma, estimate_threshold, fit_gamma_mle, gamma_cdf, gamma_pdf, log_gamma, GammaParams,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};

fn sample_gamma(shape: f64, rate: f64, n: usize, seed: u64) -> Vec<f64> {
    let dist = Gamma::new(shape, 1.0 / rate).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}

/// Adaptive Simpson quadrature, the oracle for every integral below.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[test]
fn recovers_reference_parameters_from_a_million_draws() {
    let x = sample_gamma(15.0, 392.0, 1_000_000, 7);
    let p = fit_gamma_mle(&x).unwrap();
    assert!((14.85..=15.15).contains(&p.shape()), "alpha {}", p.shape());
    assert!((388.08..=395.92).contains(&p.rate()), "rate {}", p.rate());
}

#[test]
fn exponential_data_gives_unit_shape() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<f64> = (0..1_000_000).map(|_| Exp1.sample(&mut rng)).collect();
    let p = fit_gamma_mle(&x).unwrap();
    assert!((0.99..=1.01).contains(&p.shape()), "alpha {}", p.shape());
}

#[test]
fn fit_is_scale_equivariant() {
    let x = sample_gamma(3.5, 2.0, 20_000, 11);
    let base = fit_gamma_mle(&x).unwrap();
    for c in [1e-3, 0.5, 7.0, 250.0] {
        let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
        let p = fit_gamma_mle(&scaled).unwrap();
        assert!(((p.shape() - base.shape()) / base.shape()).abs() < 1e-8);
        assert!(((p.rate() * c - base.rate()) / base.rate()).abs() < 1e-8);
    }
}

#[test]
fn fitted_threshold_is_calibrated_on_fresh_draws() {
    let fit_on = sample_gamma(15.0, 392.0, 1_000_000, 21);
    let fresh = sample_gamma(15.0, 392.0, 1_000_000, 22);
    let p = fit_gamma_mle(&fit_on).unwrap();
    for eps in [0.05, 0.01] {
        let theta = estimate_threshold(&p, eps).unwrap().theta;
        let rate = fresh.iter().filter(|&&v| v >= theta).count() as f64 / fresh.len() as f64;
        let sd = (eps * (1.0 - eps) / fresh.len() as f64).sqrt();
        assert!((rate - eps).abs() < 3.0 * sd, "eps {eps}: observed {rate}");
    }
}

#[test]
fn fit_maximizes_the_likelihood() {
    let x = sample_gamma(2.2, 40.0, 50_000, 5);
    let p = fit_gamma_mle(&x).unwrap();
    let best = p.mean_log_likelihood(&x).unwrap();
    for (da, dl) in [(1.01, 1.0), (0.99, 1.0), (1.0, 1.01), (1.0, 0.99), (1.01, 1.01), (0.99, 0.99)] {
        let q = GammaParams::new(p.shape() * da, p.rate() * dl).unwrap();
        assert!(q.mean_log_likelihood(&x).unwrap() < best);
    }
}

#[test]
fn rate_convention() {
    let p = GammaParams::new(15.0, 392.0).unwrap();
    let first_moment = simpson(&|x| x * gamma_pdf(x, &p).unwrap_or(0.0), 1e-12, 0.3, 1e-14);
    assert!((first_moment - 15.0 / 392.0).abs() < 1e-10);
    let x = sample_gamma(15.0, 392.0, 1_000_000, 9);
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    assert!((mean / (15.0 / 392.0) - 1.0).abs() < 0.01);
}

#[test]
fn cdf_agrees_with_quadrature_of_the_pdf() {
    let p = GammaParams::new(15.0, 392.0).unwrap();
    let integral = simpson(&|x| gamma_pdf(x, &p).unwrap_or(0.0), 1e-12, 0.05, 1e-13);
    assert!((gamma_cdf(0.05, &p).unwrap() - integral).abs() < 1e-9);

    let theta = estimate_threshold(&p, 0.01).unwrap().theta;
    let mass = simpson(&|x| gamma_pdf(x, &p).unwrap_or(0.0), 1e-12, theta, 1e-13);
    assert!((mass - 0.99).abs() < 1e-8, "mass below theta {mass}");
}

#[test]
fn digamma_is_the_log_gamma_derivative() {
    let h = 1e-5_f64;
    let fd = (log_gamma(7.3_f64 + h).unwrap() - log_gamma(7.3_f64 - h).unwrap()) / (2.0 * h);
    assert!((digamma(7.3_f64).unwrap() - fd).abs() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn cdf_is_monotone(alpha in 0.1f64..60.0, rate in 0.1f64..500.0, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let p = GammaParams::new(alpha, rate).unwrap();
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        let scale = 4.0 * alpha / rate;
        let (a, b) = (lo * scale + 1e-12, hi * scale + 1e-12);
        prop_assert!(gamma_cdf(a, &p).unwrap() <= gamma_cdf(b, &p).unwrap());
    }
}
