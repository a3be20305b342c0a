//! Monte Carlo checks of the statistic against its closed-form
//! expectation for the uniform i.i.d. source with the matching beta
//! family. Depths are chosen large enough that truncation is immaterial
//! next to the Monte Carlo noise.

use entrate::rng::derive_seed;
use entrate::{
    closed_form_applicable, eta_estimator, expected_r_symmetric, r_statistic, variance_bound,
    BernoulliSource, LambdaFamily, Source,
};

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let t = values.len() as f64;
    let mean = values.iter().sum::<f64>() / t;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (t - 1.0);
    (mean, var)
}

#[test]
fn mean_r_matches_harmonic_closed_form() {
    let asize = 2;
    let np = 64;
    let m = 48;
    let k = 1;
    let trials = 60;
    assert!(closed_form_applicable(np, asize, m));

    let src = Source::Bernoulli(BernoulliSource::uniform(asize).unwrap());
    let family = LambdaFamily::beta(1.0 / asize as f64).unwrap();
    let rs: Vec<f64> = (0..trials)
        .map(|t| {
            let sample = src.sample(np, m, derive_seed(0xA11CE, t)).unwrap();
            r_statistic(&sample, k, &family).unwrap()
        })
        .collect();
    let (mean, var) = mean_and_var(&rs);
    let expected = expected_r_symmetric(np, k, asize).unwrap();
    let stderr = (var / trials as f64).sqrt();
    assert!(
        (mean - expected).abs() <= 3.0 * stderr,
        "mean r = {mean}, closed form = {expected}, stderr = {stderr}"
    );
    assert!(var <= variance_bound(np, k, m));
}

#[test]
fn mean_eta_matches_inverse_entropy() {
    let asize = 3;
    let np = 96;
    let m = 40;
    let k = 2;
    let trials = 80;
    assert!(closed_form_applicable(np, asize, m));

    let src = Source::Bernoulli(BernoulliSource::uniform(asize).unwrap());
    let family = LambdaFamily::beta(1.0 / asize as f64).unwrap();
    let etas: Vec<f64> = (0..trials)
        .map(|t| {
            let sample = src.sample(np, m, derive_seed(0xB0B, t)).unwrap();
            eta_estimator(&sample, k, &family).unwrap().eta
        })
        .collect();
    let (mean, var) = mean_and_var(&etas);
    let inverse_h = 1.0 / (asize as f64).ln();
    let stderr = (var / trials as f64).sqrt();
    assert!(
        (mean - inverse_h).abs() <= 3.0 * stderr,
        "mean eta = {mean}, 1/h = {inverse_h}, stderr = {stderr}"
    );
}

#[test]
fn eta_nonnegative_and_bounded_across_sources() {
    let sources = [
        Source::Bernoulli(BernoulliSource::new(vec![0.25, 0.75]).unwrap()),
        Source::Bernoulli(BernoulliSource::uniform(4).unwrap()),
    ];
    let family = LambdaFamily::beta(0.5).unwrap();
    for (si, src) in sources.iter().enumerate() {
        for t in 0..10 {
            let sample = src.sample(40, 24, derive_seed(si as u64, t)).unwrap();
            let rep = eta_estimator(&sample, 2, &family).unwrap();
            assert!(rep.eta >= 0.0);
            assert!(rep.eta <= 2.0 * 24.0);
            assert!(rep.r_k_plus_1 <= rep.r_k && rep.r_k <= 24.0);
        }
    }
}
