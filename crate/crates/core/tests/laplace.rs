mod oracles;

use compana_core::privacy::laplace_perturb;
use compana_core::DpParams;

use oracles::{ks_statistic, variance};

fn cdf(x: f64, b: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / b).exp()
    } else {
        1.0 - 0.5 * (-x / b).exp()
    }
}

#[test]
fn laplace_noise_has_the_right_law() {
    let params = DpParams::new(1.0, 1.0).unwrap();
    let samples = laplace_perturb(&vec![0.0; 100_000], &params, 2024);
    let var = variance(&samples);
    assert!((var - 2.0).abs() <= 0.05 * 2.0, "variance {var}");
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    assert!(mean.abs() <= 0.02, "mean {mean}");
    let ks = ks_statistic(&samples, |x| cdf(x, 1.0));
    assert!(ks <= 0.01, "KS {ks}");
}

#[test]
fn scale_follows_sensitivity_over_epsilon() {
    let params = DpParams::new(0.5, 2.0).unwrap();
    let samples = laplace_perturb(&vec![0.0; 100_000], &params, 7);
    let ks = ks_statistic(&samples, |x| cdf(x, 4.0));
    assert!(ks <= 0.01, "KS {ks}");
}
