use std::f64::consts::PI;

use klmat::noise::{noise_stream, NoiseModel, SeededRng};

const N: usize = 100_000;

fn central_moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Mean, variance and fourth central moment of each model, derived by hand.
fn reference(model: &NoiseModel) -> (f64, f64, f64) {
    match *model {
        NoiseModel::Wgn { sigma } => (0.0, sigma.powi(2), 3.0 * sigma.powi(4)),
        NoiseModel::BernoulliGaussianImpulsive { sigma_g, p_c, sigma_i, impulse_scale } => {
            let g = sigma_g.powi(2);
            let s = (impulse_scale * sigma_i).powi(2);
            (0.0, g + p_c * s, (1.0 - p_c) * 3.0 * g * g + p_c * 3.0 * (g + s).powi(2))
        }
        NoiseModel::Uniform { variance } => {
            let a2 = 3.0 * variance;
            (0.0, variance, a2 * a2 / 5.0)
        }
        NoiseModel::Rayleigh { sigma_sq, remove_mean } => {
            let var = (4.0 - PI) / 2.0 * sigma_sq;
            let excess = -(6.0 * PI * PI - 24.0 * PI + 16.0) / (4.0 - PI).powi(2);
            let mean = if remove_mean { 0.0 } else { (PI * sigma_sq / 2.0).sqrt() };
            (mean, var, (3.0 + excess) * var * var)
        }
        NoiseModel::Exponential { mean, remove_mean } => {
            (if remove_mean { 0.0 } else { mean }, mean * mean, 9.0 * mean.powi(4))
        }
        _ => unreachable!(),
    }
}

fn stochastic_models() -> Vec<NoiseModel> {
    vec![
        NoiseModel::Wgn { sigma: 0.1 },
        NoiseModel::BernoulliGaussianImpulsive { sigma_g: 0.02, p_c: 0.3, sigma_i: 0.02, impulse_scale: 1.0 },
        NoiseModel::BernoulliGaussianImpulsive { sigma_g: 0.02, p_c: 0.05, sigma_i: 0.02, impulse_scale: 10.0 },
        NoiseModel::Uniform { variance: 5.0 },
        NoiseModel::Rayleigh { sigma_sq: 0.05, remove_mean: false },
        NoiseModel::Rayleigh { sigma_sq: 0.05, remove_mean: true },
        NoiseModel::Exponential { mean: 0.1, remove_mean: false },
        NoiseModel::Exponential { mean: 0.1, remove_mean: true },
    ]
}

#[test]
fn moments_within_three_standard_errors() {
    for (k, model) in stochastic_models().iter().enumerate() {
        let xs = noise_stream(model, &SeededRng::new(100 + k as u64), N);
        let (mean, var) = central_moments(&xs);
        let (m, v, mu4) = reference(model);
        let se_mean = (v / N as f64).sqrt();
        let se_var = ((mu4 - v * v) / N as f64).sqrt();
        assert!((mean - m).abs() < 3.0 * se_mean, "{model:?}: mean {mean} vs {m}");
        assert!((var - v).abs() < 3.0 * se_var, "{model:?}: var {var} vs {v}");
        let (lib_mean, lib_var) = model.moments();
        assert!((lib_mean - m).abs() < 1e-15 && (lib_var - v).abs() < 1e-15);
    }
}

#[test]
fn published_tolerances() {
    let xs = noise_stream(&NoiseModel::Uniform { variance: 5.0 }, &SeededRng::new(1), N);
    assert!((central_moments(&xs).1 - 5.0).abs() < 0.15);
    let xs = noise_stream(&NoiseModel::Wgn { sigma: 0.1 }, &SeededRng::new(1), N);
    let (mean, var) = central_moments(&xs);
    assert!(mean.abs() < 0.002);
    assert!((var.sqrt() - 0.1).abs() < 0.002);
}

#[test]
fn impulsive_without_impulses_is_gaussian() {
    let rng = SeededRng::new(77);
    let bg = NoiseModel::BernoulliGaussianImpulsive { sigma_g: 0.3, p_c: 0.0, sigma_i: 5.0, impulse_scale: 2.0 };
    let a = noise_stream(&bg, &rng, 10_000);
    let b = noise_stream(&NoiseModel::Wgn { sigma: 0.3 }, &rng, 10_000);
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn rectangular_is_exactly_periodic() {
    let m = NoiseModel::Rectangular { amplitude: 0.1, period_samples: 6 };
    let xs = noise_stream(&m, &SeededRng::new(0), 600);
    assert!(xs.chunks(6).all(|c| c == xs[..6].to_vec().as_slice()));
    assert!(xs.iter().sum::<f64>().abs() < 1e-12);
}
