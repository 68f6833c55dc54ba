//! Seeded additive measurement-noise models.
//!
//! Every step draws from its own ChaCha substream keyed by `(seed, step)`, so
//! a model's value at step `n` does not depend on how many variates earlier
//! steps consumed. This is what makes a Bernoulli-Gaussian model with
//! `p_c = 0` reproduce the Gaussian stream bit for bit.

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, Normal};

use crate::error::{contract, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    None,
    Wgn {
        sigma: f64,
    },
    BernoulliGaussianImpulsive {
        sigma_g: f64,
        p_c: f64,
        sigma_i: f64,
        impulse_scale: f64,
    },
    /// Zero-mean uniform with the given variance.
    Uniform {
        variance: f64,
    },
    /// Rayleigh with scale `sqrt(sigma_sq)`.
    Rayleigh {
        sigma_sq: f64,
        remove_mean: bool,
    },
    /// Deterministic square wave, positive for the first half period.
    Rectangular {
        amplitude: f64,
        period_samples: usize,
    },
    Exponential {
        mean: f64,
        remove_mean: bool,
    },
}

fn positive(x: f64, name: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(contract(format!("{name} must be positive and finite, got {x}")))
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::None => Ok(()),
            NoiseModel::Wgn { sigma } => positive(sigma, "sigma"),
            NoiseModel::BernoulliGaussianImpulsive { sigma_g, p_c, sigma_i, impulse_scale } => {
                positive(sigma_g, "sigma_g")?;
                positive(sigma_i, "sigma_i")?;
                positive(impulse_scale, "impulse_scale")?;
                if !(0.0..=1.0).contains(&p_c) {
                    return Err(contract(format!("p_c must lie in [0, 1], got {p_c}")));
                }
                Ok(())
            }
            NoiseModel::Uniform { variance } => positive(variance, "variance"),
            NoiseModel::Rayleigh { sigma_sq, .. } => positive(sigma_sq, "sigma_sq"),
            NoiseModel::Rectangular { amplitude, period_samples } => {
                positive(amplitude, "amplitude")?;
                if period_samples == 0 {
                    return Err(contract("rectangular period must be at least one sample"));
                }
                Ok(())
            }
            NoiseModel::Exponential { mean, .. } => positive(mean, "mean"),
        }
    }

    /// Theoretical mean and variance of one draw. The rectangular wave reports
    /// the time-average over one period.
    pub fn moments(&self) -> (f64, f64) {
        use std::f64::consts::PI;
        match *self {
            NoiseModel::None => (0.0, 0.0),
            NoiseModel::Wgn { sigma } => (0.0, sigma * sigma),
            NoiseModel::BernoulliGaussianImpulsive { sigma_g, p_c, sigma_i, impulse_scale } => {
                let s_i = impulse_scale * sigma_i;
                (0.0, sigma_g * sigma_g + p_c * s_i * s_i)
            }
            NoiseModel::Uniform { variance } => (0.0, variance),
            NoiseModel::Rayleigh { sigma_sq, remove_mean } => {
                let mean = (sigma_sq * PI / 2.0).sqrt();
                (if remove_mean { 0.0 } else { mean }, (4.0 - PI) / 2.0 * sigma_sq)
            }
            NoiseModel::Rectangular { amplitude, period_samples } => {
                let high = period_samples.div_ceil(2) as f64;
                let low = (period_samples / 2) as f64;
                let n = period_samples as f64;
                let mean = amplitude * (high - low) / n;
                (mean, amplitude * amplitude - mean * mean)
            }
            NoiseModel::Exponential { mean, remove_mean } => (if remove_mean { 0.0 } else { mean }, mean * mean),
        }
    }
}

/// Seed for a reproducible noise stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededRng {
    seed: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for one step of the stream.
    pub fn for_step(&self, step_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(step_index);
        rng
    }
}

fn gaussian<R: Rng>(rng: &mut R, sigma: f64) -> f64 {
    Normal::new(0.0, sigma).expect("validated sigma").sample(rng)
}

/// One additive noise value for position `step_index` of the stream.
pub fn sample_noise(model: &NoiseModel, rng: &SeededRng, step_index: u64) -> f64 {
    match *model {
        NoiseModel::None => 0.0,
        NoiseModel::Rectangular { amplitude, period_samples } => {
            let phase = (step_index % period_samples as u64) as usize;
            if phase < period_samples.div_ceil(2) {
                amplitude
            } else {
                -amplitude
            }
        }
        NoiseModel::Wgn { sigma } => gaussian(&mut rng.for_step(step_index), sigma),
        NoiseModel::BernoulliGaussianImpulsive { sigma_g, p_c, sigma_i, impulse_scale } => {
            let mut r = rng.for_step(step_index);
            let background = gaussian(&mut r, sigma_g);
            let hit = Bernoulli::new(p_c).expect("validated p_c").sample(&mut r);
            if hit {
                background + gaussian(&mut r, impulse_scale * sigma_i)
            } else {
                background
            }
        }
        NoiseModel::Uniform { variance } => {
            let a = (3.0 * variance).sqrt();
            rng.for_step(step_index).random_range(-a..a)
        }
        NoiseModel::Rayleigh { sigma_sq, remove_mean } => {
            let scale = sigma_sq.sqrt();
            let u: f64 = rng.for_step(step_index).random();
            // inverse CDF; 1 - u lies in (0, 1]
            let x = scale * (-2.0 * (1.0 - u).ln()).sqrt();
            if remove_mean {
                x - scale * (std::f64::consts::PI / 2.0).sqrt()
            } else {
                x
            }
        }
        NoiseModel::Exponential { mean, remove_mean } => {
            let x = Exp::new(1.0 / mean).expect("validated mean").sample(&mut rng.for_step(step_index));
            if remove_mean {
                x - mean
            } else {
                x
            }
        }
    }
}

/// `n` consecutive noise values starting at step 0.
pub fn noise_stream(model: &NoiseModel, rng: &SeededRng, n: usize) -> Vec<f64> {
    (0..n as u64).map(|i| sample_noise(model, rng, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangular_wave() {
        let m = NoiseModel::Rectangular { amplitude: 0.1, period_samples: 4 };
        let rng = SeededRng::new(3);
        let v = noise_stream(&m, &rng, 8);
        assert_eq!(v, vec![0.1, 0.1, -0.1, -0.1, 0.1, 0.1, -0.1, -0.1]);
        assert_eq!(noise_stream(&m, &SeededRng::new(99), 8), v);
        let odd = NoiseModel::Rectangular { amplitude: 1.0, period_samples: 3 };
        assert_eq!(noise_stream(&odd, &rng, 3), vec![1.0, 1.0, -1.0]);
    }

    #[test]
    fn uniform_support() {
        let m = NoiseModel::Uniform { variance: 5.0 };
        let a = 15f64.sqrt();
        assert!((a - 3.872_983_346_207_417).abs() < 1e-12);
        assert!(noise_stream(&m, &SeededRng::new(1), 10_000).iter().all(|x| x.abs() <= a));
    }

    #[test]
    fn streams_are_deterministic_and_seed_dependent() {
        let m = NoiseModel::Wgn { sigma: 1.0 };
        let a = noise_stream(&m, &SeededRng::new(5), 100);
        assert_eq!(a, noise_stream(&m, &SeededRng::new(5), 100));
        assert_ne!(a, noise_stream(&m, &SeededRng::new(6), 100));
        assert_eq!(sample_noise(&m, &SeededRng::new(5), 37), a[37]);
    }

    #[test]
    fn validation() {
        assert!(NoiseModel::Wgn { sigma: 0.0 }.validate().is_err());
        assert!(NoiseModel::BernoulliGaussianImpulsive { sigma_g: 1.0, p_c: 1.5, sigma_i: 1.0, impulse_scale: 1.0 }
            .validate()
            .is_err());
        assert!(NoiseModel::Rectangular { amplitude: 1.0, period_samples: 0 }.validate().is_err());
        assert!(NoiseModel::None.validate().is_ok());
    }
}
