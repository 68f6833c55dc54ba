//! Testing-MSE learning curves and the step-size stability diagnostics.

use std::f64::consts::{LN_10, PI};

use crate::error::{contract, Error, Result};
use crate::filters::{FilterSpec, OnlineFilter, Sample};
use crate::noise::{sample_noise, NoiseModel, SeededRng};

/// Reported in place of `10 log10(0)`.
pub const MSE_FLOOR_DB: f64 = -320.0;

/// `10 log10` of a mean squared error, floored at [`MSE_FLOOR_DB`].
pub fn to_db(mse: f64) -> f64 {
    if mse > 0.0 {
        (10.0 * mse.log10()).max(MSE_FLOOR_DB)
    } else {
        MSE_FLOOR_DB
    }
}

/// `10 log10(mean(e^2))`.
pub fn mse_db(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(contract("mse of an empty error list"));
    }
    Ok(to_db(mean_square(errors)))
}

fn mean_square(errors: &[f64]) -> f64 {
    errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64
}

/// Where and how a run stopped early.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceMarker {
    /// Zero-based training step that failed.
    pub step: usize,
    pub magnitude: f64,
    /// Replica in which it happened, when known.
    pub replica: Option<usize>,
}

/// Per-step record of one training run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LearningTrace {
    /// Linear testing MSE after each step.
    pub test_mse: Vec<f64>,
    /// Training error at each step.
    pub train_error: Vec<f64>,
    /// Step size used at each step.
    pub mu: Vec<f64>,
    /// Model size after each step.
    pub model_size: Vec<usize>,
    pub divergence: Option<DivergenceMarker>,
}

impl LearningTrace {
    pub fn len(&self) -> usize {
        self.test_mse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.test_mse.is_empty()
    }

    pub fn test_mse_db(&self) -> Vec<f64> {
        self.test_mse.iter().map(|&m| to_db(m)).collect()
    }
}

/// Trains `filter` on `train` (targets already corrupted) and records the
/// testing MSE on `test` after every step.
///
/// A divergence truncates the trace and is reported in
/// [`LearningTrace::divergence`]; other errors are returned.
pub fn train_and_evaluate(filter: &mut dyn OnlineFilter, train: &[Sample], test: &[Sample]) -> Result<LearningTrace> {
    if train.is_empty() || test.is_empty() {
        return Err(contract("training and test sets must be nonempty"));
    }
    let mut trace = LearningTrace {
        test_mse: Vec::with_capacity(train.len()),
        train_error: Vec::with_capacity(train.len()),
        mu: Vec::with_capacity(train.len()),
        model_size: Vec::with_capacity(train.len()),
        divergence: None,
    };
    let mut predictions: Vec<f64> = test.iter().map(|s| filter.predict(&s.input)).collect::<Result<_>>()?;
    let mut residuals = vec![0.0; test.len()];
    for (n, sample) in train.iter().enumerate() {
        let outcome = match filter.step(sample) {
            Ok(o) => o,
            Err(Error::Divergence { step, magnitude }) => {
                trace.divergence = Some(DivergenceMarker { step, magnitude, replica: None });
                break;
            }
            Err(e) => return Err(e),
        };
        filter.refresh_predictions(&outcome, test, &mut predictions)?;
        for ((r, p), s) in residuals.iter_mut().zip(&predictions).zip(test) {
            *r = s.desired - p;
        }
        let mse = mean_square(&residuals);
        if !mse.is_finite() {
            trace.divergence = Some(DivergenceMarker { step: n, magnitude: outcome.error.abs(), replica: None });
            break;
        }
        trace.test_mse.push(mse);
        trace.train_error.push(outcome.error);
        trace.mu.push(outcome.mu);
        trace.model_size.push(filter.model_size());
    }
    Ok(trace)
}

/// Copies `train` with `scale * noise[n]` added to each desired value.
pub fn corrupt(train: &[Sample], noise: &NoiseModel, rng: &SeededRng, scale: f64) -> Result<Vec<Sample>> {
    noise.validate()?;
    Ok(train
        .iter()
        .enumerate()
        .map(|(n, s)| Sample::new(s.input.clone(), s.desired + scale * sample_noise(noise, rng, n as u64)))
        .collect())
}

/// Testing-MSE learning curve in dB, one point per training step.
#[derive(Debug, Clone, PartialEq)]
pub struct MseCurve {
    pub values_db: Vec<f64>,
    pub n_replicas: usize,
    pub config_digest: String,
    pub divergence: Option<DivergenceMarker>,
}

/// Corrupts the training targets with `noise`, trains the configured filter
/// and evaluates it on the clean test set after every step.
pub fn testing_mse_curve(
    train: &[Sample],
    test: &[Sample],
    filter: &FilterSpec,
    noise: &NoiseModel,
    rng: &SeededRng,
) -> Result<MseCurve> {
    let dim = train.first().map(|s| s.input.len()).ok_or_else(|| contract("empty training set"))?;
    let noisy = corrupt(train, noise, rng, 1.0)?;
    let mut f = filter.build(dim)?;
    let trace = train_and_evaluate(f.as_mut(), &noisy, test)?;
    Ok(MseCurve {
        values_db: trace.test_mse_db(),
        n_replicas: 1,
        config_digest: format!("{filter:?}|{noise:?}|seed={}", rng.seed()),
        divergence: trace.divergence,
    })
}

/// Averages linear MSE across replicas in replica order. The result is as
/// long as the shortest trace.
pub fn average_test_mse(traces: &[LearningTrace]) -> Vec<f64> {
    let len = traces.iter().map(LearningTrace::len).min().unwrap_or(0);
    let n = traces.len() as f64;
    (0..len).map(|i| traces.iter().fold(0.0, |acc, t| acc + t.test_mse[i]) / n).collect()
}

/// Quantities entering the step-size and `l` bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityInputs {
    /// Root-mean-squared error estimate.
    pub sigma_e: f64,
    /// Largest eigenvalue of the input autocorrelation.
    pub lambda_max: f64,
    pub beta: f64,
    /// Current squared error.
    pub e_sq: f64,
}

/// Sufficient mean-convergence bound `sqrt(pi/2) / (sigma_e lambda_max)`;
/// the step size should stay strictly below it.
pub fn step_size_bound(inp: &StabilityInputs) -> f64 {
    (PI / 2.0).sqrt() / (inp.sigma_e * inp.lambda_max)
}

/// Lower bound on the Lorentzian parameter `l`:
/// `e^2 sigma_e lambda_max beta / (sqrt(2 pi) ln 10)`.
pub fn l_lower_bound(inp: &StabilityInputs) -> f64 {
    inp.e_sq * inp.sigma_e * inp.lambda_max * inp.beta / ((2.0 * PI).sqrt() * LN_10)
}

/// Derivative of `|e|^3`: `3 e^2 sign(e)`.
pub fn gradient_oracle(e: f64) -> f64 {
    3.0 * e * e.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::FilterSpec;

    #[test]
    fn mse_db_values() {
        assert_eq!(mse_db(&[1.0, 1.0, -1.0]).unwrap(), 0.0);
        assert!((mse_db(&[0.1; 5]).unwrap() + 20.0).abs() < 1e-12);
        // 10 log10(0.5) = -3.010299956639812
        assert!((mse_db(&[1.0, 0.0]).unwrap() + 3.010_299_956_639_812).abs() < 1e-12);
        assert_eq!(mse_db(&[0.0, 0.0]).unwrap(), MSE_FLOOR_DB);
        assert!(mse_db(&[]).is_err());
    }

    #[test]
    fn bounds_closed_forms() {
        let one = StabilityInputs { sigma_e: 1.0, lambda_max: 1.0, beta: 1.0, e_sq: 1.0 };
        assert!((step_size_bound(&one) - 1.253_314_137_315_500_3).abs() < 1e-12);
        assert!((l_lower_bound(&one) - 0.173_258_430_976_242_02).abs() < 1e-12);
        let doubled = StabilityInputs { sigma_e: 2.0, ..one };
        assert!((step_size_bound(&doubled) - step_size_bound(&one) / 2.0).abs() < 1e-15);
        assert!(step_size_bound(&StabilityInputs { lambda_max: 1e12, ..one }) < 1e-11);
        assert_eq!(l_lower_bound(&StabilityInputs { e_sq: 0.0, ..one }), 0.0);
        let b3 = StabilityInputs { beta: 3.0, ..one };
        assert!((l_lower_bound(&b3) - 3.0 * l_lower_bound(&one)).abs() < 1e-15);
    }

    #[test]
    fn gradient_values() {
        assert_eq!(gradient_oracle(0.0), 0.0);
        assert_eq!(gradient_oracle(1.0), 3.0);
        assert_eq!(gradient_oracle(-2.0), -12.0);
    }

    fn constant_samples(n: usize, c: f64) -> Vec<Sample> {
        (0..n).map(|_| Sample::new(vec![c], c)).collect()
    }

    #[test]
    fn constant_series_converges() {
        // mu * e = 1 on the first step, so one exact center fits the series
        let train = constant_samples(60, 0.5);
        let test = constant_samples(10, 0.5);
        let spec = FilterSpec::Klmat { mu: 2.0, h: 1.0 };
        let curve = testing_mse_curve(&train, &test, &spec, &NoiseModel::None, &SeededRng::new(0)).unwrap();
        assert_eq!(curve.values_db.len(), 60);
        assert!(curve.values_db.windows(2).all(|w| w[1] <= w[0]));
        assert!(*curve.values_db.last().unwrap() <= -100.0);
    }

    #[test]
    fn divergence_truncates() {
        let train: Vec<Sample> =
            (0..50).map(|i| Sample::new(vec![0.0], if i % 2 == 0 { 10.0 } else { -10.0 })).collect();
        let test = constant_samples(3, 0.0);
        let spec = FilterSpec::Klmat { mu: 2.0, h: 1.0 };
        let curve = testing_mse_curve(&train, &test, &spec, &NoiseModel::None, &SeededRng::new(0)).unwrap();
        let marker = curve.divergence.expect("diverges");
        assert_eq!(curve.values_db.len(), marker.step);
        assert!(curve.values_db.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn average_is_linear_and_truncating() {
        let a = LearningTrace { test_mse: vec![1.0, 0.5, 0.25], ..Default::default() };
        let b = LearningTrace { test_mse: vec![3.0, 1.5], ..Default::default() };
        assert_eq!(average_test_mse(&[a, b]), vec![2.0, 1.0]);
    }
}
