//! Monte Carlo orchestration.

use std::time::{Duration, Instant};

use crate::analysis::{
    average_test_mse, corrupt, l_lower_bound, step_size_bound, to_db, train_and_evaluate, DivergenceMarker,
    LearningTrace, MseCurve, StabilityInputs,
};
use crate::bench::config::{ExperimentConfig, SignalSource};
use crate::error::{Error, Result};
use crate::filters::{FilterSpec, LorentzianSchedule, Sample};
use crate::kernel::{dominant_eigenvalue, gram_matrix, lambda_max, KernelParams};
use crate::noise::SeededRng;
use crate::signals::{builtin_sunspot, embed, load_sunspot, mackey_glass, split, Series};

/// Forgetting factor of the squared-error estimate behind the diagnostics.
pub const DIAGNOSTIC_THETA: f64 = LorentzianSchedule::DEFAULT_THETA;

/// Stability-bound diagnostics for one algorithm, pooled over replicas.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundDiagnostics {
    /// Top eigenvalue of the (feature-space or input) autocorrelation
    /// estimated from the clean training inputs.
    pub lambda_max: f64,
    /// Replica mean of the final root-mean-squared error estimate.
    pub final_sigma_e: f64,
    /// Step-size bound at the final error estimate.
    pub final_step_bound: f64,
    /// Steps (over all replicas) whose step size reached the bound.
    pub step_bound_violations: usize,
    pub first_step_violation: Option<usize>,
    /// For the Lorentzian schedule: `l` and its bound at the final step.
    pub l_check: Option<LCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LCheck {
    pub l: f64,
    pub final_l_bound: f64,
    pub violations: usize,
    pub first_violation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmResult {
    pub spec: FilterSpec,
    /// Replica-averaged testing MSE in dB.
    pub curve: MseCurve,
    /// Replica mean of the step size at each iteration.
    pub mu: Vec<f64>,
    /// Replica mean of the codebook (or tap) count at each iteration.
    pub model_size: Vec<f64>,
    /// Every replica that stopped early.
    pub divergences: Vec<DivergenceMarker>,
    pub diagnostics: BoundDiagnostics,
    /// Per-replica traces, in replica order.
    pub traces: Vec<LearningTrace>,
}

impl AlgorithmResult {
    pub fn name(&self) -> &'static str {
        self.spec.name()
    }

    pub fn final_model_size(&self) -> f64 {
        self.model_size.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    /// Testing MSE (dB) of the untrained, all-zero predictor.
    pub untrained_mse_db: f64,
    /// Factor applied to the series and the noise.
    pub signal_scale: f64,
    pub algorithms: Vec<AlgorithmResult>,
    /// Not written to any output file.
    pub wall_clock: Duration,
}

impl RunResult {
    pub fn algorithm(&self, name: &str) -> Option<&AlgorithmResult> {
        self.algorithms.iter().find(|a| a.name() == name)
    }
}

/// Embedded and split data for an experiment.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    /// Multiplies the noise so it stays in the series' original units.
    pub scale: f64,
}

/// Generates or loads the series and embeds, normalizes and splits it.
pub fn prepare_data(cfg: &ExperimentConfig) -> Result<PreparedData> {
    cfg.validate()?;
    let needed = cfg.n_train + cfg.n_test + cfg.embedding_order;
    let series = match &cfg.signal {
        SignalSource::MackeyGlass { params, samples } => mackey_glass(params, samples.unwrap_or(needed), None)?,
        SignalSource::Sunspot { path: Some(p) } => load_sunspot(p)?,
        SignalSource::Sunspot { path: None } => builtin_sunspot(),
    };
    if series.len() < needed {
        return Err(Error::Config(format!(
            "signal has {} samples; order {} with a {}/{} split needs {needed}",
            series.len(),
            cfg.embedding_order,
            cfg.n_train,
            cfg.n_test
        )));
    }
    let scale = if cfg.normalize {
        let peak = series.peak();
        if peak > 0.0 {
            1.0 / peak
        } else {
            1.0
        }
    } else {
        1.0
    };
    let series = Series { values: series.values.iter().map(|x| x * scale).collect(), origin: series.origin };
    let samples = embed(&series, cfg.embedding_order)?;
    let (train, test) = split(&samples, cfg.n_train, cfg.n_test)?;
    Ok(PreparedData { train: train.to_vec(), test: test.to_vec(), scale })
}

/// Top eigenvalue used by the diagnostics: the sample-scaled Gram matrix for
/// kernel filters, the input autocorrelation matrix for the linear one.
pub fn autocorrelation_lambda_max(spec: &FilterSpec, train: &[Sample]) -> Result<f64> {
    let inputs: Vec<&[f64]> = train.iter().map(|s| s.input.as_slice()).collect();
    match spec.kernel_h() {
        Some(h) => lambda_max(&gram_matrix(&inputs, KernelParams::new(h)?)?),
        None => {
            let p = inputs[0].len();
            let mut r = vec![0.0; p * p];
            for u in &inputs {
                for i in 0..p {
                    for j in 0..p {
                        r[i * p + j] += u[i] * u[j];
                    }
                }
            }
            let n = inputs.len() as f64;
            r.iter_mut().for_each(|x| *x /= n);
            dominant_eigenvalue(&r, p)
        }
    }
}

fn diagnose(spec: &FilterSpec, lambda: f64, traces: &[LearningTrace]) -> BoundDiagnostics {
    let lorentzian = match spec {
        FilterSpec::VssKlmat { schedule, .. } => Some(*schedule),
        _ => None,
    };
    let mut step_violations = 0;
    let mut first_step = None;
    let mut l_violations = 0;
    let mut first_l = None;
    let mut sigma_sum = 0.0;
    let mut last_e_sq_sum = 0.0;
    for trace in traces {
        let mut delta_e = 0.0;
        let mut sigma_e = 0.0;
        for (n, (&e, &mu)) in trace.train_error.iter().zip(&trace.mu).enumerate() {
            delta_e = DIAGNOSTIC_THETA * delta_e + (1.0 - DIAGNOSTIC_THETA) * e * e;
            sigma_e = delta_e.sqrt();
            if sigma_e <= 0.0 {
                continue;
            }
            let inp = StabilityInputs { sigma_e, lambda_max: lambda, beta: 0.0, e_sq: e * e };
            if mu >= step_size_bound(&inp) {
                step_violations += 1;
                first_step = Some(first_step.map_or(n, |f: usize| f.min(n)));
            }
            if let Some(s) = lorentzian {
                if s.l <= l_lower_bound(&StabilityInputs { beta: s.beta, ..inp }) {
                    l_violations += 1;
                    first_l = Some(first_l.map_or(n, |f: usize| f.min(n)));
                }
            }
        }
        sigma_sum += sigma_e;
        last_e_sq_sum += trace.train_error.last().map_or(0.0, |e| e * e);
    }
    let n = traces.len().max(1) as f64;
    let final_sigma_e = sigma_sum / n;
    let final_inp = StabilityInputs { sigma_e: final_sigma_e, lambda_max: lambda, beta: 0.0, e_sq: last_e_sq_sum / n };
    BoundDiagnostics {
        lambda_max: lambda,
        final_sigma_e,
        final_step_bound: step_size_bound(&final_inp),
        step_bound_violations: step_violations,
        first_step_violation: first_step,
        l_check: lorentzian.map(|s| LCheck {
            l: s.l,
            final_l_bound: l_lower_bound(&StabilityInputs { beta: s.beta, ..final_inp }),
            violations: l_violations,
            first_violation: first_l,
        }),
    }
}

fn run_replica(cfg: &ExperimentConfig, data: &PreparedData, seed: u64) -> Result<Vec<LearningTrace>> {
    let noisy = corrupt(&data.train, &cfg.noise, &SeededRng::new(seed), data.scale)?;
    cfg.algorithms
        .iter()
        .map(|spec| {
            let mut filter = spec.build(cfg.embedding_order)?;
            train_and_evaluate(filter.as_mut(), &noisy, &data.test)
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn run_replicas(cfg: &ExperimentConfig, data: &PreparedData, seeds: &[u64]) -> Result<Vec<Vec<LearningTrace>>> {
    use rayon::prelude::*;
    seeds.par_iter().map(|&s| run_replica(cfg, data, s)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_replicas(cfg: &ExperimentConfig, data: &PreparedData, seeds: &[u64]) -> Result<Vec<Vec<LearningTrace>>> {
    seeds.iter().map(|&s| run_replica(cfg, data, s)).collect()
}

fn replica_mean<T: Copy>(
    traces: &[LearningTrace],
    len: usize,
    field: impl Fn(&LearningTrace) -> &[T],
    f: impl Fn(T) -> f64,
) -> Vec<f64> {
    let n = traces.len() as f64;
    (0..len).map(|i| traces.iter().fold(0.0, |acc, t| acc + f(field(t)[i])) / n).collect()
}

/// Runs every configured algorithm on every replica.
///
/// Replica `r` uses seed `base_seed + r`, and within a replica all algorithms
/// train on the same corrupted targets. Curves average the linear MSE over
/// replicas, in replica order, before converting to dB.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult> {
    let started = Instant::now();
    let data = prepare_data(cfg)?;
    let seeds: Vec<u64> = (0..cfg.n_replicas as u64).map(|r| cfg.base_seed.wrapping_add(r)).collect();
    let per_replica = run_replicas(cfg, &data, &seeds)?;

    let untrained = data.test.iter().map(|s| s.desired * s.desired).sum::<f64>() / data.test.len() as f64;
    let digest = cfg.digest();
    let mut algorithms = Vec::with_capacity(cfg.algorithms.len());
    for (k, spec) in cfg.algorithms.iter().enumerate() {
        let mut traces: Vec<LearningTrace> = per_replica.iter().map(|r| r[k].clone()).collect();
        let mut divergences = Vec::new();
        for (r, t) in traces.iter_mut().enumerate() {
            if let Some(d) = t.divergence.as_mut() {
                d.replica = Some(r);
                divergences.push(*d);
            }
        }
        let mean_mse = average_test_mse(&traces);
        let len = mean_mse.len();
        let lambda = autocorrelation_lambda_max(spec, &data.train)?;
        let diagnostics = diagnose(spec, lambda, &traces);
        if diagnostics.step_bound_violations > 0 {
            log::warn!(
                "{}: step size reached the mean-convergence bound on {} steps (first at step {})",
                spec.name(),
                diagnostics.step_bound_violations,
                diagnostics.first_step_violation.unwrap_or(0)
            );
        }
        if let Some(l) = diagnostics.l_check.filter(|l| l.violations > 0) {
            log::warn!("{}: l = {} fell below its lower bound on {} steps", spec.name(), l.l, l.violations);
        }
        for d in &divergences {
            log::warn!("{}: replica {:?} diverged at step {}", spec.name(), d.replica, d.step);
        }
        let earliest = divergences.iter().min_by_key(|d| d.step).copied();
        algorithms.push(AlgorithmResult {
            spec: spec.clone(),
            curve: MseCurve {
                values_db: mean_mse.iter().map(|&m| to_db(m)).collect(),
                n_replicas: traces.len(),
                config_digest: digest.clone(),
                divergence: earliest,
            },
            mu: replica_mean(&traces, len, |t| &t.mu, |x| x),
            model_size: replica_mean(&traces, len, |t| &t.model_size, |x| x as f64),
            divergences,
            diagnostics,
            traces,
        });
    }
    Ok(RunResult {
        config: cfg.clone(),
        seeds,
        untrained_mse_db: to_db(untrained),
        signal_scale: data.scale,
        algorithms,
        wall_clock: started.elapsed(),
    })
}
