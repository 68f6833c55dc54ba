use super::{abs_third_gain, check_input, OnlineFilter, Sample, StepOutcome};
use crate::error::{contract, Error, Result};

/// Linear least-mean-absolute-third filter: `w <- w + mu e^2 sign(e) u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFilter {
    w: Vec<f64>,
    mu: f64,
    step_count: usize,
}

impl LinearFilter {
    pub fn new(dim: usize, mu: f64) -> Result<Self> {
        if dim == 0 {
            return Err(contract("filter order must be at least 1"));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(contract(format!("step size must be positive, got {mu}")));
        }
        Ok(Self { w: vec![0.0; dim], mu, step_count: 0 })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    fn dot(&self, u: &[f64]) -> f64 {
        self.w.iter().zip(u).map(|(a, b)| a * b).sum()
    }
}

impl OnlineFilter for LinearFilter {
    fn step(&mut self, sample: &Sample) -> Result<StepOutcome> {
        check_input(&sample.input, self.w.len())?;
        let prediction = self.dot(&sample.input);
        let error = sample.desired - prediction;
        let scale = self.mu * abs_third_gain(error);
        let updated: Vec<f64> = self.w.iter().zip(&sample.input).map(|(w, u)| w + scale * u).collect();
        if !error.is_finite() || updated.iter().any(|w| !w.is_finite()) {
            return Err(Error::Divergence { step: self.step_count, magnitude: error.abs() });
        }
        self.w = updated;
        self.step_count += 1;
        Ok(StepOutcome { prediction, error, mu: self.mu, admitted: true })
    }

    fn predict(&self, input: &[f64]) -> Result<f64> {
        check_input(input, self.w.len())?;
        Ok(self.dot(input))
    }

    fn model_size(&self) -> usize {
        self.w.len()
    }

    fn steps(&self) -> usize {
        self.step_count
    }
}
