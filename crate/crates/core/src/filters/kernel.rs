use super::{abs_third_gain, check_input, nc_gate, NcParams, OnlineFilter, Sample, StepOutcome, StepSizeSchedule};
use crate::error::{contract, Error, Result};
use crate::kernel::{kernel_unchecked, KernelParams};

/// Centers and their expansion coefficients. The learned function is
/// `f(u) = sum_j coeffs[j] * k(centers[j], u)`; the step size is already
/// folded into each coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    dim: usize,
    centers: Vec<f64>,
    coeffs: Vec<f64>,
}

impl Codebook {
    pub fn new(dim: usize) -> Self {
        Self { dim, centers: Vec::new(), coeffs: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn center(&self, j: usize) -> &[f64] {
        &self.centers[j * self.dim..(j + 1) * self.dim]
    }

    pub fn centers(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.centers.chunks_exact(self.dim.max(1)).take(self.len())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub(crate) fn push(&mut self, center: &[f64], coeff: f64) {
        debug_assert_eq!(center.len(), self.dim);
        self.centers.extend_from_slice(center);
        self.coeffs.push(coeff);
    }

    /// Kernel expansion at `u`, summed in insertion order from zero.
    pub(crate) fn evaluate(&self, u: &[f64], h: f64) -> f64 {
        let mut acc = 0.0;
        for (c, a) in self.centers().zip(&self.coeffs) {
            acc += a * kernel_unchecked(c, u, h);
        }
        acc
    }
}

/// Error nonlinearity applied before a new coefficient is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelAlgorithm {
    /// `g(e) = e`
    Klms,
    /// `g(e) = e^2 sign(e)`, the stochastic gradient of `|e|^3 / 3`
    Klmat,
}

impl KernelAlgorithm {
    #[inline]
    pub fn gain(self, error: f64) -> f64 {
        match self {
            KernelAlgorithm::Klms => error,
            KernelAlgorithm::Klmat => abs_third_gain(error),
        }
    }
}

/// Growing-codebook kernel adaptive filter (KLMS or KLMAT, with optional
/// variable step size and novelty gate).
#[derive(Debug, Clone)]
pub struct KernelFilter {
    algorithm: KernelAlgorithm,
    codebook: Codebook,
    kernel: KernelParams,
    schedule: StepSizeSchedule,
    nc: NcParams,
    step_count: usize,
}

impl KernelFilter {
    pub fn new(
        algorithm: KernelAlgorithm,
        dim: usize,
        kernel: KernelParams,
        schedule: StepSizeSchedule,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(contract("filter order must be at least 1"));
        }
        if let StepSizeSchedule::Lorentzian(s) = &schedule {
            s.validate()?;
        }
        Ok(Self { algorithm, codebook: Codebook::new(dim), kernel, schedule, nc: NcParams::disabled(), step_count: 0 })
    }

    pub fn with_novelty(mut self, nc: NcParams) -> Self {
        self.nc = nc;
        self
    }

    pub fn algorithm(&self) -> KernelAlgorithm {
        self.algorithm
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn kernel(&self) -> KernelParams {
        self.kernel
    }

    pub fn schedule(&self) -> &StepSizeSchedule {
        &self.schedule
    }

    pub fn novelty(&self) -> &NcParams {
        &self.nc
    }
}

impl OnlineFilter for KernelFilter {
    fn step(&mut self, sample: &Sample) -> Result<StepOutcome> {
        check_input(&sample.input, self.codebook.dim())?;
        if !sample.desired.is_finite() {
            return Err(contract("desired value must be finite"));
        }
        let prediction = self.codebook.evaluate(&sample.input, self.kernel.h());
        let error = sample.desired - prediction;
        if !error.is_finite() {
            return Err(Error::Divergence { step: self.step_count, magnitude: error.abs() });
        }
        let mut schedule = self.schedule;
        let mu = schedule.next(error);
        let coeff = mu * self.algorithm.gain(error);
        if !coeff.is_finite() {
            return Err(Error::Divergence { step: self.step_count, magnitude: error.abs() });
        }
        let admitted = nc_gate(&self.codebook, &sample.input, error, &self.nc);
        if admitted {
            self.codebook.push(&sample.input, coeff);
        }
        self.schedule = schedule;
        self.step_count += 1;
        Ok(StepOutcome { prediction, error, mu, admitted })
    }

    fn predict(&self, input: &[f64]) -> Result<f64> {
        check_input(input, self.codebook.dim())?;
        Ok(self.codebook.evaluate(input, self.kernel.h()))
    }

    fn model_size(&self) -> usize {
        self.codebook.len()
    }

    fn steps(&self) -> usize {
        self.step_count
    }

    fn refresh_predictions(&self, outcome: &StepOutcome, inputs: &[Sample], predictions: &mut [f64]) -> Result<()> {
        if !outcome.admitted {
            return Ok(());
        }
        let last = self.codebook.len() - 1;
        let center = self.codebook.center(last);
        let coeff = self.codebook.coeffs()[last];
        let h = self.kernel.h();
        for (p, s) in predictions.iter_mut().zip(inputs) {
            check_input(&s.input, self.codebook.dim())?;
            *p += coeff * kernel_unchecked(center, &s.input, h);
        }
        Ok(())
    }
}
