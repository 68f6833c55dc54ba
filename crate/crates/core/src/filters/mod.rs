//! Online learners sharing one contract: observe `(input, desired)`, emit the
//! prediction and error, then update.

mod kernel;
mod linear;
mod novelty;
mod step_size;

pub use kernel::{Codebook, KernelAlgorithm, KernelFilter};
pub use linear::LinearFilter;
pub use novelty::{nc_gate, NcParams};
pub use step_size::{lorentzian_step_size, LorentzianSchedule, StepSizeSchedule};

use crate::error::{contract, Result};
use crate::kernel::KernelParams;

/// An embedded input vector paired with its desired output.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<f64>,
    pub desired: f64,
}

impl Sample {
    pub fn new(input: Vec<f64>, desired: f64) -> Self {
        Self { input, desired }
    }
}

/// What one training step observed and did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// Prediction of the filter before the update.
    pub prediction: f64,
    /// `desired - prediction`.
    pub error: f64,
    /// Step size applied (or that would have been applied, if the sample was
    /// rejected by a sparsification gate).
    pub mu: f64,
    /// Whether the update was applied.
    pub admitted: bool,
}

pub trait OnlineFilter {
    /// Predicts, computes the error and adapts. On error the filter is left
    /// unchanged.
    fn step(&mut self, sample: &Sample) -> Result<StepOutcome>;

    fn predict(&self, input: &[f64]) -> Result<f64>;

    /// Number of stored parameters that grow with training: codebook entries
    /// for kernel filters, taps for linear ones.
    fn model_size(&self) -> usize;

    /// Number of completed training steps.
    fn steps(&self) -> usize;

    /// Brings cached predictions for `inputs` up to date after `outcome`.
    ///
    /// Kernel filters only add one term per admitted sample, so they override
    /// this with an O(len(inputs)) update that is bit-identical to calling
    /// [`OnlineFilter::predict`] afresh.
    fn refresh_predictions(&self, _outcome: &StepOutcome, inputs: &[Sample], predictions: &mut [f64]) -> Result<()> {
        for (p, s) in predictions.iter_mut().zip(inputs) {
            *p = self.predict(&s.input)?;
        }
        Ok(())
    }
}

/// Configuration for one of the five supported learners.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterSpec {
    Lmat { mu: f64 },
    Klms { mu: f64, h: f64 },
    Klmat { mu: f64, h: f64 },
    VssKlmat { h: f64, schedule: LorentzianSchedule },
    NcKlmat { mu: f64, h: f64, dist_threshold: f64, err_threshold: f64 },
}

impl FilterSpec {
    pub fn name(&self) -> &'static str {
        match self {
            FilterSpec::Lmat { .. } => "lmat",
            FilterSpec::Klms { .. } => "klms",
            FilterSpec::Klmat { .. } => "klmat",
            FilterSpec::VssKlmat { .. } => "vss-klmat",
            FilterSpec::NcKlmat { .. } => "nc-klmat",
        }
    }

    /// Kernel bandwidth, if this is a kernel filter.
    pub fn kernel_h(&self) -> Option<f64> {
        match *self {
            FilterSpec::Lmat { .. } => None,
            FilterSpec::Klms { h, .. }
            | FilterSpec::Klmat { h, .. }
            | FilterSpec::VssKlmat { h, .. }
            | FilterSpec::NcKlmat { h, .. } => Some(h),
        }
    }

    pub fn build(&self, dim: usize) -> Result<Box<dyn OnlineFilter + Send>> {
        Ok(match *self {
            FilterSpec::Lmat { mu } => Box::new(LinearFilter::new(dim, mu)?),
            FilterSpec::Klms { mu, h } => Box::new(KernelFilter::new(
                KernelAlgorithm::Klms,
                dim,
                KernelParams::new(h)?,
                StepSizeSchedule::fixed(mu)?,
            )?),
            FilterSpec::Klmat { mu, h } => Box::new(KernelFilter::new(
                KernelAlgorithm::Klmat,
                dim,
                KernelParams::new(h)?,
                StepSizeSchedule::fixed(mu)?,
            )?),
            FilterSpec::VssKlmat { h, schedule } => {
                schedule.validate()?;
                Box::new(KernelFilter::new(
                    KernelAlgorithm::Klmat,
                    dim,
                    KernelParams::new(h)?,
                    StepSizeSchedule::Lorentzian(schedule),
                )?)
            }
            FilterSpec::NcKlmat { mu, h, dist_threshold, err_threshold } => Box::new(
                KernelFilter::new(KernelAlgorithm::Klmat, dim, KernelParams::new(h)?, StepSizeSchedule::fixed(mu)?)?
                    .with_novelty(NcParams::new(dist_threshold, err_threshold)?),
            ),
        })
    }
}

pub(crate) fn check_input(input: &[f64], dim: usize) -> Result<()> {
    if input.len() != dim {
        return Err(contract(format!("input has length {}, filter order is {dim}", input.len())));
    }
    if input.iter().any(|x| !x.is_finite()) {
        return Err(contract("input vector has non-finite entries"));
    }
    Ok(())
}

/// `e^2 sign(e)`, the error nonlinearity of the absolute-third cost.
#[inline]
pub fn abs_third_gain(e: f64) -> f64 {
    e * e.abs()
}
