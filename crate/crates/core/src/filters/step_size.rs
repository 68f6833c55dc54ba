use crate::error::{contract, Result};

/// Step-size rule of a kernel filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSizeSchedule {
    Fixed { mu: f64 },
    Lorentzian(LorentzianSchedule),
}

impl StepSizeSchedule {
    pub fn fixed(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(contract(format!("step size must be positive, got {mu}")));
        }
        Ok(StepSizeSchedule::Fixed { mu })
    }

    /// Step size to use for a sample with the given error. Advances the
    /// internal estimator of a Lorentzian schedule.
    pub fn next(&mut self, error: f64) -> f64 {
        match self {
            StepSizeSchedule::Fixed { mu } => *mu,
            StepSizeSchedule::Lorentzian(s) => s.vss_step(error),
        }
    }
}

/// Variable step size driven by a low-pass estimate of the squared error:
///
/// ```text
/// delta_e <- theta * delta_e + (1 - theta) * e^2
/// mu      =  clamp(beta * log10(1 + delta_e / (2 l^2)), mu_min, mu_max)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianSchedule {
    pub beta: f64,
    pub l: f64,
    pub theta: f64,
    pub delta_e: f64,
    pub mu_min: f64,
    pub mu_max: f64,
}

impl LorentzianSchedule {
    pub const DEFAULT_THETA: f64 = 0.9;
    pub const DEFAULT_MU_MIN: f64 = 0.01;
    pub const DEFAULT_MU_MAX: f64 = 2.0;

    /// Schedule with the default forgetting factor and clamp range and a zero
    /// initial error estimate.
    pub fn new(beta: f64, l: f64) -> Result<Self> {
        let s = Self {
            beta,
            l,
            theta: Self::DEFAULT_THETA,
            delta_e: 0.0,
            mu_min: Self::DEFAULT_MU_MIN,
            mu_max: Self::DEFAULT_MU_MAX,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let finite =
            [self.beta, self.l, self.theta, self.delta_e, self.mu_min, self.mu_max].iter().all(|x| x.is_finite());
        if !finite {
            return Err(contract("Lorentzian schedule parameters must be finite"));
        }
        if self.beta <= 0.0 {
            return Err(contract(format!("beta must be positive, got {}", self.beta)));
        }
        if self.l <= 0.0 {
            return Err(contract(format!("l must be positive, got {}", self.l)));
        }
        if !(0.0..1.0).contains(&self.theta) {
            return Err(contract(format!("theta must lie in [0, 1), got {}", self.theta)));
        }
        if self.delta_e < 0.0 {
            return Err(contract("delta_e must be nonnegative"));
        }
        if !(0.0 < self.mu_min && self.mu_min < self.mu_max) {
            return Err(contract(format!("need 0 < mu_min < mu_max, got {} and {}", self.mu_min, self.mu_max)));
        }
        Ok(())
    }

    /// Unclamped step size for a given error-power estimate.
    pub fn raw_step_size(&self, delta_e: f64) -> f64 {
        lorentzian_step_size(self.beta, self.l, delta_e)
    }

    /// Folds `error` into the estimator and returns the clamped step size.
    pub fn vss_step(&mut self, error: f64) -> f64 {
        self.delta_e = self.theta * self.delta_e + (1.0 - self.theta) * error * error;
        self.raw_step_size(self.delta_e).clamp(self.mu_min, self.mu_max)
    }

    /// Root-mean-squared error estimate `sqrt(delta_e)`.
    pub fn sigma_e(&self) -> f64 {
        self.delta_e.sqrt()
    }
}

/// `beta * log10(1 + delta / (2 l^2))`.
pub fn lorentzian_step_size(beta: f64, l: f64, delta: f64) -> f64 {
    beta * (delta / (2.0 * l * l)).ln_1p() / std::f64::consts::LN_10
}
