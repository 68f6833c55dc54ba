//! Benchmark time series: Mackey-Glass generation, sunspot ingestion, delay
//! embedding and train/test splitting.

use std::collections::VecDeque;
use std::path::Path;

use crate::error::{contract, Error, Result};
use crate::filters::Sample;

/// First and last year of the annual sunspot record.
pub const SUNSPOT_FIRST_YEAR: i64 = 1700;
pub const SUNSPOT_LAST_YEAR: i64 = 1997;
pub const SUNSPOT_LEN: usize = (SUNSPOT_LAST_YEAR - SUNSPOT_FIRST_YEAR + 1) as usize;

const BUILTIN_SUNSPOT: &str = include_str!("../data/sunspot_1700_1997.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOrigin {
    MackeyGlass,
    Sunspot,
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub values: Vec<f64>,
    pub origin: SeriesOrigin,
}

impl Series {
    pub fn new(values: Vec<f64>, origin: SeriesOrigin) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(contract("series values must be finite"));
        }
        Ok(Self { values, origin })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest absolute value, used to rescale a series to unit peak.
    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Parameters of `dx/dt = -q x(t) + m x(t - tau) / (1 + x(t - tau)^10)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgParams {
    pub q: f64,
    pub m: f64,
    pub tau: f64,
    /// Integration step.
    pub dt: f64,
    /// Time between emitted samples.
    pub sample_period: f64,
    /// Constant history `x(t)` for `t <= 0`.
    pub history_value: f64,
    /// Emitted samples discarded before output starts.
    pub warmup: usize,
}

impl Default for MgParams {
    fn default() -> Self {
        Self { q: 0.1, m: 0.2, tau: 30.0, dt: 0.1, sample_period: 6.0, history_value: 1.2, warmup: 100 }
    }
}

fn steps_of(len: f64, dt: f64, what: &str) -> Result<usize> {
    let ratio = len / dt;
    let steps = ratio.round();
    if !(steps >= 1.0 && (ratio - steps).abs() <= 1e-9 * steps) {
        return Err(contract(format!("{what} ({len}) must be a positive integer multiple of dt ({dt})")));
    }
    Ok(steps as usize)
}

impl MgParams {
    fn validate(&self) -> Result<(usize, usize)> {
        let all_finite =
            [self.q, self.m, self.tau, self.dt, self.sample_period, self.history_value].iter().all(|x| x.is_finite());
        if !all_finite {
            return Err(contract("Mackey-Glass parameters must be finite"));
        }
        if self.dt <= 0.0 {
            return Err(contract("dt must be positive"));
        }
        if !(self.q > 0.0 && self.m > 0.0) {
            return Err(contract("q and m must be positive"));
        }
        Ok((steps_of(self.tau, self.dt, "tau")?, steps_of(self.sample_period, self.dt, "sample period")?))
    }

    fn rhs(&self, x: f64, delayed: f64) -> f64 {
        -self.q * x + self.m * delayed / (1.0 + delayed.powi(10))
    }
}

/// Integrates the Mackey-Glass equation with fixed-step RK4 and emits
/// `n_samples` values, one per sample period, after the warmup.
///
/// The delayed state is kept in a ring buffer at resolution `dt`; the RK4
/// half-step stages read the midpoint by linear interpolation.
pub fn mackey_glass(params: &MgParams, n_samples: usize, x0_override: Option<f64>) -> Result<Series> {
    let (tau_steps, period_steps) = params.validate()?;
    let history = x0_override.unwrap_or(params.history_value);
    if !history.is_finite() {
        return Err(contract("initial history must be finite"));
    }
    let dt = params.dt;
    // past[0] = x(t - tau), past[tau_steps] = x(t); slopes holds dx/dt at the same points
    let mut past: VecDeque<f64> = std::iter::repeat_n(history, tau_steps + 1).collect();
    let mut slopes: VecDeque<f64> = std::iter::repeat_n(0.0, tau_steps + 1).collect();
    *slopes.back_mut().expect("nonempty") = params.rhs(history, history);
    let mut x = history;
    let total = params.warmup + n_samples;
    let mut out = Vec::with_capacity(n_samples);
    let mut emitted = 0usize;
    let mut step = 0usize;
    while emitted < total {
        if step.is_multiple_of(period_steps) {
            if emitted >= params.warmup {
                out.push(x);
            }
            emitted += 1;
            if emitted == total {
                break;
            }
        }
        let d0 = past[0];
        let d1 = past[1];
        // Cubic Hermite midpoint. The slope jumps at t = 0 (constant history),
        // so the interval ending there uses the history side.
        let right_slope = if step + 1 == tau_steps { 0.0 } else { slopes[1] };
        let d_half = 0.5 * (d0 + d1) + dt / 8.0 * (slopes[0] - right_slope);
        let k1 = params.rhs(x, d0);
        let k2 = params.rhs(x + 0.5 * dt * k1, d_half);
        let k3 = params.rhs(x + 0.5 * dt * k2, d_half);
        let k4 = params.rhs(x + dt * k3, d1);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !x.is_finite() {
            return Err(Error::Numerical {
                message: format!("Mackey-Glass state became non-finite at step {step}"),
                last: x,
            });
        }
        past.pop_front();
        past.push_back(x);
        slopes.pop_front();
        slopes.push_back(params.rhs(x, past[0]));
        step += 1;
    }
    Series::new(out, SeriesOrigin::MackeyGlass)
}

/// Delay embedding: sample `t` has input `x[t-order..t]` and desired `x[t]`.
pub fn embed(series: &Series, order: usize) -> Result<Vec<Sample>> {
    if order == 0 {
        return Err(contract("embedding order must be at least 1"));
    }
    if series.len() <= order {
        return Err(contract(format!("series of length {} is too short for embedding order {order}", series.len())));
    }
    Ok(series.values.windows(order + 1).map(|w| Sample::new(w[..order].to_vec(), w[order])).collect())
}

/// First `n_train` samples for training, the next `n_test` for testing.
pub fn split(samples: &[Sample], n_train: usize, n_test: usize) -> Result<(&[Sample], &[Sample])> {
    if n_train + n_test > samples.len() {
        return Err(contract(format!(
            "need {} samples for a {n_train}/{n_test} split, have {}",
            n_train + n_test,
            samples.len()
        )));
    }
    let (train, rest) = samples.split_at(n_train);
    Ok((train, &rest[..n_test]))
}

/// Reads the annual sunspot record (`year,value` per line, optional header).
pub fn load_sunspot(path: impl AsRef<Path>) -> Result<Series> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_sunspot(&text)
}

/// The 1700-1997 record bundled with the crate.
pub fn builtin_sunspot() -> Series {
    parse_sunspot(BUILTIN_SUNSPOT).expect("bundled sunspot data is valid")
}

fn ingestion(line: usize, message: impl Into<String>) -> Error {
    Error::Ingestion { line: Some(line), message: message.into() }
}

pub fn parse_sunspot(text: &str) -> Result<Series> {
    let mut values = Vec::with_capacity(SUNSPOT_LEN);
    let mut last_year: Option<(i64, usize)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let (Some(year_txt), Some(value_txt), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(ingestion(line_no, format!("expected `year,value`, got {line:?}")));
        };
        let year = match year_txt.parse::<f64>() {
            Ok(y) if y.fract() == 0.0 && y.is_finite() => y as i64,
            _ if last_year.is_none() && values.is_empty() && value_txt.parse::<f64>().is_err() => {
                // header row
                continue;
            }
            _ => return Err(ingestion(line_no, format!("year {year_txt:?} is not an integer"))),
        };
        let value: f64 = value_txt
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| ingestion(line_no, format!("value {value_txt:?} is not a finite number")))?;
        if let Some((prev, prev_line)) = last_year {
            if year == prev {
                return Err(ingestion(line_no, format!("year {year} duplicates line {prev_line}")));
            }
            if year < prev {
                return Err(ingestion(line_no, format!("year {year} follows {prev}; years must increase")));
            }
            if year != prev + 1 {
                return Err(ingestion(line_no, format!("gap between {prev} and {year}")));
            }
        } else if year != SUNSPOT_FIRST_YEAR {
            return Err(ingestion(line_no, format!("record must start in {SUNSPOT_FIRST_YEAR}, starts in {year}")));
        }
        if year > SUNSPOT_LAST_YEAR {
            return Err(ingestion(line_no, format!("year {year} is past {SUNSPOT_LAST_YEAR}")));
        }
        last_year = Some((year, line_no));
        values.push(value);
    }
    match last_year {
        None => Err(Error::Ingestion { line: None, message: "no sunspot records found".into() }),
        Some((year, line)) if year != SUNSPOT_LAST_YEAR => {
            Err(ingestion(line, format!("record ends in {year}, expected {SUNSPOT_LAST_YEAR}")))
        }
        Some(_) => Series::new(values, SeriesOrigin::Sunspot),
    }
}
