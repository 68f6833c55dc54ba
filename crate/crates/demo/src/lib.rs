//! WebAssembly bindings behind `www/index.html`.
//!
//! Each exported function has a plain Rust counterpart so the logic can be
//! tested natively.

use klmat::analysis::{average_test_mse, corrupt, to_db, train_and_evaluate};
use klmat::filters::{lorentzian_step_size, FilterSpec, LorentzianSchedule};
use klmat::noise::{NoiseModel, SeededRng};
use klmat::signals::{embed, mackey_glass, split, MgParams};
use klmat::Result;
use wasm_bindgen::prelude::*;

/// Algorithms plotted by [`learning_curves`], in output order.
pub const CURVE_ALGORITHMS: [&str; 3] = ["klms", "klmat", "vss-klmat"];

const ORDER: usize = 10;
const N_TEST: usize = 200;

pub fn mg_series_native(n: usize, tau: f64) -> Result<Vec<f64>> {
    Ok(mackey_glass(&MgParams { tau, ..Default::default() }, n, None)?.values)
}

fn noise_model(kind: &str, level: f64) -> Result<NoiseModel> {
    let model = match kind {
        "none" => NoiseModel::None,
        "wgn" => NoiseModel::Wgn { sigma: level },
        "impulsive" => {
            NoiseModel::BernoulliGaussianImpulsive { sigma_g: level, p_c: 0.05, sigma_i: level, impulse_scale: 10.0 }
        }
        "uniform" => NoiseModel::Uniform { variance: level * level },
        other => return Err(klmat::Error::Config(format!("unknown noise `{other}`"))),
    };
    model.validate()?;
    Ok(model)
}

/// Replica-averaged testing MSE (dB) for KLMS, KLMAT and VSS-KLMAT on the
/// Mackey-Glass series, concatenated in [`CURVE_ALGORITHMS`] order. Iterations
/// after a divergence are NaN.
pub fn learning_curves_native(
    noise: &str,
    level: f64,
    mu: f64,
    h: f64,
    n_train: usize,
    replicas: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let model = noise_model(noise, level)?;
    let series = mackey_glass(&MgParams::default(), n_train + N_TEST + ORDER, None)?;
    let samples = embed(&series, ORDER)?;
    let (train, test) = split(&samples, n_train, N_TEST)?;
    let specs = [
        FilterSpec::Klms { mu, h },
        FilterSpec::Klmat { mu, h },
        FilterSpec::VssKlmat { h, schedule: LorentzianSchedule::new(2.0, 0.1)? },
    ];
    let mut traces: Vec<Vec<_>> = vec![Vec::with_capacity(replicas); specs.len()];
    for r in 0..replicas {
        let noisy = corrupt(train, &model, &SeededRng::new(seed.wrapping_add(r as u64)), 1.0)?;
        for (spec, out) in specs.iter().zip(traces.iter_mut()) {
            let mut f = spec.build(ORDER)?;
            out.push(train_and_evaluate(f.as_mut(), &noisy, test)?);
        }
    }
    let mut curves = Vec::with_capacity(specs.len() * n_train);
    for t in &traces {
        let mean = average_test_mse(t);
        curves.extend(mean.iter().map(|&m| to_db(m)));
        curves.extend(std::iter::repeat_n(f64::NAN, n_train - mean.len()));
    }
    Ok(curves)
}

/// Clamped Lorentzian step size against the error magnitude, with the error
/// estimate equal to the instantaneous squared error.
pub fn lorentzian_curve_native(beta: f64, l: f64, max_error: f64, points: usize) -> Result<Vec<f64>> {
    let schedule = LorentzianSchedule::new(beta, l)?;
    let step = max_error / (points.max(2) - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let e = i as f64 * step;
            lorentzian_step_size(beta, l, e * e).clamp(schedule.mu_min, schedule.mu_max)
        })
        .collect())
}

fn js(r: Result<Vec<f64>>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn mg_series(n: usize, tau: f64) -> Result<Vec<f64>, JsError> {
    js(mg_series_native(n, tau))
}

#[wasm_bindgen]
pub fn learning_curves(
    noise: &str,
    level: f64,
    mu: f64,
    h: f64,
    n_train: usize,
    replicas: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    js(learning_curves_native(noise, level, mu, h, n_train, replicas, seed.into()))
}

#[wasm_bindgen]
pub fn lorentzian_curve(beta: f64, l: f64, max_error: f64, points: usize) -> Result<Vec<f64>, JsError> {
    js(lorentzian_curve_native(beta, l, max_error, points))
}
