//! Built-in experiment configurations.

use crate::bench::config::{ExperimentConfig, SignalSource};
use crate::filters::{FilterSpec, LorentzianSchedule};
use crate::noise::NoiseModel;
use crate::signals::MgParams;

pub const PRESET_NAMES: [&str; 8] = ["fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d", "fig5a", "fig5b"];

fn vss(h: f64, beta: f64, l: f64) -> FilterSpec {
    FilterSpec::VssKlmat { h, schedule: LorentzianSchedule::new(beta, l).expect("valid preset") }
}

/// Step sizes shared by the Mackey-Glass presets.
struct MgSteps {
    lmat: f64,
    klms: f64,
    klmat: f64,
    vss_beta: f64,
    vss_l: f64,
}

const MG_STEPS: MgSteps = MgSteps { lmat: 0.04, klms: 0.5, klmat: 0.5, vss_beta: 2.0, vss_l: 0.1 };

// Uniform noise of variance 5 swamps the unit-scale series; the cubic error
// gain then needs a much smaller step to stay stable.
const MG_STEPS_HEAVY_NOISE: MgSteps = MgSteps { lmat: 0.0005, klms: 0.02, klmat: 0.005, vss_beta: 0.05, vss_l: 2.0 };

fn mackey_glass(name: &str, noise: NoiseModel, steps: &MgSteps, with_nc: bool) -> ExperimentConfig {
    let mut algorithms = vec![
        FilterSpec::Lmat { mu: steps.lmat },
        FilterSpec::Klms { mu: steps.klms, h: 1.0 },
        FilterSpec::Klmat { mu: steps.klmat, h: 1.0 },
        vss(1.0, steps.vss_beta, steps.vss_l),
    ];
    if with_nc {
        algorithms.push(FilterSpec::NcKlmat { mu: steps.klmat, h: 1.0, dist_threshold: 0.3, err_threshold: 0.02 });
    }
    ExperimentConfig {
        name: name.into(),
        signal: SignalSource::MackeyGlass { params: MgParams::default(), samples: None },
        normalize: false,
        embedding_order: 10,
        n_train: 1000,
        n_test: 1000,
        algorithms,
        noise,
        n_replicas: 100,
        base_seed: 1,
    }
}

/// Sunspot counts are rescaled to unit peak; noise parameters stay in the
/// original count units and are rescaled with the series.
fn sunspot(name: &str, noise: NoiseModel) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        signal: SignalSource::Sunspot { path: None },
        normalize: true,
        embedding_order: 2,
        n_train: 196,
        n_test: 100,
        algorithms: vec![
            FilterSpec::Lmat { mu: 0.5 },
            FilterSpec::Klms { mu: 0.5, h: 1.5 },
            FilterSpec::Klmat { mu: 0.5, h: 1.5 },
            vss(1.5, 1.0, 0.1),
        ],
        noise,
        n_replicas: 100,
        base_seed: 1,
    }
}

/// All presets, in [`PRESET_NAMES`] order.
pub fn presets() -> Vec<ExperimentConfig> {
    vec![
        mackey_glass("fig2a", NoiseModel::Wgn { sigma: 0.1 }, &MG_STEPS, true),
        mackey_glass(
            "fig2b",
            NoiseModel::BernoulliGaussianImpulsive { sigma_g: 0.02, p_c: 0.3, sigma_i: 0.02, impulse_scale: 1.0 },
            &MG_STEPS,
            true,
        ),
        mackey_glass("fig3a", NoiseModel::Uniform { variance: 5.0 }, &MG_STEPS_HEAVY_NOISE, false),
        mackey_glass("fig3b", NoiseModel::Rayleigh { sigma_sq: 0.05, remove_mean: false }, &MG_STEPS, false),
        mackey_glass("fig3c", NoiseModel::Rectangular { amplitude: 0.1, period_samples: 2 }, &MG_STEPS, false),
        mackey_glass("fig3d", NoiseModel::Exponential { mean: 0.1, remove_mean: false }, &MG_STEPS, false),
        sunspot("fig5a", NoiseModel::Wgn { sigma: 0.1 }),
        sunspot("fig5b", NoiseModel::Uniform { variance: 100.0 }),
    ]
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    presets().into_iter().find(|p| p.name == name)
}
