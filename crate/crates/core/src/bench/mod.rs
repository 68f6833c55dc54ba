//! Experiment harness: configuration, presets, Monte Carlo runner and output.

pub mod config;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::{ExperimentConfig, SignalSource};
pub use output::{emit_csv, format_real};
pub use presets::{preset, presets, PRESET_NAMES};
pub use runner::{run_experiment, AlgorithmResult, BoundDiagnostics, RunResult};
