//! `klmat` command-line interface.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use klmat::bench::{
    emit_csv, format_real, preset, presets, run_experiment, ExperimentConfig, RunResult, SignalSource, PRESET_NAMES,
};
use klmat::noise::NoiseModel;
use klmat::signals::{mackey_glass, MgParams};
use klmat::Error;

#[derive(Parser)]
#[command(name = "klmat", version, about = "Kernel least mean absolute third filters: benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a Mackey-Glass series as CSV.
    GenerateMg(GenerateMg),
    /// Run an experiment and write one CSV per algorithm plus a manifest.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (default: results/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment and print the stability-bound diagnostics.
    Bounds {
        #[command(flatten)]
        source: Source,
    },
    /// List the built-in configurations.
    Presets {
        /// Print one preset in config file format.
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
}

#[derive(Args)]
struct Source {
    /// Config file.
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration instead of a file.
    #[arg(long)]
    preset: Option<String>,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Multiply the train/test sizes and replica count.
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Args)]
struct GenerateMg {
    /// Number of samples to emit.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = MgParams::default().q)]
    q: f64,
    #[arg(long, default_value_t = MgParams::default().m)]
    m: f64,
    #[arg(long, default_value_t = MgParams::default().tau)]
    tau: f64,
    #[arg(long, default_value_t = MgParams::default().dt)]
    dt: f64,
    #[arg(long, default_value_t = MgParams::default().sample_period)]
    sample_period: f64,
    /// Constant history before t = 0.
    #[arg(long, default_value_t = MgParams::default().history_value)]
    history: f64,
    /// Samples discarded before output.
    #[arg(long, default_value_t = MgParams::default().warmup)]
    warmup: usize,
    /// Initial state at t = 0, if different from the history.
    #[arg(long)]
    x0: Option<f64>,
}

impl Source {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(name)) => preset(name).ok_or_else(|| {
                Error::Config(format!("unknown preset `{name}`; available: {}", PRESET_NAMES.join(", ")))
            })?,
            (None, None) => unreachable!("clap requires one source"),
        };
        if let Some(seed) = self.seed {
            cfg.base_seed = seed;
        }
        if let Some(scale) = self.scale {
            cfg = cfg.scaled(scale)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn generate_mg(args: &GenerateMg) -> Result<(), Error> {
    let params = MgParams {
        q: args.q,
        m: args.m,
        tau: args.tau,
        dt: args.dt,
        sample_period: args.sample_period,
        history_value: args.history,
        warmup: args.warmup,
    };
    let series = mackey_glass(&params, args.samples, args.x0)?;
    let mut text = String::from("sample,value\n");
    for (i, x) in series.values.iter().enumerate() {
        let _ = writeln!(text, "{i},{}", format_real(*x));
    }
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io { path: path.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summary(result: &RunResult) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}: {} replicas, {} train / {} test, untrained MSE {:.2} dB",
        result.config.name,
        result.config.n_replicas,
        result.config.n_train,
        result.config.n_test,
        result.untrained_mse_db
    );
    let _ = writeln!(
        s,
        "{:<10} {:>12} {:>12} {:>10} {:>11}",
        "algorithm", "first (dB)", "final (dB)", "size", "divergences"
    );
    for alg in &result.algorithms {
        let v = &alg.curve.values_db;
        let _ = writeln!(
            s,
            "{:<10} {:>12.2} {:>12.2} {:>10.1} {:>11}",
            alg.name(),
            v.first().copied().unwrap_or(f64::NAN),
            v.last().copied().unwrap_or(f64::NAN),
            alg.final_model_size(),
            alg.divergences.len()
        );
    }
    s
}

fn bounds_report(result: &RunResult) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<10} {:>12} {:>12} {:>12} {:>10} {:>11} {:>12}",
        "algorithm", "lambda_max", "sigma_e", "mu bound", "mu hits", "l bound", "l hits"
    );
    for alg in &result.algorithms {
        let d = &alg.diagnostics;
        let (l_bound, l_hits) = match &d.l_check {
            Some(l) => (format!("{:.6}", l.final_l_bound), l.violations.to_string()),
            None => ("-".into(), "-".into()),
        };
        let _ = writeln!(
            s,
            "{:<10} {:>12.6} {:>12.6} {:>12.6} {:>10} {:>11} {:>12}",
            alg.name(),
            d.lambda_max,
            d.final_sigma_e,
            d.final_step_bound,
            d.step_bound_violations,
            l_bound,
            l_hits
        );
    }
    s
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::GenerateMg(args) => generate_mg(&args),
        Command::Run { source, out } => {
            let cfg = source.load()?;
            let result = run_experiment(&cfg)?;
            let dir = out.unwrap_or_else(|| PathBuf::from("results").join(&cfg.name));
            emit_csv(&result, &dir)?;
            print!("{}", summary(&result));
            println!("wrote {} in {:.2} s", dir.display(), result.wall_clock.as_secs_f64());
            Ok(())
        }
        Command::Bounds { source } => {
            let cfg = source.load()?;
            let result = run_experiment(&cfg)?;
            print!("{}", bounds_report(&result));
            Ok(())
        }
        Command::Presets { show: Some(name) } => {
            let cfg = preset(&name).ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?;
            print!("{}", cfg.to_text());
            Ok(())
        }
        Command::Presets { show: None } => {
            for cfg in presets() {
                let algs: Vec<&str> = cfg.algorithms.iter().map(|a| a.name()).collect();
                println!("{:<6} {:<28} {}", cfg.name, noise_label(&cfg), algs.join(", "));
            }
            Ok(())
        }
    }
}

fn noise_label(cfg: &ExperimentConfig) -> String {
    let signal = match cfg.signal {
        SignalSource::MackeyGlass { .. } => "mackey-glass",
        SignalSource::Sunspot { .. } => "sunspot",
    };
    let noise = match cfg.noise {
        NoiseModel::None => "none",
        NoiseModel::Wgn { .. } => "wgn",
        NoiseModel::BernoulliGaussianImpulsive { .. } => "bg",
        NoiseModel::Uniform { .. } => "uniform",
        NoiseModel::Rayleigh { .. } => "rayleigh",
        NoiseModel::Rectangular { .. } => "rectangular",
        NoiseModel::Exponential { .. } => "exponential",
    };
    format!("{signal}/{noise}")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
