//! Experiment configuration and its flat `key = value` text format.
//!
//! ```text
//! # comment
//! name = fig2a
//! signal.kind = mackey-glass
//! mg.tau = 30
//! noise.variant = wgn
//! noise.sigma = 0.1
//! algorithms = klms, klmat
//! klmat.mu = 0.5
//! ```
//!
//! Unknown or repeated keys are rejected. Missing keys take the defaults of
//! [`ExperimentConfig::default`] and of the per-algorithm defaults below.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::filters::{FilterSpec, LorentzianSchedule};
use crate::noise::NoiseModel;
use crate::signals::MgParams;

/// Where the time series comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSource {
    /// `samples` defaults to exactly what the split needs.
    MackeyGlass { params: MgParams, samples: Option<usize> },
    /// `None` selects the bundled 1700-1997 record.
    Sunspot { path: Option<PathBuf> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub signal: SignalSource,
    /// Rescale the series (and the noise) by the series' peak magnitude.
    pub normalize: bool,
    pub embedding_order: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub algorithms: Vec<FilterSpec>,
    pub noise: NoiseModel,
    pub n_replicas: usize,
    pub base_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            signal: SignalSource::MackeyGlass { params: MgParams::default(), samples: None },
            normalize: false,
            embedding_order: 10,
            n_train: 1000,
            n_test: 1000,
            algorithms: Vec::new(),
            noise: NoiseModel::None,
            n_replicas: 1,
            base_seed: 1,
        }
    }
}

pub const ALGORITHM_NAMES: [&str; 5] = ["lmat", "klms", "klmat", "vss-klmat", "nc-klmat"];

/// Parameters used for an algorithm listed without explicit settings.
pub fn default_filter(name: &str) -> Option<FilterSpec> {
    Some(match name {
        "lmat" => FilterSpec::Lmat { mu: 0.05 },
        "klms" => FilterSpec::Klms { mu: 0.5, h: 1.0 },
        "klmat" => FilterSpec::Klmat { mu: 0.5, h: 1.0 },
        "vss-klmat" => FilterSpec::VssKlmat {
            h: 1.0,
            schedule: LorentzianSchedule {
                beta: 1.0,
                l: 0.1,
                theta: LorentzianSchedule::DEFAULT_THETA,
                delta_e: 0.0,
                mu_min: LorentzianSchedule::DEFAULT_MU_MIN,
                mu_max: LorentzianSchedule::DEFAULT_MU_MAX,
            },
        },
        "nc-klmat" => FilterSpec::NcKlmat { mu: 0.5, h: 1.0, dist_threshold: 0.1, err_threshold: 0.01 },
        _ => return None,
    })
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

struct Entries {
    map: BTreeMap<String, (String, usize)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_err(format!("line {}: expected `key = value`", idx + 1)));
            };
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(config_err(format!("line {}: empty key", idx + 1)));
            }
            if let Some((_, first)) = map.insert(key.clone(), (value.trim().to_string(), idx + 1)) {
                return Err(config_err(format!("line {}: key `{key}` already set on line {first}", idx + 1)));
            }
        }
        Ok(Self { map })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.map.remove(key)
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => {
                v.parse().map(Some).map_err(|_| config_err(format!("line {line}: cannot parse `{key} = {v}`")))
            }
        }
    }

    fn or<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key) {
            None => Ok(default),
            Some((v, line)) => match v.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(config_err(format!("line {line}: `{key}` expects true or false, got `{v}`"))),
            },
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.into_iter().next() {
            None => Ok(()),
            Some((key, (_, line))) => Err(config_err(format!("line {line}: unknown key `{key}`"))),
        }
    }
}

fn parse_noise(e: &mut Entries) -> Result<NoiseModel> {
    let variant = e.take("noise.variant").map(|(v, _)| v).unwrap_or_else(|| "none".into());
    let noise = match variant.as_str() {
        "none" => NoiseModel::None,
        "wgn" => NoiseModel::Wgn { sigma: e.or("noise.sigma", 0.1)? },
        "bg" | "bernoulli-gaussian" => NoiseModel::BernoulliGaussianImpulsive {
            sigma_g: e.or("noise.sigma_g", 0.02)?,
            p_c: e.or("noise.p_c", 0.3)?,
            sigma_i: e.or("noise.sigma_i", 0.02)?,
            impulse_scale: e.or("noise.impulse_scale", 1.0)?,
        },
        "uniform" => NoiseModel::Uniform { variance: e.or("noise.variance", 5.0)? },
        "rayleigh" => NoiseModel::Rayleigh {
            sigma_sq: e.or("noise.sigma_sq", 0.05)?,
            remove_mean: e.bool_or("noise.remove_mean", false)?,
        },
        "rectangular" => NoiseModel::Rectangular {
            amplitude: e.or("noise.amplitude", 0.1)?,
            period_samples: e.or("noise.period", 2)?,
        },
        "exponential" => NoiseModel::Exponential {
            mean: e.or("noise.mean", 0.1)?,
            remove_mean: e.bool_or("noise.remove_mean", false)?,
        },
        other => return Err(config_err(format!("unknown noise variant `{other}`"))),
    };
    noise.validate().map_err(|err| config_err(err.to_string()))?;
    Ok(noise)
}

fn parse_filter(e: &mut Entries, name: &str) -> Result<FilterSpec> {
    let key = |k: &str| format!("{name}.{k}");
    let spec = match default_filter(name).ok_or_else(|| config_err(format!("unknown algorithm `{name}`")))? {
        FilterSpec::Lmat { mu } => FilterSpec::Lmat { mu: e.or(&key("mu"), mu)? },
        FilterSpec::Klms { mu, h } => FilterSpec::Klms { mu: e.or(&key("mu"), mu)?, h: e.or(&key("h"), h)? },
        FilterSpec::Klmat { mu, h } => FilterSpec::Klmat { mu: e.or(&key("mu"), mu)?, h: e.or(&key("h"), h)? },
        FilterSpec::VssKlmat { h, schedule: s } => FilterSpec::VssKlmat {
            h: e.or(&key("h"), h)?,
            schedule: LorentzianSchedule {
                beta: e.or(&key("beta"), s.beta)?,
                l: e.or(&key("l"), s.l)?,
                theta: e.or(&key("theta"), s.theta)?,
                delta_e: e.or(&key("delta_e"), s.delta_e)?,
                mu_min: e.or(&key("mu_min"), s.mu_min)?,
                mu_max: e.or(&key("mu_max"), s.mu_max)?,
            },
        },
        FilterSpec::NcKlmat { mu, h, dist_threshold, err_threshold } => FilterSpec::NcKlmat {
            mu: e.or(&key("mu"), mu)?,
            h: e.or(&key("h"), h)?,
            dist_threshold: e.or(&key("dist_threshold"), dist_threshold)?,
            err_threshold: e.or(&key("err_threshold"), err_threshold)?,
        },
    };
    // surface parameter errors at load time
    spec.build(1).map_err(|err| config_err(format!("{name}: {err}")))?;
    Ok(spec)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut e = Entries::parse(text)?;
        let d = ExperimentConfig::default();
        let name = e.take("name").map(|(v, _)| v).unwrap_or(d.name);
        let kind = e.take("signal.kind").map(|(v, _)| v).unwrap_or_else(|| "mackey-glass".into());
        let signal = match kind.as_str() {
            "mackey-glass" => {
                let p = MgParams::default();
                SignalSource::MackeyGlass {
                    params: MgParams {
                        q: e.or("mg.q", p.q)?,
                        m: e.or("mg.m", p.m)?,
                        tau: e.or("mg.tau", p.tau)?,
                        dt: e.or("mg.dt", p.dt)?,
                        sample_period: e.or("mg.sample_period", p.sample_period)?,
                        history_value: e.or("mg.history", p.history_value)?,
                        warmup: e.or("mg.warmup", p.warmup)?,
                    },
                    samples: e.parsed("mg.samples")?,
                }
            }
            "sunspot" => {
                let path = e.take("signal.path").map(|(v, _)| v);
                SignalSource::Sunspot { path: path.filter(|p| p != "builtin").map(PathBuf::from) }
            }
            other => return Err(config_err(format!("unknown signal kind `{other}`"))),
        };
        let normalize = e.bool_or("signal.normalize", d.normalize)?;
        let embedding_order = e.or("embedding.order", d.embedding_order)?;
        let n_train = e.or("split.train", d.n_train)?;
        let n_test = e.or("split.test", d.n_test)?;
        let noise = parse_noise(&mut e)?;
        let n_replicas = e.or("replicas", d.n_replicas)?;
        let base_seed = e.or("seed", d.base_seed)?;
        let names = e.take("algorithms").map(|(v, _)| v).unwrap_or_default();
        let mut algorithms = Vec::new();
        for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if algorithms.iter().any(|a: &FilterSpec| a.name() == name) {
                return Err(config_err(format!("algorithm `{name}` listed twice")));
            }
            algorithms.push(parse_filter(&mut e, name)?);
        }
        e.finish()?;
        let cfg = Self {
            name,
            signal,
            normalize,
            embedding_order,
            n_train,
            n_test,
            algorithms,
            noise,
            n_replicas,
            base_seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Checks the invariants that do not need the signal itself.
    pub fn validate(&self) -> Result<()> {
        if self.embedding_order == 0 {
            return Err(config_err("embedding.order must be at least 1"));
        }
        if self.n_train == 0 || self.n_test == 0 {
            return Err(config_err("split.train and split.test must be positive"));
        }
        if self.n_replicas == 0 {
            return Err(config_err("replicas must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(config_err("no algorithms configured"));
        }
        self.noise.validate().map_err(|e| config_err(e.to_string()))?;
        for a in &self.algorithms {
            a.build(self.embedding_order).map_err(|e| config_err(format!("{}: {e}", a.name())))?;
        }
        Ok(())
    }

    /// Multiplies the split sizes and the replica count by `factor`,
    /// rounding and keeping each at least 1.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(config_err(format!("scale must be positive, got {factor}")));
        }
        let scale = |n: usize| ((n as f64 * factor).round() as usize).max(1);
        Ok(Self {
            n_train: scale(self.n_train),
            n_test: scale(self.n_test),
            n_replicas: scale(self.n_replicas),
            ..self.clone()
        })
    }

    /// Canonical text form; [`ExperimentConfig::parse`] reads it back to an
    /// equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("name", &self.name);
        match &self.signal {
            SignalSource::MackeyGlass { params: p, samples } => {
                kv("signal.kind", &"mackey-glass");
                kv("mg.q", &p.q);
                kv("mg.m", &p.m);
                kv("mg.tau", &p.tau);
                kv("mg.dt", &p.dt);
                kv("mg.sample_period", &p.sample_period);
                kv("mg.history", &p.history_value);
                kv("mg.warmup", &p.warmup);
                if let Some(n) = samples {
                    kv("mg.samples", n);
                }
            }
            SignalSource::Sunspot { path } => {
                kv("signal.kind", &"sunspot");
                let p = path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "builtin".into());
                kv("signal.path", &p);
            }
        }
        kv("signal.normalize", &self.normalize);
        kv("embedding.order", &self.embedding_order);
        kv("split.train", &self.n_train);
        kv("split.test", &self.n_test);
        match self.noise {
            NoiseModel::None => kv("noise.variant", &"none"),
            NoiseModel::Wgn { sigma } => {
                kv("noise.variant", &"wgn");
                kv("noise.sigma", &sigma);
            }
            NoiseModel::BernoulliGaussianImpulsive { sigma_g, p_c, sigma_i, impulse_scale } => {
                kv("noise.variant", &"bg");
                kv("noise.sigma_g", &sigma_g);
                kv("noise.p_c", &p_c);
                kv("noise.sigma_i", &sigma_i);
                kv("noise.impulse_scale", &impulse_scale);
            }
            NoiseModel::Uniform { variance } => {
                kv("noise.variant", &"uniform");
                kv("noise.variance", &variance);
            }
            NoiseModel::Rayleigh { sigma_sq, remove_mean } => {
                kv("noise.variant", &"rayleigh");
                kv("noise.sigma_sq", &sigma_sq);
                kv("noise.remove_mean", &remove_mean);
            }
            NoiseModel::Rectangular { amplitude, period_samples } => {
                kv("noise.variant", &"rectangular");
                kv("noise.amplitude", &amplitude);
                kv("noise.period", &period_samples);
            }
            NoiseModel::Exponential { mean, remove_mean } => {
                kv("noise.variant", &"exponential");
                kv("noise.mean", &mean);
                kv("noise.remove_mean", &remove_mean);
            }
        }
        kv("replicas", &self.n_replicas);
        kv("seed", &self.base_seed);
        let names: Vec<&str> = self.algorithms.iter().map(FilterSpec::name).collect();
        kv("algorithms", &names.join(", "));
        for a in &self.algorithms {
            let n = a.name();
            match a {
                FilterSpec::Lmat { mu } => kv(&format!("{n}.mu"), mu),
                FilterSpec::Klms { mu, h } | FilterSpec::Klmat { mu, h } => {
                    kv(&format!("{n}.mu"), mu);
                    kv(&format!("{n}.h"), h);
                }
                FilterSpec::VssKlmat { h, schedule: sc } => {
                    kv(&format!("{n}.h"), h);
                    kv(&format!("{n}.beta"), &sc.beta);
                    kv(&format!("{n}.l"), &sc.l);
                    kv(&format!("{n}.theta"), &sc.theta);
                    kv(&format!("{n}.delta_e"), &sc.delta_e);
                    kv(&format!("{n}.mu_min"), &sc.mu_min);
                    kv(&format!("{n}.mu_max"), &sc.mu_max);
                }
                FilterSpec::NcKlmat { mu, h, dist_threshold, err_threshold } => {
                    kv(&format!("{n}.mu"), mu);
                    kv(&format!("{n}.h"), h);
                    kv(&format!("{n}.dist_threshold"), dist_threshold);
                    kv(&format!("{n}.err_threshold"), err_threshold);
                }
            }
        }
        s
    }

    /// Short hex digest of the canonical text.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_text().as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
        # desk-scale run
        name = demo
        signal.kind = mackey-glass
        mg.tau = 17
        embedding.order = 7
        split.train = 300
        split.test = 100
        noise.variant = bg
        noise.p_c = 0.1
        replicas = 4
        seed = 9
        algorithms = klms, vss-klmat
        klms.mu = 0.25
        vss-klmat.beta = 3   # trailing comment
    ";

    #[test]
    fn parses_with_defaults() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.name, "demo");
        assert_eq!(cfg.embedding_order, 7);
        match cfg.signal {
            SignalSource::MackeyGlass { params, samples } => {
                assert_eq!(params.tau, 17.0);
                assert_eq!(params.q, 0.1);
                assert_eq!(samples, None);
            }
            _ => panic!(),
        }
        assert_eq!(
            cfg.noise,
            NoiseModel::BernoulliGaussianImpulsive { sigma_g: 0.02, p_c: 0.1, sigma_i: 0.02, impulse_scale: 1.0 }
        );
        assert_eq!(cfg.algorithms[0], FilterSpec::Klms { mu: 0.25, h: 1.0 });
        match cfg.algorithms[1] {
            FilterSpec::VssKlmat { schedule, .. } => {
                assert_eq!(schedule.beta, 3.0);
                assert_eq!(schedule.mu_min, 0.01);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn canonical_text_round_trips() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        let again = ExperimentConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.digest(), again.digest());
        assert_eq!(cfg.digest().len(), 16);
    }

    #[test]
    fn rejects_bad_input() {
        let with = |extra: &str| ExperimentConfig::parse(&format!("{SAMPLE}\n{extra}"));
        assert!(matches!(with("bogus.key = 1"), Err(Error::Config(m)) if m.contains("unknown key")));
        assert!(matches!(with("seed = 3"), Err(Error::Config(m)) if m.contains("already set")));
        assert!(with("klms.h = wide").is_err());
        assert!(with("klms.h = -1").is_err());
        assert!(with("just words").is_err());
        assert!(ExperimentConfig::parse("algorithms = svm").is_err());
        assert!(ExperimentConfig::parse("algorithms = klms, klms").is_err());
        assert!(ExperimentConfig::parse("").is_err());
        assert!(ExperimentConfig::parse("algorithms = klms\nreplicas = 0").is_err());
        assert!(ExperimentConfig::parse("algorithms = klms\nnoise.variant = uniform\nnoise.variance = -1").is_err());
    }

    #[test]
    fn scaling() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap().scaled(0.1).unwrap();
        assert_eq!((cfg.n_train, cfg.n_test, cfg.n_replicas), (30, 10, 1));
        assert!(cfg.scaled(0.0).is_err());
    }

    #[test]
    fn sunspot_source() {
        let cfg = ExperimentConfig::parse("signal.kind = sunspot\nalgorithms = klmat").unwrap();
        assert_eq!(cfg.signal, SignalSource::Sunspot { path: None });
        let cfg = ExperimentConfig::parse("signal.kind = sunspot\nsignal.path = /x.csv\nalgorithms = klmat").unwrap();
        assert_eq!(cfg.signal, SignalSource::Sunspot { path: Some(PathBuf::from("/x.csv")) });
    }
}
