//! Experiment configuration: a TOML file plus command-line overrides.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use tenrec_core::{
    FixedAccuracyConfig, FixedRankConfig, GntctvSpec, NoiseStructure, Penalty, SketchFamily,
    SketchSpec, SolverConfig, SvdBackend,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("cannot parse penalty {0:?}; expected e.g. l1, lq:0.5, mcp:3.0, scad:3.7, log:0.5, firm:1.5, capped-lq:0.5:2.0")]
    BadPenalty(String),
    #[error("unknown sketch family {0:?}")]
    BadSketchFamily(String),
    #[error("unknown backend {0:?} (exact | randomized)")]
    BadBackend(String),
    #[error("unknown noise structure {0:?} (entrywise | tube)")]
    BadStructure(String),
    #[error("unknown compression mode {0:?} (fixed-rank | fixed-accuracy)")]
    BadCompressionMode(String),
    #[error("task {0} requires {1}")]
    MissingParameter(&'static str, &'static str),
    #[error("invalid regularizer: {0}")]
    BadRegularizer(String),
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Compress,
    Complete,
    Robust,
    QComplete,
    QRobust,
    Bench,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Compress => "compress",
            Task::Complete => "complete",
            Task::Robust => "robust",
            Task::QComplete => "qcomplete",
            Task::QRobust => "qrobust",
            Task::Bench => "bench",
        }
    }
}

fn default_one() -> f64 {
    1.0
}
fn default_seed() -> u64 {
    0
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DegradeParams {
    pub sr: f64,
    pub nr: f64,
    pub sigma: f64,
    pub delta: Option<f64>,
    pub one_bit: bool,
}

impl Default for DegradeParams {
    fn default() -> Self {
        Self {
            sr: default_one(),
            nr: 0.0,
            sigma: 0.0,
            delta: None,
            one_bit: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Spectral penalty on the gradient unfoldings.
    pub penalty: String,
    /// Penalty on the noise term.
    pub noise_penalty: String,
    /// entrywise | tube
    pub noise_structure: String,
    /// Gradient directions (default: all modes).
    pub directions: Option<Vec<usize>>,
    pub lambda: Option<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub alpha_box: f64,
    pub rho0: f64,
    pub rho_growth: f64,
    pub rho_max: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// exact | randomized
    pub backend: String,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            penalty: "l1".into(),
            noise_penalty: "l1".into(),
            noise_structure: "entrywise".into(),
            directions: None,
            lambda: None,
            lambda1: 0.1,
            lambda2: 0.1,
            alpha_box: 1.0,
            rho0: 1e-2,
            rho_growth: 1.1,
            rho_max: 1e6,
            tol: 1e-5,
            max_iters: 200,
            backend: "exact".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CompressParams {
    /// fixed-rank | fixed-accuracy
    pub mode: String,
    pub rank: Option<Vec<usize>>,
    pub sketch_size: Option<Vec<usize>>,
    pub epsilon: Option<f64>,
    pub block: usize,
    pub oversample: usize,
    pub power_iters: usize,
    pub order: Option<Vec<usize>>,
    pub max_rank: Option<Vec<usize>>,
    pub sketch_family: String,
    pub exact_core: bool,
}

impl Default for CompressParams {
    fn default() -> Self {
        Self {
            mode: "fixed-rank".into(),
            rank: None,
            sketch_size: None,
            epsilon: None,
            block: 10,
            oversample: 5,
            power_iters: 1,
            order: None,
            max_rank: None,
            sketch_family: "gaussian".into(),
            exact_core: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: Task,
    pub input: PathBuf,
    /// Label written to the results table; defaults to the input file stem.
    pub dataset: Option<String>,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub degrade: DegradeParams,
    #[serde(default)]
    pub solver: SolverParams,
    #[serde(default)]
    pub compress: CompressParams,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn dataset_label(&self) -> String {
        self.dataset.clone().unwrap_or_else(|| {
            self.input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "unknown".into())
        })
    }
}

pub fn parse_penalty(text: &str) -> Result<Penalty, ConfigError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || ConfigError::BadPenalty(text.to_string());
    let one = |idx: usize| -> Result<f64, ConfigError> {
        parts.get(idx).and_then(|s| s.parse().ok()).ok_or_else(bad)
    };
    let p = match parts[0] {
        "l1" => Penalty::L1,
        "firm" => Penalty::Firm { threshold: one(1)? },
        "lq" => Penalty::Lq { q: one(1)? },
        "mcp" => Penalty::Mcp { gamma: one(1)? },
        "scad" => Penalty::Scad { a: one(1)? },
        "log" => Penalty::Log { eps: one(1)? },
        "capped-lq" => Penalty::CappedLq {
            q: one(1)?,
            threshold: one(2)?,
        },
        _ => return Err(bad()),
    };
    p.validate().map_err(|_| bad())?;
    Ok(p)
}

pub fn parse_sketch_family(text: &str) -> Result<SketchFamily, ConfigError> {
    Ok(match text {
        "gaussian" => SketchFamily::Gaussian,
        "uniform" => SketchFamily::Uniform,
        "kr-gaussian" => SketchFamily::KrGaussian,
        "kr-uniform" => SketchFamily::KrUniform,
        "kronecker-srft" => SketchFamily::KroneckerSrft,
        other => return Err(ConfigError::BadSketchFamily(other.to_string())),
    })
}

impl SolverParams {
    /// Materializes a solver configuration for a tensor of the given order.
    /// Sub-seeds are derived from the experiment seed.
    pub fn build(&self, order: usize, seed: u64) -> Result<SolverConfig, ConfigError> {
        let penalty = parse_penalty(&self.penalty)?;
        let mut reg = GntctvSpec::uniform(order, penalty)
            .map_err(|e| ConfigError::BadRegularizer(e.to_string()))?;
        if let Some(dirs) = &self.directions {
            reg.directions = dirs.clone();
        }
        let mut cfg = SolverConfig::new(reg);
        cfg.noise_penalty = parse_penalty(&self.noise_penalty)?;
        cfg.noise_structure = match self.noise_structure.as_str() {
            "entrywise" => NoiseStructure::Entrywise,
            "tube" => NoiseStructure::Tube,
            other => return Err(ConfigError::BadStructure(other.to_string())),
        };
        cfg.lambda = self.lambda;
        cfg.lambda1 = self.lambda1;
        cfg.lambda2 = self.lambda2;
        cfg.alpha_box = self.alpha_box;
        cfg.rho0 = self.rho0;
        cfg.rho_growth = self.rho_growth;
        cfg.rho_max = self.rho_max;
        cfg.tol = self.tol;
        cfg.max_iters = self.max_iters;
        cfg.backend = match self.backend.as_str() {
            "exact" => SvdBackend::Exact,
            "randomized" => SvdBackend::Randomized {
                oversample: 5,
                power_iters: 1,
                seed: tenrec_core::rng::derive_seed(seed, "solver-backend", 0),
            },
            other => return Err(ConfigError::BadBackend(other.to_string())),
        };
        Ok(cfg)
    }
}

impl CompressParams {
    pub fn sketch_spec(&self, seed: u64) -> Result<SketchSpec, ConfigError> {
        Ok(SketchSpec::new(
            parse_sketch_family(&self.sketch_family)?,
            tenrec_core::rng::derive_seed(seed, "compressor-sketch", 0),
        ))
    }

    pub fn build_fixed_rank(&self, seed: u64) -> Result<FixedRankConfig, ConfigError> {
        let rank = self
            .rank
            .clone()
            .ok_or(ConfigError::MissingParameter("compress", "rank"))?;
        let mut cfg = FixedRankConfig::new(rank, 0);
        cfg.sketch = self.sketch_spec(seed)?;
        cfg.sketch_size = self.sketch_size.clone();
        cfg.order = self.order.clone();
        cfg.oversample = self.oversample;
        cfg.power_iters = self.power_iters;
        cfg.exact_core = self.exact_core;
        Ok(cfg)
    }

    pub fn build_fixed_accuracy(&self, seed: u64) -> Result<FixedAccuracyConfig, ConfigError> {
        let eps = self
            .epsilon
            .ok_or(ConfigError::MissingParameter("compress", "epsilon"))?;
        let mut cfg = FixedAccuracyConfig::new(eps, 0);
        cfg.sketch = self.sketch_spec(seed)?;
        cfg.block = self.block;
        cfg.power_iters = self.power_iters;
        cfg.order = self.order.clone();
        cfg.max_rank = self.max_rank.clone();
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip_with_defaults() {
        let text = r#"
            task = "complete"
            input = "data.tnsr"
            seed = 7

            [degrade]
            sr = 0.3

            [solver]
            penalty = "scad:3.7"
            max_iters = 50
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.task, Task::Complete);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.degrade.sr, 0.3);
        assert_eq!(cfg.degrade.nr, 0.0);
        assert_eq!(cfg.solver.max_iters, 50);
        assert_eq!(cfg.solver.rho0, 1e-2);
        let solver = cfg.solver.build(3, cfg.seed).unwrap();
        assert!(matches!(solver.reg.penalty, Penalty::Scad { .. }));
    }

    #[test]
    fn penalty_strings() {
        assert_eq!(parse_penalty("l1").unwrap(), Penalty::L1);
        assert_eq!(
            parse_penalty("capped-lq:0.5:2.0").unwrap(),
            Penalty::CappedLq {
                q: 0.5,
                threshold: 2.0
            }
        );
        assert!(parse_penalty("lq:1.5").is_err());
        assert!(parse_penalty("nope").is_err());
    }

    #[test]
    fn compress_config_requires_mode_parameters() {
        let params = CompressParams::default();
        assert!(params.build_fixed_rank(1).is_err());
        assert!(params.build_fixed_accuracy(1).is_err());
        let mut with_rank = CompressParams::default();
        with_rank.rank = Some(vec![2, 2, 2]);
        assert!(with_rank.build_fixed_rank(1).is_ok());
    }
}
