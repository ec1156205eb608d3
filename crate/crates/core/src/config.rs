//! Run configuration: TOML sections over per-problem defaults.
//!
//! ```toml
//! [problem]
//! name = "nws"          # or "allen-cahn"
//! lambda = 0.1
//!
//! [network]
//! hidden_layers = 8
//! width = 20
//! activation = "gelu"
//!
//! [sampling]
//! n0 = 250
//! nb = 250
//! nc = 10000
//! seed = 1
//!
//! [training]
//! iterations = 20000
//! schedule = [[0, 1e-2], [1000, 1e-3], [3000, 5e-4]]
//!
//! [evaluation]
//! h = 0.004
//! dt = 0.004
//! ```
//!
//! Omitted keys keep the defaults of the selected problem and profile.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{PinnError, Result};
use crate::nn::{layer_sizes, Activation};
use crate::pde::{allen_cahn_problem, nws_problem, NwsParams, ParabolicPde};
use crate::training::{AdamParams, LossWeights, Optimizer, Schedule, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemName {
    #[serde(rename = "nws")]
    Nws,
    #[serde(rename = "allen-cahn")]
    AllenCahn,
}

impl ProblemName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemName::Nws => "nws",
            ProblemName::AllenCahn => "allen-cahn",
        }
    }
}

impl fmt::Display for ProblemName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemName {
    type Err = PinnError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nws" => Ok(ProblemName::Nws),
            "allen-cahn" => Ok(ProblemName::AllenCahn),
            other => Err(PinnError::config(
                "problem.name",
                format!("expected `nws` or `allen-cahn`, got `{other}`"),
            )),
        }
    }
}

/// `paper` reproduces the published setup; `ci` is a short run for automated checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Paper,
    Ci,
}

impl FromStr for Profile {
    type Err = PinnError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Profile::Paper),
            "ci" => Ok(Profile::Ci),
            other => Err(PinnError::config("profile", format!("expected `paper` or `ci`, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub name: ProblemName,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub hidden_layers: usize,
    pub width: usize,
    pub activation: Activation,
}

impl NetworkSection {
    pub fn sizes(&self) -> Vec<usize> {
        layer_sizes(self.hidden_layers, self.width)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    pub n0: usize,
    pub nb: usize,
    pub nc: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingSection {
    pub iterations: u64,
    pub schedule: Schedule,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub optimizer: Optimizer,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub log_every: u64,
    pub parallel: bool,
    /// Keep the lowest-loss iterate rather than the last.
    pub keep_best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationSection {
    /// Spatial step of the error grid.
    pub h: f64,
    /// Time step of the error grid.
    pub dt: f64,
    pub timing_counts: Vec<usize>,
    pub timing_repeats: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

/// Fully resolved, validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSection,
    pub network: NetworkSection,
    pub sampling: SamplingSection,
    pub training: TrainingSection,
    pub evaluation: EvaluationSection,
    pub output: OutputSection,
}

impl RunConfig {
    /// Defaults for `problem` under `profile`.
    pub fn defaults(problem: ProblemName, profile: Profile) -> Self {
        let (width, n0, h) = match problem {
            ProblemName::Nws => (20, 250, 0.004),
            ProblemName::AllenCahn => (40, 500, 0.001),
        };
        let mut cfg = RunConfig {
            problem: ProblemSection {
                name: problem,
                lambda: NwsParams::default().lambda,
            },
            network: NetworkSection {
                hidden_layers: 8,
                width,
                activation: Activation::Gelu,
            },
            sampling: SamplingSection {
                n0,
                nb: n0,
                nc: 10_000,
                seed: 1,
            },
            training: TrainingSection {
                iterations: 20_000,
                schedule: Schedule::paper(),
                alpha: 1.0,
                beta: 1.0,
                gamma: 1.0,
                optimizer: Optimizer::Adam,
                beta1: AdamParams::default().beta1,
                beta2: AdamParams::default().beta2,
                epsilon: AdamParams::default().epsilon,
                log_every: 1000,
                parallel: false,
                keep_best: true,
            },
            evaluation: EvaluationSection {
                h,
                dt: 0.004,
                timing_counts: crate::eval::default_counts(),
                timing_repeats: 3,
            },
            output: OutputSection {
                dir: PathBuf::from(format!("runs/{problem}")),
            },
        };
        if profile == Profile::Ci {
            cfg.network.width = 20;
            cfg.sampling.nc = 2000;
            cfg.training.iterations = 4000;
            cfg.training.schedule = Schedule::ci();
        }
        cfg
    }

    /// Parses `text` over the defaults. `problem` overrides `[problem] name`.
    pub fn from_toml_str(text: &str, problem: Option<ProblemName>, profile: Profile) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| PinnError::config("config", e.to_string()))?;
        for key in table.keys() {
            if !SECTIONS.contains(&key.as_str()) {
                return Err(PinnError::config(
                    key.clone(),
                    format!("unknown section; expected one of {}", SECTIONS.join(", ")),
                ));
            }
        }
        let file_problem = match table.get("problem").and_then(|p| p.get("name")) {
            None => None,
            Some(toml::Value::String(s)) => Some(s.parse::<ProblemName>()?),
            Some(other) => {
                return Err(PinnError::config(
                    "problem.name",
                    format!("expected a string, got {}", other.type_str()),
                ))
            }
        };
        let name = problem.or(file_problem).unwrap_or(ProblemName::Nws);
        let defaults = RunConfig::defaults(name, profile);
        let cfg = RunConfig {
            problem: overlay("problem", &defaults.problem, table.get("problem"))?,
            network: overlay("network", &defaults.network, table.get("network"))?,
            sampling: overlay("sampling", &defaults.sampling, table.get("sampling"))?,
            training: overlay("training", &defaults.training, table.get("training"))?,
            evaluation: overlay("evaluation", &defaults.evaluation, table.get("evaluation"))?,
            output: overlay("output", &defaults.output, table.get("output"))?,
        };
        let cfg = RunConfig {
            problem: ProblemSection { name, ..cfg.problem },
            ..cfg
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.problem.lambda.is_finite() {
            return Err(PinnError::config("problem.lambda", "must be finite"));
        }
        self.pde()?;
        if self.network.hidden_layers == 0 {
            return Err(PinnError::config("network.hidden_layers", "must be at least 1"));
        }
        if self.network.width == 0 {
            return Err(PinnError::config("network.width", "must be at least 1"));
        }
        let s = &self.sampling;
        for (key, n) in [("sampling.n0", s.n0), ("sampling.nb", s.nb), ("sampling.nc", s.nc)] {
            if n == 0 {
                return Err(PinnError::config(key, "must be at least 1"));
            }
        }
        if s.nb % 2 != 0 {
            return Err(PinnError::config("sampling.nb", format!("must be even, got {}", s.nb)));
        }
        self.train_config().validate()?;
        let e = &self.evaluation;
        if !(e.h > 0.0 && e.h <= 1.0) {
            return Err(PinnError::config("evaluation.h", format!("must lie in (0, 1], got {}", e.h)));
        }
        if !(e.dt > 0.0 && e.dt <= 1.0) {
            return Err(PinnError::config("evaluation.dt", format!("must lie in (0, 1], got {}", e.dt)));
        }
        if e.timing_counts.is_empty()
            || e.timing_counts[0] == 0
            || e.timing_counts.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(PinnError::config(
                "evaluation.timing_counts",
                "must be a nonempty strictly increasing list of positive counts",
            ));
        }
        if e.timing_repeats == 0 {
            return Err(PinnError::config("evaluation.timing_repeats", "must be at least 1"));
        }
        Ok(())
    }

    pub fn pde(&self) -> Result<ParabolicPde> {
        match self.problem.name {
            ProblemName::Nws => nws_problem(NwsParams {
                lambda: self.problem.lambda,
            })
            .map_err(|e| match e {
                PinnError::Config { message, .. } => PinnError::config("problem.lambda", message),
                other => other,
            }),
            ProblemName::AllenCahn => Ok(allen_cahn_problem()),
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.training;
        TrainConfig {
            iterations: t.iterations,
            schedule: t.schedule.clone(),
            weights: LossWeights {
                alpha: t.alpha,
                beta: t.beta,
                gamma: t.gamma,
            },
            optimizer: t.optimizer,
            adam: AdamParams {
                beta1: t.beta1,
                beta2: t.beta2,
                epsilon: t.epsilon,
            },
            log_every: t.log_every,
            parallel: t.parallel,
            keep_best: t.keep_best,
        }
    }

    /// Every key, in the file format [`RunConfig::from_toml_str`] reads.
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| PinnError::config("config", e.to_string()))
    }
}

const SECTIONS: [&str; 6] = ["problem", "network", "sampling", "training", "evaluation", "output"];

/// Merges the keys of a TOML section over the serialized defaults.
fn overlay<T: Serialize + DeserializeOwned>(section: &str, defaults: &T, given: Option<&toml::Value>) -> Result<T> {
    let mut base = toml::Value::try_from(defaults)
        .map_err(|e| PinnError::config(section, e.to_string()))?;
    match given {
        None => {}
        Some(toml::Value::Table(keys)) => {
            let base_table = base.as_table_mut().expect("sections serialize to tables");
            for (k, v) in keys {
                if !base_table.contains_key(k) {
                    let expected: Vec<&str> = base_table.keys().map(String::as_str).collect();
                    return Err(PinnError::config(
                        format!("{section}.{k}"),
                        format!("unknown key; expected one of {}", expected.join(", ")),
                    ));
                }
                base_table.insert(k.clone(), v.clone());
            }
        }
        Some(other) => {
            return Err(PinnError::config(section, format!("expected a table, got {}", other.type_str())))
        }
    }
    T::deserialize(base).map_err(|e| {
        // find the key that fails on its own
        let key = given
            .and_then(|g| g.as_table())
            .and_then(|keys| {
                keys.iter().find(|(k, v)| {
                    let mut single = toml::Value::try_from(defaults).expect("defaults serialize");
                    if let Some(t) = single.as_table_mut() {
                        t.insert((*k).clone(), (*v).clone());
                    }
                    T::deserialize(single).is_err()
                })
            })
            .map(|(k, _)| format!("{section}.{k}"))
            .unwrap_or_else(|| section.to_string());
        PinnError::config(key, e.to_string().trim().to_string())
    })
}

/// Reads and validates a config file.
pub fn load_config(path: impl AsRef<Path>, problem: Option<ProblemName>, profile: Profile) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| PinnError::io(path, e))?;
    RunConfig::from_toml_str(&text, problem, profile)
}
