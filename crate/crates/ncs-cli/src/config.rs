//! Experiment configuration: a flat `key=value` file format, command-line
//! overrides, and the derivation of engine parameters from an evaluation
//! budget.
//!
//! Precedence is flags over file over defaults. Budgets count objective
//! evaluations (the initial population included), so a population of `N`
//! gets `t_max = floor(budget / N) - 1` iterations and consumes exactly
//! `N * (t_max + 1) <= budget` evaluations.
//!
//! Recognized keys: `algorithm`, `problem`, `dim`, `transform_file`,
//! `elements`, `mode`, `budget`, `runs`, `seed`, `n`, `sigma0`,
//! `sigma_min`, `sigma_max`, `r`, `epoch`, `bound_policy`, `trajectory`,
//! `out_dir`, `threads`. Unknown keys are rejected by name. The
//! `NCS_OUT_DIR` environment variable supplies the default output
//! directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ncs_core::antenna::{susaa_objective, AngleGrid, EncodingMode};
use ncs_core::engine::{BoundPolicy, NcsConfig};
use ncs_core::objectives::{load_transform_file, Builtin, ObjectiveSpec};
use thiserror::Error;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "NCS_OUT_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line} is not `key=value`: `{text}`")]
    Malformed { line: usize, text: String },
    #[error("unknown config key `{key}`")]
    UnknownKey { key: String },
    #[error("config key `{key}`: `{value}` is not a valid {expected}")]
    TypeMismatch {
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("missing required config field `{field}`")]
    MissingField { field: &'static str },
    #[error("config key `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
}

/// Which optimizer drives the runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Ncs,
    Phc,
    Random,
}

impl Algorithm {
    pub fn from_name(name: &str) -> Result<Algorithm, ConfigError> {
        match name.to_ascii_lowercase().as_str() {
            "ncs" => Ok(Algorithm::Ncs),
            "phc" => Ok(Algorithm::Phc),
            "random" => Ok(Algorithm::Random),
            _ => Err(ConfigError::TypeMismatch {
                key: "algorithm".into(),
                value: name.into(),
                expected: "algorithm (ncs, phc, random)",
            }),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ncs => "ncs",
            Algorithm::Phc => "phc",
            Algorithm::Random => "random",
        }
    }
}

/// What is being optimized.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSelection {
    /// A builtin benchmark function, optionally shifted/rotated from a
    /// transform data file.
    Benchmark {
        name: String,
        dim: usize,
        transform_file: Option<PathBuf>,
    },
    /// Antenna-array synthesis (peak sidelobe level over the standard
    /// sweep).
    Antenna {
        elements: usize,
        mode: EncodingMode,
    },
}

impl ProblemSelection {
    pub fn label(&self) -> String {
        match self {
            ProblemSelection::Benchmark { name, dim, .. } => format!("{name}_{dim}d"),
            ProblemSelection::Antenna { elements, mode } => {
                format!("susaa{}_{}", elements, mode.name())
            }
        }
    }
}

/// Fully resolved experiment parameters.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub problem: ProblemSelection,
    /// Objective evaluations per run.
    pub budget: usize,
    pub runs: usize,
    /// Run `i` uses seed `base_seed + i`.
    pub base_seed: u64,
    /// Population size.
    pub n: usize,
    /// Initial step size; `None` means one tenth of the widest range.
    pub sigma0: Option<f64>,
    /// Step-size clamp overrides; `None` keeps the range-derived defaults.
    pub sigma_min: Option<f64>,
    pub sigma_max: Option<f64>,
    pub r: f64,
    pub epoch: usize,
    pub bound_policy: BoundPolicy,
    /// Log the retained solution of every search at every iteration.
    pub trajectory: bool,
    pub out_dir: PathBuf,
    /// Worker threads for multi-run experiments; 0 picks the machine's
    /// parallelism.
    pub threads: usize,
}

impl ExperimentConfig {
    /// Build the objective this experiment optimizes.
    pub fn objective(&self) -> anyhow::Result<ObjectiveSpec> {
        match &self.problem {
            ProblemSelection::Benchmark {
                name,
                dim,
                transform_file,
            } => {
                let base = Builtin::from_name(name)?;
                let mut spec = ObjectiveSpec::builtin(base, *dim);
                if let Some(path) = transform_file {
                    let (shift, rotation) = load_transform_file(path, *dim)?;
                    spec = spec.with_shift(shift)?.with_rotation(rotation)?;
                }
                Ok(spec)
            }
            ProblemSelection::Antenna { elements, mode } => {
                Ok(susaa_objective(*mode, *elements, &AngleGrid::standard())?)
            }
        }
    }

    /// Engine parameters for one run with the given seed.
    pub fn engine_config(
        &self,
        problem: &ObjectiveSpec,
        seed: u64,
    ) -> Result<NcsConfig, ConfigError> {
        if self.budget < self.n {
            return Err(ConfigError::InvalidValue {
                key: "budget".into(),
                reason: format!(
                    "budget {} cannot cover one evaluation of each of the {} searches",
                    self.budget, self.n
                ),
            });
        }
        let t_max = self.budget / self.n - 1;
        let mut cfg = NcsConfig::defaults_for(problem, t_max, seed);
        cfg.n = self.n;
        cfg.r = self.r;
        cfg.epoch = self.epoch;
        cfg.bound_policy = self.bound_policy;
        cfg.record_trajectory = self.trajectory;
        if let Some(s) = self.sigma0 {
            cfg.sigma0 = s;
        }
        if let Some(s) = self.sigma_min {
            cfg.sigma_min = s;
        }
        if let Some(s) = self.sigma_max {
            cfg.sigma_max = s;
        }
        Ok(cfg)
    }
}

/// A configuration fragment; fields still unset fall through to the next
/// source in precedence order.
#[derive(Debug, Clone, Default)]
pub struct PartialConfig {
    pub algorithm: Option<Algorithm>,
    pub problem_name: Option<String>,
    pub dim: Option<usize>,
    pub transform_file: Option<PathBuf>,
    pub elements: Option<usize>,
    pub mode: Option<EncodingMode>,
    pub budget: Option<usize>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub sigma0: Option<f64>,
    pub sigma_min: Option<f64>,
    pub sigma_max: Option<f64>,
    pub r: Option<f64>,
    pub epoch: Option<usize>,
    pub bound_policy: Option<BoundPolicy>,
    pub trajectory: Option<bool>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl PartialConfig {
    /// Overlay `self` (higher precedence) on `base`.
    pub fn or(self, base: PartialConfig) -> PartialConfig {
        PartialConfig {
            algorithm: self.algorithm.or(base.algorithm),
            problem_name: self.problem_name.or(base.problem_name),
            dim: self.dim.or(base.dim),
            transform_file: self.transform_file.or(base.transform_file),
            elements: self.elements.or(base.elements),
            mode: self.mode.or(base.mode),
            budget: self.budget.or(base.budget),
            runs: self.runs.or(base.runs),
            seed: self.seed.or(base.seed),
            n: self.n.or(base.n),
            sigma0: self.sigma0.or(base.sigma0),
            sigma_min: self.sigma_min.or(base.sigma_min),
            sigma_max: self.sigma_max.or(base.sigma_max),
            r: self.r.or(base.r),
            epoch: self.epoch.or(base.epoch),
            bound_policy: self.bound_policy.or(base.bound_policy),
            trajectory: self.trajectory.or(base.trajectory),
            out_dir: self.out_dir.or(base.out_dir),
            threads: self.threads.or(base.threads),
        }
    }

    /// Fill defaults and check required fields.
    pub fn resolve(self) -> Result<ExperimentConfig, ConfigError> {
        let algorithm = self.algorithm.ok_or(ConfigError::MissingField {
            field: "algorithm",
        })?;
        let problem_name = self
            .problem_name
            .ok_or(ConfigError::MissingField { field: "problem" })?;

        let problem = if problem_name.eq_ignore_ascii_case("antenna") {
            ProblemSelection::Antenna {
                elements: self.elements.unwrap_or(37),
                mode: self.mode.unwrap_or(EncodingMode::PositionOnly),
            }
        } else {
            ProblemSelection::Benchmark {
                name: problem_name,
                dim: self.dim.unwrap_or(30),
                transform_file: self.transform_file,
            }
        };

        // Default evaluation budgets: 300k for the benchmark problems,
        // 500k for antenna synthesis.
        let budget = self.budget.unwrap_or(match problem {
            ProblemSelection::Antenna { .. } => 500_000,
            ProblemSelection::Benchmark { .. } => 300_000,
        });

        let out_dir = self
            .out_dir
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("results"));

        let config = ExperimentConfig {
            algorithm,
            problem,
            budget,
            runs: self.runs.unwrap_or(25),
            base_seed: self.seed.unwrap_or(1),
            n: self.n.unwrap_or(10),
            sigma0: self.sigma0,
            sigma_min: self.sigma_min,
            sigma_max: self.sigma_max,
            r: self.r.unwrap_or(0.99),
            epoch: self.epoch.unwrap_or(10),
            bound_policy: self.bound_policy.unwrap_or_default(),
            trajectory: self.trajectory.unwrap_or(false),
            out_dir,
            threads: self.threads.unwrap_or(0),
        };

        if config.budget == 0 {
            return Err(ConfigError::InvalidValue {
                key: "budget".into(),
                reason: "budget must be at least 1".into(),
            });
        }
        if config.runs == 0 {
            return Err(ConfigError::InvalidValue {
                key: "runs".into(),
                reason: "runs must be at least 1".into(),
            });
        }
        Ok(config)
    }
}

fn parse_as<T: std::str::FromStr>(
    key: &str,
    value: &str,
    expected: &'static str,
) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::TypeMismatch {
        key: key.into(),
        value: value.into(),
        expected,
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(ConfigError::TypeMismatch {
            key: key.into(),
            value: value.into(),
            expected: "boolean (true/false)",
        }),
    }
}

/// Parse a flat `key=value` config file. Blank lines and `#` comments are
/// skipped; keys may appear once each; unknown keys are errors.
pub fn parse_config(path: impl AsRef<Path>) -> Result<PartialConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}

/// Parse config text; see [`parse_config`].
pub fn parse_config_str(text: &str) -> Result<PartialConfig, ConfigError> {
    let mut seen: BTreeMap<String, String> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
            line: idx + 1,
            text: line.to_string(),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if seen.insert(key.clone(), value).is_some() {
            return Err(ConfigError::InvalidValue {
                key,
                reason: "key appears more than once".into(),
            });
        }
    }

    let mut partial = PartialConfig::default();
    for (key, value) in &seen {
        match key.as_str() {
            "algorithm" => partial.algorithm = Some(Algorithm::from_name(value)?),
            "problem" => partial.problem_name = Some(value.clone()),
            "dim" => partial.dim = Some(parse_as(key, value, "positive integer")?),
            "transform_file" => partial.transform_file = Some(PathBuf::from(value)),
            "elements" => partial.elements = Some(parse_as(key, value, "positive integer")?),
            "mode" => {
                partial.mode =
                    Some(
                        EncodingMode::from_name(value).map_err(|_| ConfigError::TypeMismatch {
                            key: key.clone(),
                            value: value.clone(),
                            expected: "encoding mode (po, pp)",
                        })?,
                    )
            }
            "budget" => partial.budget = Some(parse_as(key, value, "positive integer")?),
            "runs" => partial.runs = Some(parse_as(key, value, "positive integer")?),
            "seed" => partial.seed = Some(parse_as(key, value, "64-bit integer")?),
            "n" => partial.n = Some(parse_as(key, value, "positive integer")?),
            "sigma0" => partial.sigma0 = Some(parse_as(key, value, "positive number")?),
            "sigma_min" => partial.sigma_min = Some(parse_as(key, value, "positive number")?),
            "sigma_max" => partial.sigma_max = Some(parse_as(key, value, "positive number")?),
            "r" => partial.r = Some(parse_as(key, value, "number in (0, 1)")?),
            "epoch" => partial.epoch = Some(parse_as(key, value, "positive integer")?),
            "bound_policy" => {
                partial.bound_policy =
                    Some(
                        BoundPolicy::from_name(value).map_err(|_| ConfigError::TypeMismatch {
                            key: key.clone(),
                            value: value.clone(),
                            expected: "bound policy (reflect, clamp)",
                        })?,
                    )
            }
            "trajectory" => partial.trajectory = Some(parse_bool(key, value)?),
            "out_dir" => partial.out_dir = Some(PathBuf::from(value)),
            "threads" => partial.threads = Some(parse_as(key, value, "integer")?),
            _ => return Err(ConfigError::UnknownKey { key: key.clone() }),
        }
    }
    Ok(partial)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_documented_defaults() {
        let partial = parse_config_str("algorithm=ncs\nproblem=rastrigin\nbudget=1000\n").unwrap();
        let cfg = partial.resolve().unwrap();
        assert_eq!(cfg.algorithm, Algorithm::Ncs);
        assert_eq!(cfg.runs, 25);
        assert_eq!(cfg.n, 10);
        assert_eq!(cfg.r, 0.99);
        assert_eq!(cfg.epoch, 10);
        assert_eq!(cfg.base_seed, 1);
        assert_eq!(cfg.bound_policy, BoundPolicy::Reflect);
        assert!(!cfg.trajectory);
        match cfg.problem {
            ProblemSelection::Benchmark { ref name, dim, .. } => {
                assert_eq!(name, "rastrigin");
                assert_eq!(dim, 30);
            }
            _ => panic!("expected a benchmark problem"),
        }
    }

    #[test]
    fn misspelled_key_is_named_in_the_error() {
        let err = parse_config_str("sgima0=0.5\n").unwrap_err();
        match err {
            ConfigError::UnknownKey { key } => assert_eq!(key, "sgima0"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn flags_override_file_values() {
        let file = parse_config_str("algorithm=ncs\nproblem=sphere\nbudget=100\nseed=3\n").unwrap();
        let flags = PartialConfig {
            seed: Some(7),
            ..Default::default()
        };
        let cfg = flags.or(file).resolve().unwrap();
        assert_eq!(cfg.base_seed, 7);
    }

    #[test]
    fn type_mismatch_names_key_and_value() {
        let err = parse_config_str("budget=ten\n").unwrap_err();
        match err {
            ConfigError::TypeMismatch { key, value, .. } => {
                assert_eq!(key, "budget");
                assert_eq!(value, "ten");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn missing_required_fields_are_reported() {
        let err = parse_config_str("algorithm=phc\n")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(matches!(err, ConfigError::MissingField { field: "problem" }));
    }

    #[test]
    fn engine_overrides_flow_through() {
        let cfg = parse_config_str(
            "algorithm=ncs\nproblem=sphere\ndim=2\nbudget=100\nn=4\nsigma0=0.5\nsigma_min=1e-6\nsigma_max=2.0\nbound_policy=clamp\n",
        )
        .unwrap()
        .resolve()
        .unwrap();
        assert_eq!(cfg.bound_policy, BoundPolicy::Clamp);
        let problem = cfg.objective().unwrap();
        let engine = cfg.engine_config(&problem, 1).unwrap();
        assert_eq!(engine.sigma0, 0.5);
        assert_eq!(engine.sigma_min, 1e-6);
        assert_eq!(engine.sigma_max, 2.0);
        assert_eq!(engine.bound_policy, BoundPolicy::Clamp);
    }

    #[test]
    fn budget_defaults_by_problem_kind() {
        let bench = parse_config_str("algorithm=ncs\nproblem=ackley\n")
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(bench.budget, 300_000);
        let antenna = parse_config_str("algorithm=ncs\nproblem=antenna\n")
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(antenna.budget, 500_000);
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = parse_config_str("budget=1\nbudget=2\n").unwrap_err();
        assert!(matches!(err, ConfigError::InvalidValue { .. }));
    }

    #[test]
    fn antenna_problem_selection() {
        let cfg = parse_config_str(
            "algorithm=ncs\nproblem=antenna\nelements=32\nmode=pp\nbudget=5000\n",
        )
        .unwrap()
        .resolve()
        .unwrap();
        match cfg.problem {
            ProblemSelection::Antenna { elements, mode } => {
                assert_eq!(elements, 32);
                assert_eq!(mode, EncodingMode::PositionPhase);
            }
            _ => panic!("expected the antenna problem"),
        }
        let spec = cfg.objective().unwrap();
        assert_eq!(spec.dim(), 32);
    }

    #[test]
    fn budget_derives_iteration_count() {
        let cfg = parse_config_str("algorithm=ncs\nproblem=sphere\ndim=2\nbudget=1000\n")
            .unwrap()
            .resolve()
            .unwrap();
        let problem = cfg.objective().unwrap();
        let engine = cfg.engine_config(&problem, 1).unwrap();
        assert_eq!(engine.t_max, 99);
        assert_eq!(engine.n * (engine.t_max + 1), 1000);

        let tight = ExperimentConfig {
            budget: 1005,
            ..cfg.clone()
        };
        let engine = tight.engine_config(&problem, 1).unwrap();
        assert!(engine.n * (engine.t_max + 1) <= 1005);
    }
}
