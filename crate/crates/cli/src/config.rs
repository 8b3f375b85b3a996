use std::path::Path;

use kirchhoff_core::{GridSpec, InitProfile, NonlinearityModel, ProblemParams, SearchOptions};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iters: usize,
    /// `one-minus-r`, `bubble` or `bubble-scan`.
    pub init: InitName,
    pub step: f64,
    /// Concentration used by the `bubble` initializer.
    pub bubble_epsilon: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SearchOptions::default();
        SolverConfig {
            tol: s.tol,
            max_iters: s.max_iters,
            init: InitName::OneMinusR,
            step: s.step,
            bubble_epsilon: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitName {
    OneMinusR,
    Bubble,
    BubbleScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MountainPassConfig {
    pub path_points: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for MountainPassConfig {
    fn default() -> Self {
        let d = kirchhoff_core::MountainPassOptions::default();
        MountainPassConfig {
            path_points: d.path_points,
            max_iters: d.max_iters,
            tol: d.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ProblemParams,
    pub nonlinearity: NonlinearityModel,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub mountain_pass: MountainPassConfig,
    /// Seed for random directions.
    #[serde(default)]
    pub seed: u64,
}

const PARAM_KEYS: [&str; 7] = ["a", "b", "mu", "lambda", "alpha1", "alpha2", "beta"];
const SOLVER_KEYS: [&str; 5] = ["tol", "max_iters", "init", "step", "bubble_epsilon"];

impl RunConfig {
    /// Degenerate single-critical-term instance used when no file is given.
    pub fn default_value() -> Value {
        serde_json::json!({
            "params": {"a": 0.0, "b": 1.0, "mu": 0.0, "lambda": 1.0,
                       "alpha1": 0.0, "alpha2": -0.5, "beta": 0.0},
            "nonlinearity": {"q": 5.0}
        })
    }

    pub fn read_value(path: Option<&Path>) -> Result<Value, CliError> {
        match path {
            None => Ok(Self::default_value()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Validation(format!("cannot read config {}: {e}", p.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Validation(format!("config {} is not valid JSON: {e}", p.display()))
                })
            }
        }
    }

    pub fn from_value(value: Value) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_value(value)
            .map_err(|e| CliError::Validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.validate()?;
        self.nonlinearity.validate_against(&self.params)?;
        self.grid.build()?;
        self.search_options().validate()?;
        if self.mountain_pass.path_points < 3 {
            return Err(CliError::Validation("mountain_pass.path_points must be at least 3".into()));
        }
        if self.solver.bubble_epsilon.is_nan() || self.solver.bubble_epsilon <= 0.0 {
            return Err(CliError::Validation("solver.bubble_epsilon must be positive".into()));
        }
        Ok(())
    }

    pub fn search_options(&self) -> SearchOptions {
        SearchOptions {
            max_iters: self.solver.max_iters,
            step: self.solver.step,
            tol: self.solver.tol,
        }
    }

    pub fn init_profile(&self) -> InitProfile {
        match self.solver.init {
            InitName::OneMinusR => InitProfile::OneMinusR,
            InitName::Bubble => InitProfile::Bubble {
                epsilon: self.solver.bubble_epsilon,
            },
            InitName::BubbleScan => InitProfile::BubbleScan,
        }
    }

    pub fn mountain_pass_options(&self) -> kirchhoff_core::MountainPassOptions {
        kirchhoff_core::MountainPassOptions {
            path_points: self.mountain_pass.path_points,
            max_iters: self.mountain_pass.max_iters,
            tol: self.mountain_pass.tol,
            init: self.init_profile(),
        }
    }
}

/// Resolves a short key such as `lambda` or `q` to its section path.
fn resolve_key(key: &str) -> Vec<String> {
    if key.contains('.') {
        return key.split('.').map(str::to_owned).collect();
    }
    let section = if PARAM_KEYS.contains(&key) {
        Some("params")
    } else if key == "q" {
        Some("nonlinearity")
    } else if key == "n" || key == "grading" {
        Some("grid")
    } else if SOLVER_KEYS.contains(&key) {
        Some("solver")
    } else {
        None
    };
    match section {
        Some(s) => vec![s.to_owned(), key.to_owned()],
        None => vec![key.to_owned()],
    }
}

/// Sets `key` (dotted path or short name) to `raw`, parsed as JSON when possible.
pub fn apply_override(value: &mut Value, key: &str, raw: &str) -> Result<(), CliError> {
    let parsed = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
    let path = resolve_key(key);
    let mut cur = value;
    for (i, part) in path.iter().enumerate() {
        let obj = cur.as_object_mut().ok_or_else(|| {
            CliError::Validation(format!("cannot set '{key}': '{}' is not an object", path[..i].join(".")))
        })?;
        if i + 1 == path.len() {
            obj.insert(part.clone(), parsed);
            return Ok(());
        }
        cur = obj
            .entry(part.clone())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Err(CliError::Validation(format!("empty override key '{key}'")))
}
