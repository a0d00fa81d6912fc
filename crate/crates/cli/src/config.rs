use multidir::derivative::TSchedule;
use multidir::geometry::standard_bodies;
use multidir::oracles::{catalog, CATALOG_NAMES};
use multidir::{ConvexBody, ScalarFunction, Vector};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Derivative,
    Rolle,
    Lagrange,
    Dual,
    BpSearch,
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Derivative => "derivative",
            Command::Rolle => "rolle",
            Command::Lagrange => "lagrange",
            Command::Dual => "dual",
            Command::BpSearch => "bp-search",
            Command::Suite => "suite",
        }
    }
}

/// A catalog name such as `"bowl"` or an explicit function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Catalog(String),
    Custom(ScalarFunction),
}

/// A standard body name such as `"triangle"` or an explicit body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BodySpec {
    Standard(String),
    Custom(ConvexBody),
}

/// File names inside the output directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    pub report: String,
    pub timings: String,
    pub trace: String,
    pub orbit: String,
    pub bridge: String,
    pub suite: String,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            report: "report.json".into(),
            timings: "timings.json".into(),
            trace: "trace.csv".into(),
            orbit: "orbit.csv".into(),
            bridge: "bridge.csv".into(),
            suite: "suite.csv".into(),
        }
    }
}

pub const DEFAULT_GRID: usize = 10;
pub const DEFAULT_TOL: f64 = 1e-6;
/// Random points added to a generated cloud.
pub const DEFAULT_CLOUD_SIZE: usize = 200;

fn default_grid() -> usize {
    DEFAULT_GRID
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

/// Parameters of one run. Optional fields fall back to per-command defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodySpec>,
    /// Dimension used when neither the body nor the apex fixes it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// The apex `a` (the base point `x` for `derivative`, `0` by default).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apex: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Growth-check level for `derivative` (half the estimate by default).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<TSchedule>,
    /// Explicit cloud for `bp-search`; a seeded random one otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub output: OutputPaths,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command: Some(command),
            function: None,
            body: None,
            dim: None,
            apex: None,
            r: None,
            eps: None,
            lambda: None,
            grid: DEFAULT_GRID,
            tol: DEFAULT_TOL,
            seed: 0,
            schedule: None,
            cloud: None,
            cloud_size: None,
            start: None,
            output: OutputPaths::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn schedule(&self) -> TSchedule {
        self.schedule.unwrap_or_default()
    }

    /// Checks that do not need the problem data.
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: &str| Err(CliError::Usage(m.into()));
        if self.command.is_none() {
            return usage("no command given");
        }
        if self.grid == 0 {
            return usage("grid must be positive");
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return usage("tol must be a finite nonnegative number");
        }
        if let Some(s) = &self.schedule {
            s.validate().map_err(|e| CliError::Usage(format!("schedule: {e}")))?;
        }
        if let Some(eps) = self.eps {
            if !(eps > 0.0 && eps.is_finite()) {
                return usage("eps must be positive");
            }
        }
        if self.dim == Some(0) {
            return usage("dim must be positive");
        }
        Ok(())
    }

    /// Resolves names and defaults into concrete problem data.
    pub fn problem(&self) -> Result<Problem, CliError> {
        let dim = self.dimension()?;
        let (function_label, function) = match self.function.as_ref() {
            None => ("linear".to_string(), catalog("linear", dim).unwrap().function),
            Some(FunctionSpec::Catalog(name)) => {
                let e = catalog(name, dim).ok_or_else(|| {
                    CliError::Usage(format!(
                        "unknown catalog function {name:?} (known: {})",
                        CATALOG_NAMES.join(", ")
                    ))
                })?;
                (name.clone(), e.function)
            }
            Some(FunctionSpec::Custom(f)) => (f.label(), f.clone()),
        };
        function
            .validate()
            .map_err(|e| CliError::Usage(format!("function: {e}")))?;
        if let Some(d) = function.dim() {
            if d != dim {
                return Err(CliError::Usage(format!(
                    "function has dimension {d}, problem has {dim}"
                )));
            }
        }
        let (body_label, body) = match self.body.as_ref() {
            None => standard_body("segment", dim)?,
            Some(BodySpec::Standard(name)) => standard_body(name, dim)?,
            Some(BodySpec::Custom(b)) => ("custom".to_string(), b.clone()),
        };
        body.validate()
            .map_err(|e| CliError::Usage(format!("body: {e}")))?;
        let apex = match &self.apex {
            Some(a) => Vector::from_vec(a.clone()),
            None => Vector::zeros(dim),
        };
        if apex.len() != dim || body.dim() != dim {
            return Err(CliError::Usage(format!(
                "apex and body must both have dimension {dim}"
            )));
        }
        Ok(Problem {
            function_label,
            function,
            body_label,
            body,
            apex,
        })
    }

    fn dimension(&self) -> Result<usize, CliError> {
        if let Some(BodySpec::Custom(b)) = &self.body {
            return Ok(b.dim());
        }
        if let Some(a) = &self.apex {
            if a.is_empty() {
                return Err(CliError::Usage("apex must be nonempty".into()));
            }
            return Ok(a.len());
        }
        if let Some(FunctionSpec::Custom(f)) = &self.function {
            if let Some(d) = f.dim() {
                return Ok(d);
            }
        }
        Ok(self.dim.unwrap_or(2))
    }
}

fn standard_body(name: &str, dim: usize) -> Result<(String, ConvexBody), CliError> {
    if dim < 2 {
        return Err(CliError::Usage("standard bodies need dimension >= 2".into()));
    }
    let all = standard_bodies(dim);
    let names: Vec<&str> = all.iter().map(|(n, _)| *n).collect();
    all.iter()
        .find(|(n, _)| *n == name)
        .map(|(n, b)| (n.to_string(), b.clone()))
        .ok_or_else(|| {
            CliError::Usage(format!(
                "unknown standard body {name:?} (known: {})",
                names.join(", ")
            ))
        })
}

/// Concrete data of a single-problem run.
#[derive(Clone, Debug)]
pub struct Problem {
    pub function_label: String,
    pub function: ScalarFunction,
    pub body_label: String,
    pub body: ConvexBody,
    pub apex: Vector,
}
