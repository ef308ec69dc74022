//! Run configuration: a JSON document with defaults for every key.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use trials_core::dynamics::PhaseState;
use trials_core::integrator::IntegratorConfig;
use trials_core::problem::{
    make_example1, make_example1_l1, make_example2, Block, Logistic, ProblemSpec, Quadratic, QuadraticL1, SaddlePoint,
    EXAMPLE_MU,
};
use trials_core::schedules::{make_constant_alpha, make_linear_alpha, make_power_alpha, Schedule, DEFAULT_ETA};
use trials_core::smoothing::{smooth_problem, DEFAULT_THETA};
use trials_core::{Matrix, Vector};

use crate::HarnessError;

/// Fastest-mode rate beyond which runs are truncated; see
/// [`trials_core::dynamics::stiffness_index`].
pub const DEFAULT_STIFFNESS_LIMIT: f64 = 1e4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemSelector {
    Example1,
    Example2,
    /// ℓ1-regularized Example 1; an extension fixture for the smoothing path.
    Example1L1,
    /// Path to a JSON problem file (see [`CustomProblem`]).
    Custom(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    ConstantAlpha,
    LinearAlpha,
    PowerAlpha,
}

impl FamilyName {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyName::ConstantAlpha => "constant_alpha",
            FamilyName::LinearAlpha => "linear_alpha",
            FamilyName::PowerAlpha => "power_alpha",
        }
    }
}

impl std::str::FromStr for FamilyName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "constant_alpha" => Ok(FamilyName::ConstantAlpha),
            "linear_alpha" => Ok(FamilyName::LinearAlpha),
            "power_alpha" => Ok(FamilyName::PowerAlpha),
            _ => Err(format!(
                "unknown family `{s}` (constant_alpha, linear_alpha, power_alpha)"
            )),
        }
    }
}

impl std::str::FromStr for ProblemSelector {
    type Err = String;

    /// Built-in names, anything else is a path to a problem file.
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "example1" => ProblemSelector::Example1,
            "example2" => ProblemSelector::Example2,
            "example1_l1" => ProblemSelector::Example1L1,
            path => ProblemSelector::Custom(PathBuf::from(path)),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub family: FamilyName,
    /// `α₀` for the constant and linear families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    /// Exponent of the power family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "one")]
    pub sigma0: f64,
}

impl ScheduleConfig {
    pub fn constant(alpha0: f64) -> Self {
        Self::with_param(FamilyName::ConstantAlpha, Some(alpha0), None)
    }

    pub fn linear(alpha0: f64) -> Self {
        Self::with_param(FamilyName::LinearAlpha, Some(alpha0), None)
    }

    pub fn power(r: f64) -> Self {
        Self::with_param(FamilyName::PowerAlpha, None, Some(r))
    }

    fn with_param(family: FamilyName, alpha0: Option<f64>, r: Option<f64>) -> Self {
        Self {
            family,
            alpha0,
            r,
            eta: DEFAULT_ETA,
            sigma0: 1.0,
        }
    }

    /// The family parameter (`α₀` or `r`).
    pub fn param(&self) -> Result<f64, HarnessError> {
        let (value, name) = match self.family {
            FamilyName::PowerAlpha => (self.r, "r"),
            _ => (self.alpha0, "alpha0"),
        };
        value.ok_or_else(|| HarnessError::Config(format!("{} needs `{name}`", self.family.as_str())))
    }

    pub fn label(&self) -> String {
        let (name, value) = match self.family {
            FamilyName::PowerAlpha => ("r", self.r),
            _ => ("alpha0", self.alpha0),
        };
        format!("{}-{name}={}", self.family.as_str(), value.unwrap_or(f64::NAN))
    }

    pub fn build(&self, t0: f64) -> Result<Schedule, HarnessError> {
        let wrong = match self.family {
            FamilyName::PowerAlpha => self.alpha0.is_some().then_some("alpha0"),
            _ => self.r.is_some().then_some("r"),
        };
        if let Some(key) = wrong {
            return Err(HarnessError::Config(format!(
                "`{key}` does not apply to {}",
                self.family.as_str()
            )));
        }
        let param = self.param()?;
        let built = match self.family {
            FamilyName::ConstantAlpha => make_constant_alpha(param, self.eta, self.sigma0, t0),
            FamilyName::LinearAlpha => make_linear_alpha(param, self.eta, self.sigma0, t0),
            FamilyName::PowerAlpha => make_power_alpha(param, self.eta, self.sigma0, t0),
        };
        built.map_err(|e| HarnessError::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
}

impl IntegratorOverrides {
    pub fn build(&self) -> IntegratorConfig {
        let mut cfg = IntegratorConfig::default();
        if let Some(v) = self.rtol {
            cfg.rtol = v;
        }
        if let Some(v) = self.atol {
            cfg.atol = v;
        }
        cfg.h_init = self.h_init.or(cfg.h_init);
        if let Some(v) = self.h_max {
            cfg.h_max = v;
        }
        if let Some(v) = self.max_steps {
            cfg.max_steps = v;
        }
        cfg
    }
}

/// Starting point of a run. Velocities are zero unless given explicitly.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum InitialConditions {
    #[default]
    Zeros,
    /// At rest on the saddle point.
    Saddle,
    Explicit {
        x: Vec<f64>,
        y: Vec<f64>,
        lambda: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nu: Option<Vec<f64>>,
    },
}

impl InitialConditions {
    pub fn build(&self, p: &ProblemSpec, sp: &SaddlePoint) -> Result<PhaseState, HarnessError> {
        let z = match self {
            InitialConditions::Zeros => PhaseState::zeros(p),
            InitialConditions::Saddle => PhaseState::at_rest(sp.x.clone(), sp.y.clone(), sp.lambda.clone()),
            InitialConditions::Explicit { x, y, lambda, u, v, nu } => {
                let vel = |given: &Option<Vec<f64>>, n: usize| {
                    given
                        .as_ref()
                        .map_or_else(|| Vector::zeros(n), |w| Vector::from_column_slice(w))
                };
                PhaseState {
                    x: Vector::from_column_slice(x),
                    y: Vector::from_column_slice(y),
                    lambda: Vector::from_column_slice(lambda),
                    u: vel(u, x.len()),
                    v: vel(v, y.len()),
                    nu: vel(nu, lambda.len()),
                }
            }
        };
        z.check_dims(p)
            .map_err(|e| HarnessError::Config(format!("initial conditions: {e}")))?;
        if !z.is_finite() {
            return Err(HarnessError::Config("initial conditions must be finite".into()));
        }
        Ok(z)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Name of the run directory; derived from problem and schedule if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "default_problem")]
    pub problem: ProblemSelector,
    pub schedule: ScheduleConfig,
    /// Overrides the problem's penalty parameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default = "one")]
    pub t_start: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default)]
    pub integrator: IntegratorOverrides,
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    #[serde(default)]
    pub initial: InitialConditions,
    /// Moreau smoothing parameter for non-smooth problems.
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_stiffness_limit")]
    pub stiffness_limit: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn one() -> f64 {
    1.0
}
fn default_eta() -> f64 {
    DEFAULT_ETA
}
fn default_problem() -> ProblemSelector {
    ProblemSelector::Example1
}
fn default_t_end() -> f64 {
    20.0
}
fn default_grid_size() -> usize {
    200
}
fn default_theta() -> f64 {
    DEFAULT_THETA
}
fn default_stiffness_limit() -> f64 {
    DEFAULT_STIFFNESS_LIMIT
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("trials-output")
}

impl RunConfig {
    pub fn new(problem: ProblemSelector, schedule: ScheduleConfig) -> Self {
        Self {
            name: None,
            problem,
            schedule,
            mu: None,
            t_start: 1.0,
            t_end: default_t_end(),
            integrator: IntegratorOverrides::default(),
            grid_size: default_grid_size(),
            initial: InitialConditions::Zeros,
            theta: DEFAULT_THETA,
            stiffness_limit: DEFAULT_STIFFNESS_LIMIT,
            output_dir: default_output_dir(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("invalid config: {e}")))
    }

    /// Reads a config file. A relative custom problem path is taken relative
    /// to the file's directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        if let (ProblemSelector::Custom(problem), Some(dir)) = (&mut cfg.problem, path.parent()) {
            if problem.is_relative() {
                *problem = dir.join(&*problem);
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RunConfig serializes")
    }

    pub fn run_name(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        let problem = match &self.problem {
            ProblemSelector::Example1 => "example1".to_string(),
            ProblemSelector::Example2 => "example2".to_string(),
            ProblemSelector::Example1L1 => "example1_l1".to_string(),
            ProblemSelector::Custom(path) => path
                .file_stem()
                .map_or("custom".into(), |s| s.to_string_lossy().into_owned()),
        };
        format!("{problem}-{}", self.schedule.label())
    }

    /// Checks every parameter against the constructors' preconditions
    /// without integrating anything.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if !(self.t_start > 0.0 && self.t_start.is_finite()) {
            return bad(format!("t_start must be positive, got {}", self.t_start));
        }
        if !(self.t_end > self.t_start && self.t_end.is_finite()) {
            return bad(format!("t_end must exceed t_start, got {}", self.t_end));
        }
        if self.grid_size < 2 {
            return bad(format!("grid_size must be at least 2, got {}", self.grid_size));
        }
        if let Some(mu) = self.mu {
            if !(mu > 0.0 && mu.is_finite()) {
                return bad(format!("mu must be positive, got {mu}"));
            }
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return bad(format!("theta must be positive, got {}", self.theta));
        }
        if self.stiffness_limit.is_nan() || self.stiffness_limit <= 0.0 {
            return bad(format!(
                "stiffness_limit must be positive, got {}",
                self.stiffness_limit
            ));
        }
        self.schedule.build(self.t_start)?;
        self.integrator
            .build()
            .validate()
            .map_err(|e| HarnessError::Config(format!("integrator: {e}")))
    }

    /// The problem the dynamics run on: prox blocks are smoothed with `theta`.
    pub fn build_problem(&self) -> Result<ProblemSpec, HarnessError> {
        let base = match &self.problem {
            ProblemSelector::Example1 => make_example1(),
            ProblemSelector::Example2 => make_example2(),
            ProblemSelector::Example1L1 => make_example1_l1(),
            ProblemSelector::Custom(path) => CustomProblem::load(path)?.build()?,
        };
        let p = match self.mu {
            Some(mu) => base.with_mu(mu),
            None => Ok(base),
        }
        .and_then(|p| smooth_problem(&p, self.theta));
        p.map_err(|e| HarnessError::Config(format!("problem: {e}")))
    }
}

/// Objective block of a custom problem file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", deny_unknown_fields)]
pub enum BlockSpec {
    /// `½⟨x, Qx⟩ + ⟨q, x⟩ + k`.
    Quadratic {
        q: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        linear: Option<Vec<f64>>,
        #[serde(default)]
        constant: f64,
    },
    /// `‖x − center‖²`.
    SquaredDistance {
        center: Vec<f64>,
    },
    /// `log(1 + exp(⟨d, x⟩))`.
    Logistic {
        direction: Vec<f64>,
    },
    /// `weight·‖x‖₁ + (scale/2)‖x − center‖²`, handled by smoothing.
    QuadraticL1 {
        weight: f64,
        scale: f64,
        center: Vec<f64>,
    },
    Zero {
        dim: usize,
    },
}

fn matrix_from_rows(what: &str, rows: &[Vec<f64>]) -> Result<Matrix, HarnessError> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(HarnessError::Config(format!("{what}: rows have different lengths")));
    }
    Ok(Matrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

impl BlockSpec {
    pub fn build(&self) -> Result<Block, HarnessError> {
        let wrap = |e: trials_core::Error| HarnessError::Config(format!("block: {e}"));
        Ok(match self {
            BlockSpec::Quadratic { q, linear, constant } => {
                let q = matrix_from_rows("q", q)?;
                let lin = linear
                    .as_ref()
                    .map_or_else(|| Vector::zeros(q.nrows()), |l| Vector::from_column_slice(l));
                Block::Smooth(Arc::new(Quadratic::new(q, lin, *constant).map_err(wrap)?))
            }
            BlockSpec::SquaredDistance { center } => {
                Block::Smooth(Arc::new(Quadratic::squared_distance(Vector::from_column_slice(center))))
            }
            BlockSpec::Logistic { direction } => {
                Block::Smooth(Arc::new(Logistic::new(Vector::from_column_slice(direction))))
            }
            BlockSpec::QuadraticL1 { weight, scale, center } => Block::Prox(Arc::new(
                QuadraticL1::new(*weight, *scale, Vector::from_column_slice(center)).map_err(wrap)?,
            )),
            BlockSpec::Zero { dim } => Block::Smooth(Arc::new(Quadratic::zero(*dim))),
        })
    }
}

/// Problem file: `min f(x) + g(y)` subject to `Ax + By = c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomProblem {
    pub f: BlockSpec,
    pub g: BlockSpec,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    #[serde(default = "default_mu")]
    pub mu: f64,
}

fn default_mu() -> f64 {
    EXAMPLE_MU
}

impl CustomProblem {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    pub fn build(&self) -> Result<ProblemSpec, HarnessError> {
        ProblemSpec::new(
            self.f.build()?,
            self.g.build()?,
            matrix_from_rows("a", &self.a)?,
            matrix_from_rows("b", &self.b)?,
            Vector::from_column_slice(&self.c),
            self.mu,
        )
        .map_err(|e| HarnessError::Config(format!("problem: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_json(r#"{"schedule": {"family": "linear_alpha", "alpha0": 0.5}}"#).unwrap();
        assert_eq!(
            cfg,
            RunConfig::new(ProblemSelector::Example1, ScheduleConfig::linear(0.5))
        );
        assert_eq!(cfg.run_name(), "example1-linear_alpha-alpha0=0.5");
        cfg.validate().unwrap();
    }

    #[test]
    fn round_trip_preserves_every_field() {
        let mut cfg = RunConfig::new(ProblemSelector::Custom("p.json".into()), ScheduleConfig::power(0.1));
        cfg.mu = Some(3.0);
        cfg.integrator.rtol = Some(1e-9);
        cfg.initial = InitialConditions::Explicit {
            x: vec![1.0, 2.0],
            y: vec![0.0, 0.0],
            lambda: vec![0.5, -0.5],
            u: Some(vec![0.1, 0.2]),
            v: None,
            nu: None,
        };
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn rejects_invalid_parameters() {
        let mut cfg = RunConfig::new(ProblemSelector::Example1, ScheduleConfig::constant(1.0));
        cfg.schedule.eta = 0.5;
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
        let mut cfg = RunConfig::new(ProblemSelector::Example1, ScheduleConfig::power(1.5));
        assert!(cfg.validate().is_err());
        cfg.schedule = ScheduleConfig::linear(0.5);
        cfg.schedule.r = Some(0.5);
        assert!(cfg.validate().is_err());
        assert!(
            RunConfig::from_json(r#"{"schedule": {"family": "linear_alpha", "alpha0": 0.5}, "bogus": 1}"#).is_err()
        );
    }

    #[test]
    fn custom_problem_matches_example1() {
        let spec = CustomProblem {
            f: BlockSpec::SquaredDistance { center: vec![1.0, 1.0] },
            g: BlockSpec::Quadratic {
                q: vec![vec![2.0, 0.0], vec![0.0, 2.0]],
                linear: None,
                constant: 0.0,
            },
            a: vec![vec![-1.0, 1.0], vec![0.0, -1.0]],
            b: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            c: vec![0.0, 0.0],
            mu: EXAMPLE_MU,
        };
        let p = spec.build().unwrap();
        let e = make_example1();
        let (x, y) = (Vector::from_vec(vec![0.3, -1.2]), Vector::from_vec(vec![2.0, 0.7]));
        assert!((p.objective(&x, &y).unwrap() - e.objective(&x, &y).unwrap()).abs() < 1e-14);
        assert_eq!(p.a, e.a);
    }
}
