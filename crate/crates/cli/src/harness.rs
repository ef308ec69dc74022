//! A single configured run: integrate, diagnose, fit and check.

use std::path::{Path, PathBuf};

use serde::Serialize;
use trials_core::dynamics::{peak_stiffness, stiffness_horizon, FieldSpec, PhaseState};
use trials_core::integrator::{integrate, log_grid, Trajectory};
use trials_core::lyapunov::{
    diagnostics, early_window_len, energy_monotonicity, fit_rate, objective_lower_bound_violation,
    velocity_bound_check, DiagnosticsRow, Quantity, RateFit, RateModel,
};
use trials_core::problem::{solve_saddle_point_quadratic, solve_saddle_point_reference, ProblemSpec, SaddlePoint};
use trials_core::schedules::{check_conditions, CheckTolerance, Condition, Schedule};
use trials_core::Error;

use crate::config::{FamilyName, RunConfig};
use crate::output::{write_csv, write_file};
use crate::HarnessError;

/// Relative tolerance on exponential-model slopes.
pub const EXPONENTIAL_SLOPE_TOLERANCE: f64 = 0.15;
/// Allowed growth of `‖ẇ‖ασ` over its early-window maximum.
pub const VELOCITY_GROWTH_LIMIT: f64 = 2.0;
/// Default step cap times the peak stiffness index. Near equilibrium the
/// error estimate alone lets explicit steps leave the stability region and
/// roundoff grows until it reaches the tolerance.
pub const STABLE_STEP: f64 = 2.0;
/// Absolute slack on the objective lower bound and on energy increases.
pub const ABSOLUTE_SLACK: f64 = 1e-9;
/// Energy increases are tolerated up to this multiple of the integrator rtol.
pub const MONOTONICITY_RTOL_FACTOR: f64 = 100.0;

/// Absolute tolerance on the power-model gap slope `−1/α₀` of the linear
/// family, calibrated per `α₀` of the standard matrix.
pub fn power_slope_tolerance(alpha0: f64) -> f64 {
    const TABLE: [(f64, f64); 3] = [(0.25, 0.4), (0.5, 0.25), (1.0, 0.2)];
    TABLE
        .iter()
        .find(|(a, _)| (a - alpha0).abs() < 1e-12)
        .map_or(0.25, |&(_, tol)| tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Not applicable to this run (for instance a trajectory that starts on
    /// the saddle point has nothing to fit).
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// Human-readable acceptance condition on `measured`.
    pub requirement: String,
    pub status: Status,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Check {
    fn at_most(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            requirement: format!("<= {threshold:e}"),
            status: if measured <= threshold {
                Status::Pass
            } else {
                Status::Fail
            },
            note: String::new(),
        }
    }

    fn skipped(name: &str, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            measured: f64::NAN,
            requirement: "n/a".into(),
            status: Status::Skipped,
            note: note.into(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitRow {
    pub quantity: String,
    pub model: String,
    pub window: (f64, f64),
    pub slope: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<f64>,
    pub samples: usize,
    pub clipped: usize,
    pub residual_rms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub run: String,
    pub family: String,
    pub parameter: f64,
    pub t_end: f64,
    /// Where the stiffness guard truncates the run (`t_end` if it does not).
    pub stiffness_horizon: f64,
    pub t_reached: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integration_error: Option<String>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl RunReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub config: RunConfig,
    pub saddle: SaddlePoint,
    pub field: FieldSpec,
    pub trajectory: Trajectory,
    pub rows: Vec<DiagnosticsRow>,
    pub fits: Vec<FitRow>,
    pub report: RunReport,
}

impl RunOutput {
    pub fn schedule(&self) -> &Schedule {
        &self.field.schedule
    }

    /// Window of the family's natural rate model: `[t₀, t_reached]` for
    /// exponential fits, the last three quarters in log scale otherwise
    /// (`[5, 20]` for the standard run).
    pub fn fit_window(&self) -> (f64, f64) {
        let end = self.report.t_reached;
        match self.config.schedule.family {
            FamilyName::LinearAlpha => ((end / 4.0).max(self.config.t_start), end),
            _ => (self.config.t_start, end),
        }
    }

    /// Fits `quantity` with the family's natural model over `window`.
    pub fn fit(&self, quantity: Quantity, window: (f64, f64)) -> trials_core::Result<RateFit> {
        let s = self.schedule();
        let tau = |t: f64| s.tau(t);
        match self.config.schedule.family {
            FamilyName::LinearAlpha => fit_rate(&self.rows, quantity, RateModel::Power, window),
            _ => fit_rate(&self.rows, quantity, RateModel::Exponential(&tau), window),
        }
    }

    /// Slope the theory predicts for rate-controlled quantities:
    /// `−1/α₀` in `log t` for the linear family, `−1` in `τ` otherwise.
    pub fn predicted_slope(&self) -> f64 {
        match self.config.schedule.family {
            FamilyName::LinearAlpha => -1.0 / self.config.schedule.alpha0.unwrap_or(f64::NAN),
            _ => -1.0,
        }
    }
}

fn saddle_point(p: &ProblemSpec) -> Result<SaddlePoint, HarnessError> {
    match solve_saddle_point_quadratic(p) {
        Ok(sp) => Ok(sp),
        Err(Error::Contract(_)) => Ok(solve_saddle_point_reference(p, 1e-12)?),
        Err(e) => Err(e.into()),
    }
}

/// Runs the configured experiment in memory. Configuration problems are
/// errors; integration failures are recorded in the report and the
/// diagnostics cover the integrable range.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    let problem = cfg.build_problem()?;
    let schedule = cfg.schedule.build(cfg.t_start)?;
    let saddle = saddle_point(&problem)?;
    let z0: PhaseState = cfg.initial.build(&problem, &saddle)?;
    let field = FieldSpec::new(problem, schedule)?;
    let mut integrator = cfg.integrator.build();

    let horizon = stiffness_horizon(&field, cfg.t_start, cfg.t_end, cfg.stiffness_limit);
    let full_grid = log_grid(cfg.t_start, cfg.t_end, cfg.grid_size)?;
    let grid: Vec<f64> = full_grid.iter().copied().filter(|&t| t <= horizon).collect();
    if grid.len() < 2 {
        return Err(HarnessError::Config(format!(
            "stiffness limit {:e} is exceeded at t = {horizon}, before the second output time",
            cfg.stiffness_limit
        )));
    }
    let t_stop = *grid.last().unwrap();
    if cfg.integrator.h_max.is_none() {
        integrator.h_max = STABLE_STEP / peak_stiffness(&field, cfg.t_start, t_stop);
    }

    let (trajectory, integration_error) = match integrate(&field, cfg.t_start, t_stop, &z0, &integrator, &grid) {
        Ok(traj) => (traj, None),
        Err(Error::Integration(e)) => {
            let message = format!("{} run {}: {e}", cfg.schedule.family.as_str(), cfg.run_name());
            let traj = e.partial_trajectory.clone().unwrap_or(Trajectory {
                times: Vec::new(),
                states: Vec::new(),
                stats: e.partial.stats,
            });
            (traj, Some(message))
        }
        Err(e) => return Err(e.into()),
    };
    let rows = diagnostics(&field, &saddle, &trajectory)?;
    let t_reached = rows.last().map_or(cfg.t_start, |r| r.t);

    let mut out = RunOutput {
        config: cfg.clone(),
        saddle,
        field,
        trajectory,
        rows,
        fits: Vec::new(),
        report: RunReport {
            run: cfg.run_name(),
            family: cfg.schedule.family.as_str().into(),
            parameter: cfg.schedule.param()?,
            t_end: cfg.t_end,
            stiffness_horizon: horizon,
            t_reached,
            integration_error,
            checks: Vec::new(),
            passed: false,
        },
    };
    out.fits = fit_summary(&out);
    out.report.checks = checks(&out, &full_grid)?;
    out.report.passed = out.report.checks.iter().all(Check::passed);
    Ok(out)
}

fn fit_summary(out: &RunOutput) -> Vec<FitRow> {
    let window = out.fit_window();
    let predicted = out.predicted_slope();
    let linear = out.config.schedule.family == FamilyName::LinearAlpha;
    let mut quantities = vec![
        (Quantity::LagrangianGap, Some(predicted)),
        (Quantity::FeasibilitySquared, Some(predicted)),
        // only the lower side of |F − F*| is tied to the rate, at half of it
        (Quantity::ObjectiveError, Some(0.5 * predicted)),
        (Quantity::VelocityNorm, linear.then_some(-1.0)),
        (Quantity::Energy, None),
        (Quantity::DistanceToSaddle, None),
    ];
    if out.field.problem.strong_convexity().is_some() {
        quantities.push((Quantity::PrimalDistanceSquared, Some(predicted)));
    }
    quantities
        .into_iter()
        .map(|(q, predicted)| match out.fit(q, window) {
            Ok(fit) => FitRow {
                quantity: q.name().into(),
                model: fit.model.name().into(),
                window,
                slope: fit.slope,
                predicted,
                samples: fit.samples,
                clipped: fit.clipped,
                residual_rms: fit.residual_rms,
                error: None,
            },
            Err(e) => FitRow {
                quantity: q.name().into(),
                model: if linear { "power" } else { "exponential" }.into(),
                window,
                slope: f64::NAN,
                predicted,
                samples: 0,
                clipped: 0,
                residual_rms: f64::NAN,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

fn checks(out: &RunOutput, full_grid: &[f64]) -> Result<Vec<Check>, HarnessError> {
    let cfg = &out.config;
    let report = &out.report;
    let mut checks = Vec::new();

    let reached = Check::at_most(
        "integration",
        if report.integration_error.is_some() { 1.0 } else { 0.0 },
        0.0,
    );
    let mut note = format!("reached t = {}", report.t_reached);
    if report.stiffness_horizon < cfg.t_end {
        note.push_str(&format!(
            "; stiffness guard truncates the run at t = {} (limit {:e})",
            report.stiffness_horizon, cfg.stiffness_limit
        ));
    }
    if let Some(e) = &report.integration_error {
        note.push_str(&format!("; {e}"));
    }
    checks.push(reached.with_note(note));

    let cert_grid = if full_grid.len() >= 100 {
        full_grid.to_vec()
    } else {
        log_grid(cfg.t_start, cfg.t_end, 100)?
    };
    let conditions = check_conditions(out.schedule(), &cert_grid, CheckTolerance::default())?;
    let required = [
        Condition::G1Plus,
        Condition::G2,
        Condition::G3,
        Condition::G4,
        Condition::G5,
    ];
    let failing: Vec<&str> = required
        .iter()
        .filter(|&&c| !conditions.passes(c))
        .map(|c| c.name())
        .collect();
    checks.push(
        Check::at_most("schedule_conditions", failing.len() as f64, 0.0).with_note(if failing.is_empty() {
            "G1+, G2, G3, G4, G5 hold on the output grid".to_string()
        } else {
            format!("failing: {}", failing.join(", "))
        }),
    );

    let rel = MONOTONICITY_RTOL_FACTOR * cfg.integrator.build().rtol;
    let mono = energy_monotonicity(&out.rows, rel, ABSOLUTE_SLACK);
    checks.push(
        Check::at_most("energy_monotone", mono.max_excess.max(0.0), ABSOLUTE_SLACK).with_note(format!(
            "largest increase beyond {rel:e} relative, at t = {}",
            mono.at_t
        )),
    );

    let lower = objective_lower_bound_violation(&out.rows, out.saddle.lambda.norm());
    checks.push(Check::at_most("objective_lower_bound", lower, ABSOLUTE_SLACK));

    checks.push(rate_check(out));

    let early = &out.rows[..early_window_len(out.rows.len())];
    let early_max = velocity_bound_check(early, out.schedule());
    let overall = velocity_bound_check(&out.rows, out.schedule());
    checks.push(if early_max <= ABSOLUTE_SLACK {
        Check::skipped(
            "velocity_bound",
            format!("trajectory at rest early on (max {early_max:.3e})"),
        )
    } else {
        Check::at_most(
            "velocity_bound",
            overall,
            VELOCITY_GROWTH_LIMIT * early_max + ABSOLUTE_SLACK,
        )
        .with_note(format!("max of |w'|·alpha·sigma; first-quarter max {early_max:.3e}"))
    });
    Ok(checks)
}

/// The gap decays at least as fast as predicted: power slope at most
/// `−1/α₀ + tol(α₀)` for the linear family, exponential slope at most
/// `−(1 − 0.15)` otherwise.
fn rate_check(out: &RunOutput) -> Check {
    let name = "gap_rate";
    let window = out.fit_window();
    let predicted = out.predicted_slope();
    let threshold = match out.config.schedule.family {
        FamilyName::LinearAlpha => predicted + power_slope_tolerance(out.config.schedule.alpha0.unwrap_or(f64::NAN)),
        _ => predicted * (1.0 - EXPONENTIAL_SLOPE_TOLERANCE),
    };
    match out.fit(Quantity::LagrangianGap, window) {
        Ok(fit) => Check::at_most(name, fit.slope, threshold).with_note(format!(
            "{} fit on [{}, {}], predicted slope {predicted}",
            fit.model.name(),
            window.0,
            window.1
        )),
        Err(e) if out.rows.iter().all(|r| r.lagrangian_gap.abs() <= 1e-15) => {
            Check::skipped(name, format!("gap vanishes along the trajectory ({e})"))
        }
        Err(e) => Check {
            name: name.into(),
            measured: f64::NAN,
            requirement: format!("<= {threshold:e}"),
            status: Status::Fail,
            note: e.to_string(),
        },
    }
}

/// Artifacts of one run, inside `dir`.
pub fn write_artifacts(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let csv = dir.join("diagnostics.csv");
    write_csv(&out.rows, &csv)?;
    let fits = dir.join("fits.csv");
    write_file(&fits, &format_fits(&out.fits))?;
    let report = dir.join("report.json");
    write_file(
        &report,
        &(serde_json::to_string_pretty(&out.report).expect("report serializes") + "\n"),
    )?;
    let config = dir.join("config.json");
    write_file(&config, &(out.config.to_json() + "\n"))?;
    Ok(vec![csv, fits, report, config])
}

pub fn format_fits(fits: &[FitRow]) -> String {
    let mut text =
        String::from("quantity,model,window_start,window_end,slope,predicted,samples,clipped,residual_rms\n");
    for f in fits {
        let predicted = f.predicted.map_or(String::new(), |p| format!("{p:.6}"));
        text.push_str(&format!(
            "{},{},{},{},{:.6},{},{},{},{:.3e}\n",
            f.quantity, f.model, f.window.0, f.window.1, f.slope, predicted, f.samples, f.clipped, f.residual_rms
        ));
    }
    text
}

/// Executes `cfg` and writes its artifacts to `<output_dir>/<run name>/`.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    let out = execute(cfg)?;
    write_artifacts(&out, &cfg.output_dir.join(cfg.run_name()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{InitialConditions, ProblemSelector, ScheduleConfig};

    #[test]
    fn tolerance_table() {
        assert_eq!(power_slope_tolerance(0.5), 0.25);
        assert_eq!(-4.0 + power_slope_tolerance(0.25), -3.6);
        assert_eq!(-1.0 + power_slope_tolerance(1.0), -0.8);
        assert_eq!(power_slope_tolerance(0.3), 0.25);
    }

    #[test]
    fn saddle_start_passes_with_skipped_fits() {
        let mut cfg = RunConfig::new(ProblemSelector::Example1, ScheduleConfig::linear(0.5));
        cfg.initial = InitialConditions::Saddle;
        let out = execute(&cfg).unwrap();
        assert!(out.report.passed, "{:#?}", out.report);
        assert_eq!(out.report.check("gap_rate").unwrap().status, Status::Skipped);
        let worst = out
            .rows
            .iter()
            .map(|r| r.lagrangian_gap.abs().max(r.feasibility))
            .fold(0.0, f64::max);
        assert!(worst <= 1e-9, "{worst:e}");
    }
}
