//! The standard experiment matrix: three families × three parameters on
//! Examples 1 and 2.

use std::path::Path;
use std::thread;

use serde::Serialize;

use crate::config::{ProblemSelector, RunConfig, ScheduleConfig};
use crate::harness::{execute, write_artifacts, RunOutput};
use crate::output::write_file;
use crate::HarnessError;

/// The nine schedule configurations, in matrix order.
pub fn standard_schedules() -> Vec<ScheduleConfig> {
    let mut out: Vec<ScheduleConfig> = [1.0, 2.0, 4.0].map(ScheduleConfig::constant).into();
    out.extend([0.25, 0.5, 1.0].map(ScheduleConfig::linear));
    out.extend([0.01, 0.1, 0.5].map(ScheduleConfig::power));
    out
}

/// All 18 runs: Example 1 first, then Example 2, each in schedule order.
pub fn standard_matrix() -> Vec<RunConfig> {
    [ProblemSelector::Example1, ProblemSelector::Example2]
        .into_iter()
        .flat_map(|p| {
            standard_schedules()
                .into_iter()
                .map(move |s| RunConfig::new(p.clone(), s))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub run: String,
    pub family: String,
    pub parameter: f64,
    pub t_reached: f64,
    pub gap_slope: f64,
    pub feasibility_squared_slope: f64,
    pub velocity_slope: f64,
    pub predicted_slope: f64,
    pub passed: bool,
    /// Names of failing checks, or the error that stopped the run.
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixSummary {
    pub rows: Vec<SummaryRow>,
    pub passed: bool,
}

impl MatrixSummary {
    pub fn to_csv(&self) -> String {
        let mut text = String::from(
            "run,family,parameter,t_reached,gap_slope,feasibility_squared_slope,velocity_slope,predicted_slope,passed,failures\n",
        );
        for r in &self.rows {
            text.push_str(&format!(
                "{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{},{}\n",
                r.run,
                r.family,
                r.parameter,
                r.t_reached,
                r.gap_slope,
                r.feasibility_squared_slope,
                r.velocity_slope,
                r.predicted_slope,
                r.passed,
                r.failures.join(";")
            ));
        }
        text
    }
}

fn summarize(cfg: &RunConfig, result: &Result<RunOutput, HarnessError>) -> SummaryRow {
    match result {
        Ok(out) => {
            let slope = |name: &str| {
                out.fits
                    .iter()
                    .find(|f| f.quantity == name)
                    .map_or(f64::NAN, |f| f.slope)
            };
            SummaryRow {
                run: out.report.run.clone(),
                family: out.report.family.clone(),
                parameter: out.report.parameter,
                t_reached: out.report.t_reached,
                gap_slope: slope("lagrangian_gap"),
                feasibility_squared_slope: slope("feasibility_squared"),
                velocity_slope: slope("velocity_norm"),
                predicted_slope: out.predicted_slope(),
                passed: out.report.passed,
                failures: out
                    .report
                    .checks
                    .iter()
                    .filter(|c| !c.passed())
                    .map(|c| c.name.clone())
                    .collect(),
            }
        }
        Err(e) => SummaryRow {
            run: cfg.run_name(),
            family: cfg.schedule.family.as_str().into(),
            parameter: cfg.schedule.param().unwrap_or(f64::NAN),
            t_reached: f64::NAN,
            gap_slope: f64::NAN,
            feasibility_squared_slope: f64::NAN,
            velocity_slope: f64::NAN,
            predicted_slope: f64::NAN,
            passed: false,
            failures: vec![e.to_string()],
        },
    }
}

/// Executes `configs` in parallel, one thread per run. Results come back in
/// config order; a failing run does not stop the others.
pub fn execute_all(configs: &[RunConfig]) -> Vec<Result<RunOutput, HarnessError>> {
    thread::scope(|scope| {
        let handles: Vec<_> = configs.iter().map(|cfg| scope.spawn(move || execute(cfg))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("run thread panicked"))
            .collect()
    })
}

/// Runs every config, writes per-run artifacts under `output_dir/<run>/`
/// plus `summary.csv` and `summary.json`.
pub fn run_matrix(configs: &[RunConfig], output_dir: &Path) -> Result<MatrixSummary, HarnessError> {
    let results = execute_all(configs);
    for out in results.iter().flatten() {
        write_artifacts(out, &output_dir.join(&out.report.run))?;
    }
    let rows: Vec<SummaryRow> = configs.iter().zip(&results).map(|(c, r)| summarize(c, r)).collect();
    let summary = MatrixSummary {
        passed: rows.iter().all(|r| r.passed),
        rows,
    };
    write_file(&output_dir.join("summary.csv"), &summary.to_csv())?;
    write_file(
        &output_dir.join("summary.json"),
        &(serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"),
    )?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_layout() {
        let m = standard_matrix();
        assert_eq!(m.len(), 18);
        let names: Vec<String> = m.iter().map(RunConfig::run_name).collect();
        assert_eq!(names[0], "example1-constant_alpha-alpha0=1");
        assert_eq!(names[4], "example1-linear_alpha-alpha0=0.5");
        assert_eq!(names[8], "example1-power_alpha-r=0.5");
        assert_eq!(names[9], "example2-constant_alpha-alpha0=1");
        for cfg in &m {
            cfg.validate().unwrap();
        }
    }
}
