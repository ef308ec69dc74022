use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trials_cli::config::{FamilyName, InitialConditions, ProblemSelector, RunConfig, ScheduleConfig};
use trials_cli::harness::{RunOutput, Status};
use trials_cli::{emit_plotdata, read_csv, run, run_matrix, standard_matrix, HarnessError, OUTPUT_DIR_ENV};
use trials_core::integrator::log_grid;
use trials_core::schedules::{check_conditions, CheckTolerance};

#[derive(Parser)]
#[command(
    name = "trials",
    version,
    about = "Inertial augmented-Lagrangian dynamics experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and check it.
    Run(Box<RunArgs>),
    /// Run the standard 9 schedules × 2 examples matrix.
    Matrix {
        #[arg(long, env = OUTPUT_DIR_ENV, default_value = "trials-output")]
        output_dir: PathBuf,
        /// Restrict to one example.
        #[arg(long)]
        problem: Option<ProblemSelector>,
    },
    /// Check the Lyapunov conditions of a schedule on a log grid.
    CheckSchedule {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long, default_value_t = 1.0)]
        t_start: f64,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Split a diagnostics CSV into two-column plot series.
    EmitPlotdata {
        csv: PathBuf,
        /// Defaults to a `plotdata` directory next to the CSV.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    family: Option<FamilyName>,
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    sigma0: Option<f64>,
}

impl ScheduleArgs {
    fn apply(&self, base: Option<ScheduleConfig>) -> Result<ScheduleConfig, HarnessError> {
        let mut s = match (base, self.family) {
            (Some(s), None) => s,
            (Some(s), Some(f)) if s.family == f => s,
            (_, Some(f)) => ScheduleConfig {
                family: f,
                alpha0: None,
                r: None,
                ..ScheduleConfig::linear(0.0)
            },
            (None, None) => return Err(HarnessError::Config("no schedule: pass --family or --config".into())),
        };
        if self.alpha0.is_some() {
            s.alpha0 = self.alpha0;
        }
        if self.r.is_some() {
            s.r = self.r;
        }
        if let Some(eta) = self.eta {
            s.eta = eta;
        }
        if let Some(sigma0) = self.sigma0 {
            s.sigma0 = sigma0;
        }
        Ok(s)
    }
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    /// example1, example2, example1_l1 or a problem file.
    #[arg(long)]
    problem: Option<ProblemSelector>,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    t_start: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    grid_size: Option<usize>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    stiffness_limit: Option<f64>,
    /// Start at rest from the origin or from the saddle point.
    #[arg(long, value_parser = ["zeros", "saddle"])]
    initial: Option<String>,
    #[arg(long, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, HarnessError> {
        let base = self.config.as_deref().map(RunConfig::load).transpose()?;
        let schedule = self.schedule.apply(base.as_ref().map(|c| c.schedule.clone()))?;
        let mut cfg = match base {
            Some(mut c) => {
                c.schedule = schedule;
                c
            }
            None => RunConfig::new(ProblemSelector::Example1, schedule),
        };
        if let Some(p) = &self.problem {
            cfg.problem = p.clone();
        }
        if self.name.is_some() {
            cfg.name = self.name.clone();
        }
        if self.mu.is_some() {
            cfg.mu = self.mu;
        }
        macro_rules! set {
            ($($field:ident).+ <- $value:expr) => {
                if let Some(v) = $value {
                    cfg.$($field).+ = v;
                }
            };
        }
        set!(t_start <- self.t_start);
        set!(t_end <- self.t_end);
        set!(grid_size <- self.grid_size);
        set!(theta <- self.theta);
        set!(stiffness_limit <- self.stiffness_limit);
        set!(output_dir <- self.output_dir.clone());
        if self.rtol.is_some() {
            cfg.integrator.rtol = self.rtol;
        }
        if self.atol.is_some() {
            cfg.integrator.atol = self.atol;
        }
        if self.max_steps.is_some() {
            cfg.integrator.max_steps = self.max_steps;
        }
        match self.initial.as_deref() {
            Some("zeros") => cfg.initial = InitialConditions::Zeros,
            Some("saddle") => cfg.initial = InitialConditions::Saddle,
            _ => {}
        }
        Ok(cfg)
    }
}

fn print_run(out: &RunOutput, dir: &Path) {
    let r = &out.report;
    println!(
        "run {} (t reached {}, stiffness horizon {})",
        r.run, r.t_reached, r.stiffness_horizon
    );
    for c in &r.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        println!(
            "  {tag} {:<22} {:>12.4e}  {}  {}",
            c.name, c.measured, c.requirement, c.note
        );
    }
    println!("  fits:");
    for f in &out.fits {
        let predicted = f.predicted.map_or("-".to_string(), |p| format!("{p:.3}"));
        println!(
            "    {:<24} {:<11} slope {:>9.4}  predicted {:>7}  [{:.3}, {:.3}] n={} clipped={}",
            f.quantity, f.model, f.slope, predicted, f.window.0, f.window.1, f.samples, f.clipped
        );
    }
    println!("artifacts in {}", dir.display());
    println!(
        "{}",
        if r.passed {
            "all checks passed"
        } else {
            "some checks FAILED"
        }
    );
}

fn exit_for(e: &HarnessError) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        HarnessError::Config(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn verdict(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => args.resolve().and_then(|cfg| {
            let out = run(&cfg)?;
            if let Some(e) = &out.report.integration_error {
                eprintln!("integration stopped early: {e}");
            }
            print_run(&out, &cfg.output_dir.join(cfg.run_name()));
            Ok(out.report.passed)
        }),
        Command::Matrix { output_dir, problem } => {
            let configs: Vec<RunConfig> = standard_matrix()
                .into_iter()
                .filter(|c| problem.as_ref().is_none_or(|p| &c.problem == p))
                .map(|mut c| {
                    c.output_dir = output_dir.clone();
                    c
                })
                .collect();
            run_matrix(&configs, &output_dir).map(|summary| {
                print!("{}", summary.to_csv());
                summary.passed
            })
        }
        Command::CheckSchedule {
            schedule,
            t_start,
            t_end,
            points,
        } => schedule.apply(None).and_then(|s| {
            let built = s.build(t_start)?;
            let grid = log_grid(t_start, t_end, points)?;
            let report = check_conditions(&built, &grid, CheckTolerance::default())?;
            print!("{report}");
            let scaling = grid
                .iter()
                .map(|&t| built.scaling_identity_residual(t))
                .fold(0.0, f64::max);
            println!("scaling identity residual {scaling:.3e}");
            Ok(report.certifies_lyapunov())
        }),
        Command::EmitPlotdata { csv, output_dir } => read_csv(&csv).and_then(|rows| {
            let dir = output_dir.unwrap_or_else(|| csv.parent().unwrap_or(Path::new(".")).join("plotdata"));
            for path in emit_plotdata(&rows, &dir)? {
                println!("{}", path.display());
            }
            Ok(true)
        }),
    };
    match result {
        Ok(passed) => verdict(passed),
        Err(e) => exit_for(&e),
    }
}
