//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line
//! with the measured values, then asserts.

use std::io::Write as _;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use trials_cli::harness::{execute, RunOutput};
use trials_cli::matrix::execute_all;
use trials_cli::{standard_matrix, InitialConditions, ProblemSelector, RunConfig, ScheduleConfig};
use trials_core::dynamics::vector_field;
use trials_core::integrator::{integrate_system, OdeSystem};
use trials_core::lyapunov::{
    early_window_len, energy_monotonicity, objective_lower_bound_violation, strong_convergence_check,
    StrongConvergence, MIN_FIT_SAMPLES,
};
use trials_core::problem::{
    make_example1, make_example1_l1, make_example2, solve_saddle_point_quadratic, solve_saddle_point_reference,
    ProxFunction, QuadraticL1,
};
use trials_core::schedules::{
    check_conditions, make_constant_alpha, make_linear_alpha, make_power_alpha, CheckTolerance, Condition,
};
use trials_core::smoothing::{moreau_grad, moreau_value, MoreauBlock};
use trials_core::{
    log_grid, smooth_problem, FieldSpec, IntegratorConfig, PhaseState, Quantity, RateModel, Schedule, Vector,
};

fn verdict(n: u32, name: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    // straight to the handle so the line survives libtest's output capture
    let _ = writeln!(std::io::stderr().lock(), "criterion {n:>2} {tag} {name}: {detail}");
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

fn config(problem: ProblemSelector, schedule: ScheduleConfig) -> RunConfig {
    RunConfig::new(problem, schedule)
}

fn run(problem: ProblemSelector, schedule: ScheduleConfig) -> RunOutput {
    let out = execute(&config(problem, schedule)).expect("run executes");
    assert!(
        out.report.integration_error.is_none(),
        "{:?}",
        out.report.integration_error
    );
    out
}

fn random_vector(rng: &mut StdRng, n: usize, half_width: f64) -> Vector {
    Vector::from_fn(n, |_, _| rng.random_range(-half_width..half_width))
}

fn central_difference(h: f64, z: &Vector, f: impl Fn(&Vector) -> f64) -> Vector {
    Vector::from_fn(z.len(), |i, _| {
        let mut plus = z.clone();
        let mut minus = z.clone();
        plus[i] += h;
        minus[i] -= h;
        (f(&plus) - f(&minus)) / (2.0 * h)
    })
}

#[test]
fn criterion_01_gradient_correctness() {
    let fixtures = [
        ("example1", make_example1()),
        ("example2", make_example2()),
        ("example1_l1 θ=1e-3", smooth_problem(&make_example1_l1(), 1e-3).unwrap()),
    ];
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = Vec::new();
    for (name, p) in &fixtures {
        let (nx, ny, nz) = (p.dim_x(), p.dim_y(), p.dim_z());
        let mut max_rel: f64 = 0.0;
        for _ in 0..100 {
            let w = random_vector(&mut rng, nx + ny + nz, 2.0);
            let split = |w: &Vector| {
                (
                    w.rows(0, nx).into_owned(),
                    w.rows(nx, ny).into_owned(),
                    w.rows(nx + ny, nz).into_owned(),
                )
            };
            let (x, y, l) = split(&w);
            let g = p.grad_aug_lagrangian(&x, &y, &l).unwrap();
            let analytic = Vector::from_iterator(
                nx + ny + nz,
                g.x.iter().chain(g.y.iter()).chain(g.lambda.iter()).copied(),
            );
            let numeric = central_difference(1e-5, &w, |w| {
                let (x, y, l) = split(w);
                p.aug_lagrangian(&x, &y, &l).unwrap()
            });
            max_rel = max_rel.max((&analytic - &numeric).norm() / analytic.norm());
        }
        worst.push((name, max_rel));
    }
    let ok = worst.iter().all(|(_, e)| *e <= 1e-6);
    let detail = worst
        .iter()
        .map(|(n, e)| format!("{n} max rel err {e:.2e}"))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(1, "gradient correctness", ok, &detail);
}

#[test]
fn criterion_02_schedule_certification() {
    let mut rng = StdRng::seed_from_u64(2);
    let grid = log_grid(1.0, 100.0, 200).unwrap();
    let tol = CheckTolerance::default();
    let mut failures = Vec::new();
    let (mut worst_g4, mut worst_scaling): (f64, f64) = (0.0, 0.0);
    for family in ["constant", "linear", "power"] {
        for _ in 0..20 {
            let eta = rng.random_range(1.05..3.0);
            let sigma0 = rng.random_range(0.5..2.0);
            let s = match family {
                "constant" => make_constant_alpha(10f64.powf(rng.random_range(-1.0..1.0)), eta, sigma0, 1.0),
                "linear" => make_linear_alpha(rng.random_range(0.1..2.0), eta, sigma0, 1.0),
                _ => make_power_alpha(rng.random_range(0.01..0.99), eta, sigma0, 1.0),
            }
            .unwrap();
            let report = check_conditions(&s, &grid, tol).unwrap();
            let g4 = report.get(Condition::G4).worst;
            let scaling = grid.iter().map(|&t| s.scaling_identity_residual(t)).fold(0.0, f64::max);
            worst_g4 = worst_g4.max(g4);
            worst_scaling = worst_scaling.max(scaling);
            if !report.certifies_lyapunov() || g4 > 1e-9 || scaling > 1e-10 {
                failures.push(format!("{family} {:?}", s.family_ref()));
            }
        }
    }
    verdict(
        2,
        "schedule certification",
        failures.is_empty(),
        &format!("60 tuples, G4 residual {worst_g4:.2e}, scaling residual {worst_scaling:.2e}, failing {failures:?}"),
    );
}

fn three_initial_conditions() -> [InitialConditions; 3] {
    [
        InitialConditions::Zeros,
        InitialConditions::Explicit {
            x: vec![1.0, 1.0],
            y: vec![-1.0, -1.0],
            lambda: vec![0.5, 0.5],
            u: None,
            v: None,
            nu: None,
        },
        InitialConditions::Explicit {
            x: vec![-2.0, 0.0],
            y: vec![0.0, 0.5],
            lambda: vec![0.0, 0.0],
            u: Some(vec![0.0, 1.0]),
            v: None,
            nu: Some(vec![-1.0, 0.0]),
        },
    ]
}

#[test]
fn criterion_03_lyapunov_monotonicity() {
    let schedules = [
        ScheduleConfig::constant(1.0),
        ScheduleConfig::linear(0.25),
        ScheduleConfig::linear(0.5),
        ScheduleConfig::linear(1.0),
        ScheduleConfig::power(0.5),
    ];
    let mut configs = Vec::new();
    for problem in [ProblemSelector::Example1, ProblemSelector::Example2] {
        for s in &schedules {
            for ic in three_initial_conditions() {
                let mut cfg = config(problem.clone(), s.clone());
                cfg.initial = ic;
                configs.push(cfg);
            }
        }
    }
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    for (cfg, result) in configs.iter().zip(execute_all(&configs)) {
        let out = result.expect("run executes");
        let mono = energy_monotonicity(&out.rows, 1e-6, 1e-9);
        worst = worst.max(mono.max_excess);
        if !mono.passed || out.report.integration_error.is_some() {
            failures.push(format!("{} {:?} at t={}", cfg.run_name(), cfg.initial, mono.at_t));
        }
    }
    verdict(
        3,
        "Lyapunov monotonicity",
        failures.is_empty(),
        &format!(
            "{} runs, largest excess over 1e-6 relative {worst:.2e}, failing {failures:?}",
            configs.len()
        ),
    );
}

#[test]
fn criterion_04_nesterov_critical_rate() {
    let out = run(ProblemSelector::Example1, ScheduleConfig::linear(0.5));
    let window = (5.0, 20.0);
    let gap = out.fit(Quantity::LagrangianGap, window).unwrap();
    let feas = out.fit(Quantity::FeasibilitySquared, window).unwrap();
    let scaled: Vec<f64> = out.rows.iter().map(|r| r.velocity_norm * r.t).collect();
    let early = scaled[..early_window_len(scaled.len())]
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let overall = scaled.iter().copied().fold(0.0, f64::max);
    let ok = gap.slope <= -1.75 && feas.slope <= -1.75 && overall <= 2.0 * early && out.report.t_reached == 20.0;
    verdict(
        4,
        "Nesterov-critical rate",
        ok,
        &format!(
            "gap slope {:.3}, feasibility² slope {:.3}, max |w'|·t {overall:.3e} vs early {early:.3e}",
            gap.slope, feas.slope
        ),
    );
}

#[test]
fn criterion_05_scaled_rate() {
    let mut parts = Vec::new();
    let mut ok = true;
    for problem in [ProblemSelector::Example1, ProblemSelector::Example2] {
        for (alpha0, bound) in [(0.25, -3.6), (1.0, -0.8)] {
            let out = run(problem.clone(), ScheduleConfig::linear(alpha0));
            let fit = out.fit(Quantity::LagrangianGap, (5.0, 20.0)).unwrap();
            ok &= fit.slope <= bound && out.report.t_reached == 20.0;
            parts.push(format!(
                "{} α₀={alpha0} slope {:.3} (≤ {bound})",
                out.report.run, fit.slope
            ));
        }
    }
    verdict(5, "scaled rate", ok, &parts.join(", "));
}

/// `∫₁ᵗ 1/α`, written out independently of the schedule module.
fn tau_oracle(family: &str, t: f64) -> f64 {
    match family {
        "constant1" => t - 1.0,
        "power0.5" => 2.0 * (t.sqrt() - 1.0),
        _ => unreachable!(),
    }
}

#[test]
fn criterion_06_exponential_rates() {
    let mut parts = Vec::new();
    let mut ok = true;
    for problem in [ProblemSelector::Example1, ProblemSelector::Example2] {
        for (label, schedule) in [
            ("constant1", ScheduleConfig::constant(1.0)),
            ("power0.5", ScheduleConfig::power(0.5)),
        ] {
            let out = run(problem.clone(), schedule);
            for r in &out.rows {
                assert!((out.schedule().tau(r.t) - tau_oracle(label, r.t)).abs() <= 1e-12 * (1.0 + r.t));
            }
            let tau = |t: f64| tau_oracle(label, t);
            let window = (out.config.t_start, out.report.t_reached);
            let fit = trials_core::fit_rate(&out.rows, Quantity::LagrangianGap, RateModel::Exponential(&tau), window)
                .unwrap();
            let objective = trials_core::fit_rate(
                &out.rows,
                Quantity::ObjectiveError,
                RateModel::Exponential(&tau),
                window,
            )
            .unwrap();
            let pass = fit.samples >= MIN_FIT_SAMPLES && (fit.slope + 1.0).abs() <= 0.15;
            ok &= pass;
            parts.push(format!(
                "{} gap slope {:.3} on [{:.2}, {:.2}] n={} ({}; |F−F*| slope {:.3})",
                out.report.run,
                fit.slope,
                window.0,
                window.1,
                fit.samples,
                if pass { "ok" } else { "outside [−1.15, −0.85]" },
                objective.slope
            ));
        }
    }
    verdict(6, "exponential rates", ok, &parts.join("; "));
}

#[test]
fn criterion_07_strong_convergence() {
    let modulus = make_example1().strong_convexity();
    let linear = run(ProblemSelector::Example1, ScheduleConfig::linear(0.5));
    let power_fit = match strong_convergence_check(&linear.rows, modulus, RateModel::Power, (5.0, 20.0)).unwrap() {
        StrongConvergence::Fit(f) => f,
        StrongConvergence::Degenerate => panic!("zero start is not at the solution"),
    };
    let constant = run(ProblemSelector::Example1, ScheduleConfig::constant(1.0));
    let tau = |t: f64| t - 1.0;
    let window = (1.0, constant.report.t_reached);
    let exp_fit = match strong_convergence_check(&constant.rows, modulus, RateModel::Exponential(&tau), window).unwrap()
    {
        StrongConvergence::Fit(f) => f,
        StrongConvergence::Degenerate => panic!("zero start is not at the solution"),
    };
    let linear_ok = power_fit.slope <= -1.7;
    let constant_ok = exp_fit.samples >= MIN_FIT_SAMPLES && (exp_fit.slope + 1.0).abs() <= 0.2;
    verdict(
        7,
        "strong convergence",
        linear_ok && constant_ok,
        &format!(
            "linear α₀=1/2 squared-distance slope {:.3} (≤ −1.7: {}); constant α₀=1 exponential slope {:.3} on [1, {:.2}] (within 20% of −1: {})",
            power_fit.slope, linear_ok, exp_fit.slope, window.1, constant_ok
        ),
    );
}

#[test]
fn criterion_08_objective_lower_bound() {
    let configs = standard_matrix();
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    for (cfg, result) in configs.iter().zip(execute_all(&configs)) {
        let out = result.expect("run executes");
        let v = objective_lower_bound_violation(&out.rows, out.saddle.lambda.norm());
        worst = worst.max(v);
        if out.rows.is_empty() || v > 1e-9 {
            failures.push(cfg.run_name());
        }
    }
    verdict(
        8,
        "objective lower bound",
        failures.is_empty(),
        &format!(
            "{} runs, max of −‖λ*‖·feasibility − (F − F*) is {worst:.2e}, failing {failures:?}",
            configs.len()
        ),
    );
}

#[test]
fn criterion_09_oracle_equivalence() {
    let p = make_example1();
    let quad = solve_saddle_point_quadratic(&p).unwrap();
    let reference = solve_saddle_point_reference(&p, 1e-10).unwrap();
    let distance = ((&quad.x - &reference.x).norm_squared()
        + (&quad.y - &reference.y).norm_squared()
        + (&quad.lambda - &reference.lambda).norm_squared())
    .sqrt();
    let kkt = p
        .saddle_kkt_residual(&quad)
        .unwrap()
        .max(p.saddle_kkt_residual(&reference).unwrap());
    let z = PhaseState::at_rest(quad.x.clone(), quad.y.clone(), quad.lambda.clone());
    let mut field_max: f64 = 0.0;
    let schedules: [Schedule; 3] = [
        make_constant_alpha(1.0, 1.1, 1.0, 1.0).unwrap(),
        make_linear_alpha(0.5, 1.1, 1.0, 1.0).unwrap(),
        make_power_alpha(0.5, 1.1, 1.0, 1.0).unwrap(),
    ];
    for s in schedules {
        let fs = FieldSpec::new(p.clone(), s).unwrap();
        for t in [1.0, 2.5, 7.0] {
            let dz = vector_field(&fs, t, &z).unwrap();
            field_max = dz.to_flat().iter().fold(field_max, |m, v| m.max(v.abs()));
        }
    }
    verdict(
        9,
        "oracle equivalence",
        distance <= 1e-8 && kkt <= 1e-8 && field_max <= 1e-10,
        &format!("oracle distance {distance:.2e}, KKT residual {kkt:.2e}, field at saddle {field_max:.2e}"),
    );
}

#[test]
fn criterion_10_smoothing_properties() {
    let mut rng = StdRng::seed_from_u64(10);
    let l1 = std::sync::Arc::new(QuadraticL1::l1(3, 1.5).unwrap());
    let mut violations = Vec::new();
    let mut worst_lipschitz: f64 = 0.0;
    for theta in [1e-1, 1e-2, 1e-3] {
        let m = MoreauBlock::new(l1.clone(), theta).unwrap();
        for k in 0..100 {
            let x = random_vector(&mut rng, 3, 2.0);
            // half of the partners land within a few θ, where the envelope curves
            let spread = if k % 2 == 0 { 3.0 * theta } else { 2.0 };
            let y = &x + random_vector(&mut rng, 3, spread);
            let (fx, env) = (l1.value(&x), moreau_value(&m, &x));
            let s = l1.subgradient(&x);
            let slack = 1e-12 * (1.0 + fx.abs());
            if env > fx + slack {
                violations.push(format!("minorization θ={theta}"));
            }
            if env < fx - 0.5 * theta * s.norm_squared() - slack {
                violations.push(format!("sandwich θ={theta}"));
            }
            let ratio = (moreau_grad(&m, &x) - moreau_grad(&m, &y)).norm() * theta / (&x - &y).norm();
            worst_lipschitz = worst_lipschitz.max(ratio);
            if ratio > 1.0 + 1e-12 {
                violations.push(format!("Lipschitz θ={theta}"));
            }
        }
    }
    verdict(
        10,
        "smoothing properties",
        violations.is_empty(),
        &format!("300 samples, max θ·‖Δ∇f_θ‖/‖Δx‖ {worst_lipschitz:.6}, violations {violations:?}"),
    );
}

/// `s̈ + γ₀ṡ = 0` as a first-order system.
struct Damped(f64);

impl OdeSystem for Damped {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> trials_core::Result<()> {
        dy[0] = y[1];
        dy[1] = -self.0 * y[1];
        Ok(())
    }
}

#[test]
fn criterion_11_integrator_order() {
    let (s0, v0, g, t0) = (0.5, 1.0, 2.0, 1.0);
    let exact = |t: f64| [s0 + v0 / g * (1.0 - (-g * (t - t0)).exp()), v0 * (-g * (t - t0)).exp()];
    let grid: Vec<f64> = (0..=40).map(|k| 1.0 + 0.1 * k as f64).collect();
    let tols = [1e-6, 1e-8, 1e-10];
    let errors: Vec<f64> = tols
        .iter()
        .map(|&tol| {
            let cfg = IntegratorConfig::with_tolerances(tol, tol);
            let sol = integrate_system(&Damped(g), t0, 5.0, &[s0, v0], &cfg, &grid).unwrap();
            sol.times
                .iter()
                .zip(&sol.states)
                .map(|(&t, s)| {
                    let e = exact(t);
                    (s[0] - e[0]).abs().max((s[1] - e[1]).abs())
                })
                .fold(0.0, f64::max)
        })
        .collect();
    // one decade of error per decade of tolerance, give or take a factor of 3
    let ok = errors
        .windows(2)
        .zip(tols.windows(2))
        .all(|(e, t)| e[1] < e[0] && e[1] <= 3.0 * e[0] * (t[1] / t[0]));
    verdict(
        11,
        "integrator order",
        ok,
        &format!(
            "tol {tols:?} → max error {:?}",
            errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()
        ),
    );
}
