//! Lyapunov energy along trajectories, per-sample diagnostics and empirical
//! convergence-rate fits.
//!
//! With `w = (x, y, λ)`, `δ = σα` and `ξ = σ²(γα − α̇ − 1) − 2ασσ̇`,
//!
//! ```text
//! ℰ(t) = δ²b [ℒ_μ(x, y, λ*) − ℒ_μ(x*, y*, λ*)] + ½‖σ(w − w*) + δẇ‖² + ½ξ‖w − w*‖²
//! ```

use std::fmt;

use crate::dynamics::{FieldSpec, PhaseState};
use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::problem::SaddlePoint;
use crate::schedules::Schedule;
use crate::Vector;

/// Values at or below this are dropped from log-domain fits.
pub const FIT_FLOOR: f64 = 1e-15;

/// Minimum number of usable samples in a fit window.
pub const MIN_FIT_SAMPLES: usize = 10;

/// One row of per-time diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub energy: f64,
    pub v_norm: f64,
    /// `ℒ(x, y, λ*) − ℒ(x*, y*, λ*)`.
    pub lagrangian_gap: f64,
    /// `‖Ax + By − c‖`.
    pub feasibility: f64,
    /// `F(x, y) − F*`.
    pub objective_error: f64,
    pub velocity_norm: f64,
    /// `‖(x, y, λ) − (x*, y*, λ*)‖`.
    pub distance_to_saddle: f64,
    /// `‖(x, y) − (x*, y*)‖`; not part of the CSV schema.
    pub primal_distance: f64,
    pub predicted: f64,
}

/// Per-time quantities available to [`fit_rate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantity {
    Energy,
    VNorm,
    LagrangianGap,
    Feasibility,
    FeasibilitySquared,
    /// `|F(x, y) − F*|`.
    ObjectiveError,
    VelocityNorm,
    DistanceToSaddle,
    PrimalDistanceSquared,
    Predicted,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Energy => "energy",
            Quantity::VNorm => "v_norm",
            Quantity::LagrangianGap => "lagrangian_gap",
            Quantity::Feasibility => "feasibility",
            Quantity::FeasibilitySquared => "feasibility_squared",
            Quantity::ObjectiveError => "objective_error",
            Quantity::VelocityNorm => "velocity_norm",
            Quantity::DistanceToSaddle => "distance_to_saddle",
            Quantity::PrimalDistanceSquared => "primal_distance_squared",
            Quantity::Predicted => "predicted",
        }
    }

    pub fn of(self, row: &DiagnosticsRow) -> f64 {
        match self {
            Quantity::Energy => row.energy,
            Quantity::VNorm => row.v_norm,
            Quantity::LagrangianGap => row.lagrangian_gap,
            Quantity::Feasibility => row.feasibility,
            Quantity::FeasibilitySquared => row.feasibility * row.feasibility,
            Quantity::ObjectiveError => row.objective_error.abs(),
            Quantity::VelocityNorm => row.velocity_norm,
            Quantity::DistanceToSaddle => row.distance_to_saddle,
            Quantity::PrimalDistanceSquared => row.primal_distance * row.primal_distance,
            Quantity::Predicted => row.predicted,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Abscissa of a log-linear fit.
#[derive(Clone, Copy)]
pub enum RateModel<'a> {
    /// `log value` against `log t`.
    Power,
    /// `log value` against `τ(t)`, typically `∫_{t₀}^t ds/α(s)`.
    Exponential(&'a dyn Fn(f64) -> f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Power,
    Exponential,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Power => "power",
            ModelKind::Exponential => "exponential",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub quantity: Quantity,
    pub model: ModelKind,
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub window: (f64, f64),
    pub samples: usize,
    /// Samples in the window dropped for being at or below [`FIT_FLOOR`].
    pub clipped: usize,
}

fn stacked_offset(sp: &SaddlePoint, z: &PhaseState) -> (Vector, Vector) {
    let n = sp.x.len() + sp.y.len() + sp.lambda.len();
    let mut dw = Vector::zeros(n);
    let mut dwdt = Vector::zeros(n);
    let (nx, ny, nz) = (sp.x.len(), sp.y.len(), sp.lambda.len());
    dw.rows_mut(0, nx).copy_from(&(&z.x - &sp.x));
    dw.rows_mut(nx, ny).copy_from(&(&z.y - &sp.y));
    dw.rows_mut(nx + ny, nz).copy_from(&(&z.lambda - &sp.lambda));
    dwdt.rows_mut(0, nx).copy_from(&z.u);
    dwdt.rows_mut(nx, ny).copy_from(&z.v);
    dwdt.rows_mut(nx + ny, nz).copy_from(&z.nu);
    (dw, dwdt)
}

struct EnergyParts {
    energy: f64,
    v_norm: f64,
    lagrangian_gap: f64,
    feasibility: f64,
    objective_error: f64,
    distance: f64,
    primal_distance: f64,
}

fn energy_parts(fs: &FieldSpec, sp: &SaddlePoint, t: f64, z: &PhaseState) -> Result<EnergyParts> {
    z.check_dims(&fs.problem)?;
    let s = &fs.schedule;
    let xi = s.xi(t);
    if xi < -1e-12 {
        return Err(Error::Contract(format!(
            "ξ({t}) = {xi:e} < 0: the schedule violates G1, so the energy is not a Lyapunov function"
        )));
    }
    let p = &fs.problem;
    let r = p.residual(&z.x, &z.y)?;
    let objective_error = p.objective(&z.x, &z.y)? - sp.f_star;
    let lagrangian_gap = objective_error + sp.lambda.dot(&r);
    let feasibility = r.norm();
    let aug_gap = lagrangian_gap + 0.5 * p.mu * feasibility * feasibility;

    let delta = s.delta(t);
    let (dw, dwdt) = stacked_offset(sp, z);
    let v = &dw * s.sigma(t) + &dwdt * delta;
    let weight = if aug_gap == 0.0 { 0.0 } else { delta * delta * s.b(t) };
    let energy = weight * aug_gap + 0.5 * v.norm_squared() + 0.5 * xi * dw.norm_squared();

    let primal = (z.x.len() + z.y.len()).min(dw.len());
    Ok(EnergyParts {
        energy,
        v_norm: v.norm(),
        lagrangian_gap,
        feasibility,
        objective_error,
        distance: dw.norm(),
        primal_distance: dw.rows(0, primal).norm(),
    })
}

/// `ℰ(t)` at state `z`.
pub fn energy(fs: &FieldSpec, sp: &SaddlePoint, t: f64, z: &PhaseState) -> Result<f64> {
    Ok(energy_parts(fs, sp, t, z)?.energy)
}

/// One [`DiagnosticsRow`] per trajectory sample.
pub fn diagnostics(fs: &FieldSpec, sp: &SaddlePoint, traj: &Trajectory) -> Result<Vec<DiagnosticsRow>> {
    let residual = fs.problem.saddle_kkt_residual(sp)?;
    if !(residual <= 1e-8) {
        return Err(Error::Contract(format!(
            "saddle point KKT residual {residual:e} exceeds 1e-8"
        )));
    }
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, z)| {
            let parts = energy_parts(fs, sp, t, z)?;
            Ok(DiagnosticsRow {
                t,
                energy: parts.energy,
                v_norm: parts.v_norm,
                lagrangian_gap: parts.lagrangian_gap,
                feasibility: parts.feasibility,
                objective_error: parts.objective_error,
                velocity_norm: z.velocity_norm(),
                distance_to_saddle: parts.distance,
                primal_distance: parts.primal_distance,
                predicted: fs.schedule.predicted_rate(t),
            })
        })
        .collect()
}

/// Least-squares fit of `log quantity` against the model abscissa over rows
/// with `t` in `window` (inclusive).
pub fn fit_rate(
    rows: &[DiagnosticsRow],
    quantity: Quantity,
    model: RateModel<'_>,
    window: (f64, f64),
) -> Result<RateFit> {
    let mut clipped = 0;
    let mut pts = Vec::new();
    for row in rows.iter().filter(|r| r.t >= window.0 && r.t <= window.1) {
        let value = quantity.of(row);
        if !(value > FIT_FLOOR) || !value.is_finite() {
            clipped += 1;
            continue;
        }
        let abscissa = match model {
            RateModel::Power => row.t.ln(),
            RateModel::Exponential(tau) => tau(row.t),
        };
        pts.push((abscissa, value.ln()));
    }
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!(
            "{quantity}: {} usable samples in [{}, {}] ({clipped} clipped), need {MIN_FIT_SAMPLES}",
            pts.len(),
            window.0,
            window.1
        )));
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit(format!("{quantity}: abscissa is constant over the window")));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual_rms = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(RateFit {
        quantity,
        model: match model {
            RateModel::Power => ModelKind::Power,
            RateModel::Exponential(_) => ModelKind::Exponential,
        },
        slope,
        intercept,
        residual_rms,
        window,
        samples: pts.len(),
        clipped,
    })
}

/// `max_t ‖ẇ(t)‖·α(t)·σ(t)` over the rows.
pub fn velocity_bound_check(rows: &[DiagnosticsRow], schedule: &Schedule) -> f64 {
    rows.iter().map(|r| scaled_velocity(r, schedule)).fold(0.0, f64::max)
}

fn scaled_velocity(r: &DiagnosticsRow, schedule: &Schedule) -> f64 {
    r.velocity_norm * schedule.alpha(r.t) * schedule.sigma(r.t)
}

/// Ratio of the overall maximum of `‖ẇ‖ασ` to its maximum over the first
/// quarter of the samples. `None` when the early maximum is zero.
pub fn velocity_growth_ratio(rows: &[DiagnosticsRow], schedule: &Schedule) -> Option<f64> {
    let early = early_window_len(rows.len());
    let early_max = velocity_bound_check(&rows[..early], schedule);
    (early_max > 0.0).then(|| velocity_bound_check(rows, schedule) / early_max)
}

/// Number of samples in the reference (transient) window: the first 25%.
pub fn early_window_len(n: usize) -> usize {
    n.div_ceil(4).max(1).min(n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityReport {
    /// Largest `ℰ(t_{k+1}) − ℰ(t_k)(1 + rel)`.
    pub max_excess: f64,
    pub at_t: f64,
    pub passed: bool,
}

/// Checks `ℰ(t_{k+1}) ≤ ℰ(t_k)(1 + rel) + abs` on consecutive rows.
pub fn energy_monotonicity(rows: &[DiagnosticsRow], rel: f64, abs: f64) -> MonotonicityReport {
    let mut report = MonotonicityReport {
        max_excess: f64::NEG_INFINITY,
        at_t: rows.first().map_or(f64::NAN, |r| r.t),
        passed: true,
    };
    for w in rows.windows(2) {
        let excess = w[1].energy - w[0].energy * (1.0 + rel);
        if excess > report.max_excess {
            report.max_excess = excess;
            report.at_t = w[1].t;
        }
        if !(excess <= abs) {
            report.passed = false;
        }
    }
    report
}

/// Largest `−‖λ*‖·feasibility − objective_error` over the rows; the objective
/// lower bound `F − F* ≥ −‖λ*‖‖Ax + By − c‖` holds when this is `≤ 0`.
pub fn objective_lower_bound_violation(rows: &[DiagnosticsRow], lambda_star_norm: f64) -> f64 {
    rows.iter()
        .map(|r| -lambda_star_norm * r.feasibility - r.objective_error)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Empirical constants of the two-sided objective bound
/// `−C₁√rate ≤ F − F* ≤ C₂·rate`, with `rate` the normalized predicted rate.
pub fn objective_bound_constants(rows: &[DiagnosticsRow]) -> (f64, f64) {
    rows.iter().fold((0.0_f64, 0.0_f64), |(c1, c2), r| {
        (
            c1.max(-r.objective_error / r.predicted.sqrt()),
            c2.max(r.objective_error / r.predicted),
        )
    })
}

/// Trapezoid rule of `integrand(row)` over rows with `t` in `window`.
pub fn trapezoid(rows: &[DiagnosticsRow], window: (f64, f64), integrand: impl Fn(&DiagnosticsRow) -> f64) -> f64 {
    let inside: Vec<&DiagnosticsRow> = rows.iter().filter(|r| r.t >= window.0 && r.t <= window.1).collect();
    inside
        .windows(2)
        .map(|w| 0.5 * (w[1].t - w[0].t) * (integrand(w[0]) + integrand(w[1])))
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub enum StrongConvergence {
    /// The primal trajectory sits on the solution; nothing to fit.
    Degenerate,
    Fit(RateFit),
}

/// Fits the decay of `‖(x, y) − (x*, y*)‖²`. Requires a strongly convex
/// objective (`modulus > 0`).
pub fn strong_convergence_check(
    rows: &[DiagnosticsRow],
    modulus: Option<f64>,
    model: RateModel<'_>,
    window: (f64, f64),
) -> Result<StrongConvergence> {
    match modulus {
        Some(m) if m > 0.0 => {}
        _ => {
            return Err(Error::Contract(
                "trajectory convergence check needs a strongly convex objective".into(),
            ))
        }
    }
    if rows.iter().all(|r| r.primal_distance <= FIT_FLOOR) {
        return Ok(StrongConvergence::Degenerate);
    }
    fit_rate(rows, Quantity::PrimalDistanceSquared, model, window).map(StrongConvergence::Fit)
}
