//! Dormand–Prince 5(4) with PI step-size control and the pair's 4th-order
//! continuous extension, evaluated exactly at caller-chosen output times.

use std::fmt;

use crate::dynamics::{FieldSpec, PhaseState};
use crate::error::{Error, Result};

/// A first-order system `ẏ = F(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_init: None,
            h_min: 1e-13,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.rtol > 0.0
            && self.atol > 0.0
            && self.h_min > 0.0
            && self.h_min <= self.h_max
            && self.max_steps > 0
            && self.h_init.is_none_or(|h| h > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "invalid integrator configuration {self:?}"
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest scaled error norm among accepted steps (≤ 1 by construction).
    pub max_error_estimate: f64,
}

/// Flat-state solution of an [`OdeSystem`] on an output grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: StepStats,
}

/// Phase-space trajectory of a [`FieldSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub stats: StepStats,
}

impl Trajectory {
    fn from_solution(fs: &FieldSpec, sol: Solution) -> Result<Self> {
        let states = sol
            .states
            .iter()
            .map(|s| PhaseState::from_flat(&fs.problem, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            times: sol.times,
            states,
            stats: sol.stats,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegrationErrorKind {
    /// The controller asked for a step below `h_min`.
    StepUnderflow,
    /// `max_steps` accepted + rejected steps were used up.
    Budget,
    /// The state or the error estimate became non-finite.
    Divergence,
}

/// Integration failure. `partial` holds every output sample reached before
/// the failure, so callers can still analyse the integrable range.
#[derive(Clone, Debug)]
pub struct IntegrationError {
    pub kind: IntegrationErrorKind,
    /// Time at which the failure was detected.
    pub t: f64,
    /// Last time with a finite, accepted state.
    pub last_good_t: f64,
    pub partial: Solution,
    pub partial_trajectory: Option<Trajectory>,
}

impl fmt::Display for IntegrationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            IntegrationErrorKind::StepUnderflow => {
                write!(f, "step size underflow (stiffness) at t = {}", self.t)
            }
            IntegrationErrorKind::Budget => write!(
                f,
                "step budget exhausted at t = {} after {} steps",
                self.t,
                self.partial.stats.accepted + self.partial.stats.rejected
            ),
            IntegrationErrorKind::Divergence => {
                write!(f, "non-finite state; last good time t = {}", self.last_good_t)
            }
        }
    }
}

impl std::error::Error for IntegrationError {}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

// 5th-order solution minus embedded 4th-order solution
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

/// Continuous extension over one accepted step `[t_old, t_old + h]`.
#[derive(Clone, Debug)]
pub struct DenseSegment {
    pub t_old: f64,
    pub h: f64,
    pub y_new: Vec<f64>,
    cont: [Vec<f64>; 5],
}

impl DenseSegment {
    pub fn t_new(&self) -> f64 {
        self.t_old + self.h
    }

    pub fn interpolate(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t_old) / self.h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.cont;
        for i in 0..out.len() {
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
    }
}

fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], cfg: &IntegratorConfig) -> f64 {
    let n = y.len().max(1) as f64;
    let sum: f64 = y
        .iter()
        .zip(y_new)
        .zip(err)
        .map(|((a, b), e)| {
            let sc = cfg.atol + cfg.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

fn initial_step(sys: &dyn OdeSystem, t: f64, y: &[f64], f0: &[f64], cfg: &IntegratorConfig, span: f64) -> Result<f64> {
    let sk: Vec<f64> = y.iter().map(|v| cfg.atol + cfg.rtol * v.abs()).collect();
    let dnf: f64 = f0.iter().zip(&sk).map(|(f, s)| (f / s).powi(2)).sum();
    let dny: f64 = y.iter().zip(&sk).map(|(v, s)| (v / s).powi(2)).sum();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(cfg.h_max).min(span);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(v, f)| v + h * f).collect();
    let mut f1 = vec![0.0; y.len()];
    sys.rhs(t + h, &y1, &mut f1)?;
    let der2 = f1
        .iter()
        .zip(f0)
        .zip(&sk)
        .map(|((a, b), s)| ((a - b) / s).powi(2))
        .sum::<f64>()
        .sqrt()
        / h;
    let der12 = der2.abs().max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    Ok((100.0 * h).min(h1).min(cfg.h_max).min(span).max(cfg.h_min))
}

fn prepare_grid(t_start: f64, t_end: f64, grid: &[f64]) -> Result<Vec<f64>> {
    if !(t_end > t_start) || !t_start.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "integration interval [{t_start}, {t_end}] is empty or not finite"
        )));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(
            "output grid must be strictly increasing".into(),
        ));
    }
    if grid.iter().any(|&t| t < t_start || t > t_end) {
        return Err(Error::InvalidParameter(format!(
            "output grid leaves the integration interval [{t_start}, {t_end}]"
        )));
    }
    let mut out = Vec::with_capacity(grid.len() + 2);
    if grid.first() != Some(&t_start) {
        out.push(t_start);
    }
    out.extend_from_slice(grid);
    if out.last() != Some(&t_end) {
        out.push(t_end);
    }
    Ok(out)
}

/// Integrates `sys` from `(t_start, y0)` to `t_end`, sampling at `grid`
/// (endpoints are added when missing).
pub fn integrate_system(
    sys: &dyn OdeSystem,
    t_start: f64,
    t_end: f64,
    y0: &[f64],
    cfg: &IntegratorConfig,
    grid: &[f64],
) -> Result<Solution> {
    integrate_with_observer(sys, t_start, t_end, y0, cfg, grid, &mut |_| {})
}

/// As [`integrate_system`], calling `observer` on every accepted step.
pub fn integrate_with_observer(
    sys: &dyn OdeSystem,
    t_start: f64,
    t_end: f64,
    y0: &[f64],
    cfg: &IntegratorConfig,
    grid: &[f64],
    observer: &mut dyn FnMut(&DenseSegment),
) -> Result<Solution> {
    cfg.validate()?;
    let n = sys.dim();
    crate::error::check_dim("initial state", n, y0.len())?;
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial state".into()));
    }
    let grid = prepare_grid(t_start, t_end, grid)?;

    let mut sol = Solution {
        times: Vec::with_capacity(grid.len()),
        states: Vec::with_capacity(grid.len()),
        stats: StepStats::default(),
    };
    let mut next_out = 0;
    // grid[0] == t_start
    sol.times.push(grid[0]);
    sol.states.push(y0.to_vec());
    next_out += 1;

    let mut t = t_start;
    let mut y = y0.to_vec();
    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    let mut y_stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];

    sys.rhs(t, &y, &mut k[0])?;
    sol.stats.evaluations += 1;
    let mut h = match cfg.h_init {
        Some(h) => h.min(t_end - t),
        None => {
            sol.stats.evaluations += 1;
            initial_step(sys, t, &y, &k[0], cfg, t_end - t)?
        }
    };
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;

    let fail = |kind, t_fail: f64, last_good: f64, sol: Solution| -> Error {
        Error::Integration(Box::new(IntegrationError {
            kind,
            t: t_fail,
            last_good_t: last_good,
            partial: sol,
            partial_trajectory: None,
        }))
    };

    while t < t_end {
        if sol.stats.accepted + sol.stats.rejected >= cfg.max_steps {
            return Err(fail(IntegrationErrorKind::Budget, t, t, sol));
        }
        h = h.min(cfg.h_max);
        let remaining = t_end - t;
        let last = h >= remaining * (1.0 - 1e-12) || t + 1.01 * h >= t_end;
        if last {
            h = remaining;
        }
        if h < cfg.h_min && !last {
            return Err(fail(IntegrationErrorKind::StepUnderflow, t, t, sol));
        }

        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            let (before, after) = k.split_at_mut(s);
            let _ = before;
            if s == 6 {
                y_new.copy_from_slice(&y_stage);
            }
            sys.rhs(t + C[s] * h, &y_stage, &mut after[0])?;
        }
        sol.stats.evaluations += 6;

        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..7 {
                acc += E[j] * k[j][i];
            }
            err[i] = h * acc;
        }
        let err_norm = error_norm(&y, &y_new, &err, cfg);

        if !err_norm.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            sol.stats.rejected += 1;
            h *= 0.1;
            last_rejected = true;
            if h < cfg.h_min {
                return Err(fail(IntegrationErrorKind::Divergence, t, t, sol));
            }
            continue;
        }

        let fac11 = err_norm.powf(0.2 - BETA * 0.75);
        if err_norm <= 1.0 {
            let mut fac = fac11 / facold.powf(BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_next = h / fac;
            facold = err_norm.max(1e-4);

            let t_new = if last { t_end } else { t + h };
            let segment = dense_segment(t, h, &y, &y_new, &k);
            observer(&segment);

            while next_out < grid.len() && grid[next_out] <= t_new {
                let t_out = grid[next_out];
                let state = if t_out == t_new {
                    y_new.clone()
                } else {
                    let mut s = vec![0.0; n];
                    segment.interpolate(t_out, &mut s);
                    s
                };
                sol.times.push(t_out);
                sol.states.push(state);
                next_out += 1;
            }

            sol.stats.accepted += 1;
            sol.stats.max_error_estimate = sol.stats.max_error_estimate.max(err_norm);
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);

            if last_rejected {
                h_next = h_next.min(h);
            }
            last_rejected = false;
            h = h_next;
        } else {
            sol.stats.rejected += 1;
            h /= (1.0 / FAC_MIN).min(fac11 / SAFETY);
            last_rejected = true;
        }
    }
    Ok(sol)
}

fn dense_segment(t: f64, h: f64, y: &[f64], y_new: &[f64], k: &[Vec<f64>; 7]) -> DenseSegment {
    let n = y.len();
    let mut cont: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    for i in 0..n {
        let ydiff = y_new[i] - y[i];
        let bspl = h * k[0][i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k[6][i] - bspl;
        let mut acc = 0.0;
        for j in 0..7 {
            acc += D[j] * k[j][i];
        }
        cont[4][i] = h * acc;
    }
    DenseSegment {
        t_old: t,
        h,
        y_new: y_new.to_vec(),
        cont,
    }
}

/// Integrates the phase-space dynamics of `fs` from `z0` at `t_start`.
pub fn integrate(
    fs: &FieldSpec,
    t_start: f64,
    t_end: f64,
    z0: &PhaseState,
    cfg: &IntegratorConfig,
    output_grid: &[f64],
) -> Result<Trajectory> {
    if t_start < fs.schedule.t0() {
        return Err(Error::InvalidParameter(format!(
            "integration starts at {t_start}, before the schedule origin {}",
            fs.schedule.t0()
        )));
    }
    z0.check_dims(&fs.problem)?;
    match integrate_system(fs, t_start, t_end, &z0.to_flat(), cfg, output_grid) {
        Ok(sol) => Trajectory::from_solution(fs, sol),
        Err(Error::Integration(mut e)) => {
            e.partial_trajectory = Some(Trajectory::from_solution(fs, e.partial.clone())?);
            Err(Error::Integration(e))
        }
        Err(e) => Err(e),
    }
}

/// `n` log-spaced points from `t_start` to `t_end`, endpoints included.
pub fn log_grid(t_start: f64, t_end: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_start > 0.0 && t_end > t_start && t_end.is_finite()) || n < 2 {
        return Err(Error::InvalidParameter(format!(
            "log grid needs 0 < t_start < t_end and n ≥ 2 (got {t_start}, {t_end}, {n})"
        )));
    }
    let ratio = (t_end / t_start).ln();
    let mut grid: Vec<f64> = (0..n)
        .map(|i| t_start * (ratio * i as f64 / (n - 1) as f64).exp())
        .collect();
    grid[0] = t_start;
    grid[n - 1] = t_end;
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(format!(
            "{n} points do not fit strictly increasing in [{t_start}, {t_end}]"
        )));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `s̈ + γ₀ṡ = 0` as a first-order system.
    struct Damped(f64);

    impl OdeSystem for Damped {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = y[1];
            dy[1] = -self.0 * y[1];
            Ok(())
        }
    }

    struct Zero;

    impl OdeSystem for Zero {
        fn dim(&self) -> usize {
            3
        }
        fn rhs(&self, _t: f64, _y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy.fill(0.0);
            Ok(())
        }
    }

    /// `ẏ = y²` blows up at `t = 1` from `y(0) = 1`.
    struct BlowUp;

    impl OdeSystem for BlowUp {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = y[0] * y[0];
            Ok(())
        }
    }

    fn damped_exact(t: f64) -> f64 {
        let (s0, v0, g, t0) = (0.5, 1.0, 2.0, 1.0);
        s0 + v0 / g * (1.0 - (-g * (t - t0)).exp())
    }

    #[test]
    fn log_grid_examples() {
        let g = log_grid(1.0, 100.0, 3).unwrap();
        assert_eq!(g[0], 1.0);
        assert!((g[1] - 10.0).abs() < 1e-13);
        assert_eq!(g[2], 100.0);
        assert_eq!(log_grid(1.0, 20.0, 2).unwrap(), vec![1.0, 20.0]);
        assert!(log_grid(0.0, 1.0, 10).is_err());
        assert!(log_grid(2.0, 1.0, 10).is_err());
        assert!(log_grid(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn zero_field_keeps_state_constant() {
        let y0 = [1.0, -2.0, 3.5];
        let grid = log_grid(1.0, 20.0, 50).unwrap();
        let sol = integrate_system(&Zero, 1.0, 20.0, &y0, &IntegratorConfig::default(), &grid).unwrap();
        assert_eq!(sol.times.len(), 50);
        assert!(sol.states.iter().all(|s| s == &y0));
    }

    #[test]
    fn damped_linear_ode_matches_closed_form() {
        let grid = [1.0, 2.0, 5.0];
        let sol = integrate_system(&Damped(2.0), 1.0, 5.0, &[0.5, 1.0], &IntegratorConfig::default(), &grid).unwrap();
        for (t, s) in sol.times.iter().zip(&sol.states) {
            assert!((s[0] - damped_exact(*t)).abs() <= 1e-7, "t={t}");
        }
        assert_eq!(*sol.times.last().unwrap(), 5.0);
        assert!(sol.stats.max_error_estimate <= 1.0);
    }

    #[test]
    fn interior_output_uses_dense_interpolant() {
        let grid: Vec<f64> = (0..41).map(|i| 1.0 + 0.1 * i as f64).collect();
        let cfg = IntegratorConfig::with_tolerances(1e-10, 1e-12);
        let sol = integrate_system(&Damped(2.0), 1.0, 5.0, &[0.5, 1.0], &cfg, &grid).unwrap();
        let bare = integrate_system(&Damped(2.0), 1.0, 5.0, &[0.5, 1.0], &cfg, &[]).unwrap();
        assert_eq!(sol.stats, bare.stats, "outputs should not force steps");
        for (t, s) in sol.times.iter().zip(&sol.states) {
            assert!((s[0] - damped_exact(*t)).abs() <= 1e-8, "t={t}");
        }
    }

    #[test]
    fn dense_output_reproduces_step_endpoints() {
        let mut worst: f64 = 0.0;
        let mut observer = |seg: &DenseSegment| {
            let mut out = vec![0.0; 2];
            seg.interpolate(seg.t_new(), &mut out);
            for (a, b) in out.iter().zip(&seg.y_new) {
                worst = worst.max((a - b).abs() / b.abs().max(1e-300));
            }
            seg.interpolate(seg.t_old, &mut out);
            assert_eq!(out, seg.cont[0]);
        };
        integrate_with_observer(
            &Damped(2.0),
            1.0,
            8.0,
            &[0.5, 1.0],
            &IntegratorConfig::default(),
            &[],
            &mut observer,
        )
        .unwrap();
        assert!(worst <= 1e-13, "worst relative mismatch {worst:e}");
    }

    #[test]
    fn bitwise_deterministic() {
        let grid = log_grid(1.0, 5.0, 30).unwrap();
        let run =
            || integrate_system(&Damped(2.0), 1.0, 5.0, &[0.5, 1.0], &IntegratorConfig::default(), &grid).unwrap();
        assert_eq!(run(), run());
    }

    #[test]
    fn blow_up_is_reported_with_partial_output() {
        let grid = [0.0, 0.5, 0.9, 0.99, 2.0];
        let cfg = IntegratorConfig {
            max_steps: 100_000,
            ..IntegratorConfig::default()
        };
        let err = integrate_system(&BlowUp, 0.0, 2.0, &[1.0], &cfg, &grid).unwrap_err();
        let Error::Integration(e) = err else {
            panic!("expected an integration error, got {err:?}")
        };
        assert!(e.t < 1.001 && e.t > 0.99, "{e}");
        assert_eq!(e.partial.times, vec![0.0, 0.5, 0.9, 0.99]);
        assert!((e.partial.states[1][0] - 2.0).abs() < 1e-7);
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = IntegratorConfig {
            max_steps: 3,
            ..IntegratorConfig::default()
        };
        let err = integrate_system(&Damped(2.0), 1.0, 50.0, &[0.5, 1.0], &cfg, &[]).unwrap_err();
        assert!(matches!(err, Error::Integration(e) if e.kind == IntegrationErrorKind::Budget));
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = IntegratorConfig::default();
        assert!(integrate_system(&Damped(1.0), 1.0, 1.0, &[0.0, 0.0], &cfg, &[]).is_err());
        assert!(integrate_system(&Damped(1.0), 1.0, 2.0, &[0.0], &cfg, &[]).is_err());
        assert!(integrate_system(&Damped(1.0), 1.0, 2.0, &[0.0, 0.0], &cfg, &[3.0]).is_err());
        assert!(integrate_system(&Damped(1.0), 1.0, 2.0, &[0.0, 0.0], &cfg, &[1.5, 1.2]).is_err());
        let bad = IntegratorConfig {
            h_min: 1.0,
            h_max: 0.5,
            ..cfg
        };
        assert!(integrate_system(&Damped(1.0), 1.0, 2.0, &[0.0, 0.0], &bad, &[]).is_err());
    }
}
