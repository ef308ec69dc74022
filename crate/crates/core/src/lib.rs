//! Continuous-time inertial dynamics for linearly constrained convex
//! minimization
//!
//! ```text
//! min f(x) + g(y)   subject to   Ax + By = c
//! ```
//!
//! driven by the augmented Lagrangian with viscous damping `γ(t)`,
//! extrapolation `α(t)` and time scaling `b(t)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`problem`]: problem instances, (augmented) Lagrangians, KKT oracles.
//! * [`schedules`]: coefficient schedules and the Lyapunov conditions on them.
//! * [`smoothing`]: Moreau envelopes for non-smooth blocks.
//! * [`dynamics`]: the phase-space vector field.
//! * [`integrator`]: adaptive Dormand–Prince 5(4) with dense output.
//! * [`lyapunov`]: energy, per-sample diagnostics and rate fits.

// `!(a <= b)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod lyapunov;
pub mod problem;
pub mod schedules;
pub mod smoothing;

pub use dynamics::{vector_field, FieldSpec, PhaseState};
pub use error::{Error, Result};
pub use integrator::{integrate, log_grid, IntegratorConfig, Trajectory};
pub use lyapunov::{diagnostics, energy, fit_rate, DiagnosticsRow, Quantity, RateFit, RateModel};
pub use problem::{Block, ProblemSpec, SaddlePoint};
pub use schedules::{check_conditions, ConditionReport, Family, Schedule};
pub use smoothing::{smooth_problem, MoreauBlock};

/// Dense column vector used throughout.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix used for the linear constraint maps.
pub type Matrix = nalgebra::DMatrix<f64>;
