//! Phase-space vector field of the inertial augmented-Lagrangian dynamics
//!
//! ```text
//! ẍ + γẋ + b[∇f(x) + Aᵀ(λ + αλ̇ + μ(Ax + By − c))]   = 0
//! ÿ + γẏ + b[∇g(y) + Bᵀ(λ + αλ̇ + μ(Ax + By − c))]   = 0
//! λ̈ + γλ̇ − b[A(x + αẋ) + B(y + αẏ) − c]             = 0
//! ```
//!
//! Primal gradients see the extrapolated multiplier only; the multiplier
//! equation sees the extrapolated primals only.

use crate::error::{check_dim, Error, Result};
use crate::integrator::OdeSystem;
use crate::problem::{ProblemSpec, SmoothFunction};
use crate::schedules::Schedule;
use crate::{Matrix, Vector};

/// Positions `(x, y, λ)` and velocities `(u, v, ν) = (ẋ, ẏ, λ̇)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseState {
    pub x: Vector,
    pub y: Vector,
    pub lambda: Vector,
    pub u: Vector,
    pub v: Vector,
    pub nu: Vector,
}

impl PhaseState {
    pub fn zeros(p: &ProblemSpec) -> Self {
        let (nx, ny, nz) = (p.dim_x(), p.dim_y(), p.dim_z());
        Self {
            x: Vector::zeros(nx),
            y: Vector::zeros(ny),
            lambda: Vector::zeros(nz),
            u: Vector::zeros(nx),
            v: Vector::zeros(ny),
            nu: Vector::zeros(nz),
        }
    }

    /// Positions at rest.
    pub fn at_rest(x: Vector, y: Vector, lambda: Vector) -> Self {
        let (u, v, nu) = (
            Vector::zeros(x.len()),
            Vector::zeros(y.len()),
            Vector::zeros(lambda.len()),
        );
        Self { x, y, lambda, u, v, nu }
    }

    pub fn len(&self) -> usize {
        2 * (self.x.len() + self.y.len() + self.lambda.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn blocks(&self) -> [&Vector; 6] {
        [&self.x, &self.y, &self.lambda, &self.u, &self.v, &self.nu]
    }

    /// Concatenation `[x, y, λ, u, v, ν]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for b in self.blocks() {
            out.extend_from_slice(b.as_slice());
        }
        out
    }

    pub fn from_flat(p: &ProblemSpec, flat: &[f64]) -> Result<Self> {
        let (nx, ny, nz) = (p.dim_x(), p.dim_y(), p.dim_z());
        check_dim("phase state", 2 * (nx + ny + nz), flat.len())?;
        let mut offset = 0;
        let mut take = |n: usize| {
            let v = Vector::from_column_slice(&flat[offset..offset + n]);
            offset += n;
            v
        };
        Ok(Self {
            x: take(nx),
            y: take(ny),
            lambda: take(nz),
            u: take(nx),
            v: take(ny),
            nu: take(nz),
        })
    }

    pub fn check_dims(&self, p: &ProblemSpec) -> Result<()> {
        check_dim("x", p.dim_x(), self.x.len())?;
        check_dim("y", p.dim_y(), self.y.len())?;
        check_dim("λ", p.dim_z(), self.lambda.len())?;
        check_dim("ẋ", p.dim_x(), self.u.len())?;
        check_dim("ẏ", p.dim_y(), self.v.len())?;
        check_dim("λ̇", p.dim_z(), self.nu.len())
    }

    pub fn is_finite(&self) -> bool {
        self.blocks().iter().all(|b| b.iter().all(|v| v.is_finite()))
    }

    /// `‖(ẋ, ẏ, λ̇)‖`.
    pub fn velocity_norm(&self) -> f64 {
        (self.u.norm_squared() + self.v.norm_squared() + self.nu.norm_squared()).sqrt()
    }
}

/// A smooth problem paired with a coefficient schedule.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    pub problem: ProblemSpec,
    pub schedule: Schedule,
}

impl FieldSpec {
    pub fn new(problem: ProblemSpec, schedule: Schedule) -> Result<Self> {
        problem.f.as_smooth()?;
        problem.g.as_smooth()?;
        Ok(Self { problem, schedule })
    }

    fn smooth_blocks(&self) -> Result<(&dyn SmoothFunction, &dyn SmoothFunction)> {
        Ok((self.problem.f.as_smooth()?, self.problem.g.as_smooth()?))
    }

    /// `(ẍ, ÿ, λ̈)` at `(t, Z)`.
    fn accelerations(&self, t: f64, z: &PhaseState) -> Result<(Vector, Vector, Vector)> {
        let p = &self.problem;
        let (f, g) = self.smooth_blocks()?;
        let s = &self.schedule;
        let (gamma, alpha, b) = (s.gamma(t), s.alpha(t), s.b(t));

        let r = &p.a * &z.x + &p.b * &z.y - &p.c;
        let multiplier = &z.lambda + &z.nu * alpha + r * p.mu;
        let xdd = -(&z.u * gamma) - (f.grad(&z.x) + p.a.tr_mul(&multiplier)) * b;
        let ydd = -(&z.v * gamma) - (g.grad(&z.y) + p.b.tr_mul(&multiplier)) * b;
        let extrapolated = &p.a * (&z.x + &z.u * alpha) + &p.b * (&z.y + &z.v * alpha) - &p.c;
        let ldd = -(&z.nu * gamma) + extrapolated * b;
        Ok((xdd, ydd, ldd))
    }
}

/// `Ż = (u, v, ν, ẍ, ÿ, λ̈)`.
pub fn vector_field(fs: &FieldSpec, t: f64, z: &PhaseState) -> Result<PhaseState> {
    z.check_dims(&fs.problem)?;
    if !z.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite(format!("phase state at t = {t}")));
    }
    let (xdd, ydd, ldd) = fs.accelerations(t, z)?;
    Ok(PhaseState {
        x: z.u.clone(),
        y: z.v.clone(),
        lambda: z.nu.clone(),
        u: xdd,
        v: ydd,
        nu: ldd,
    })
}

impl OdeSystem for FieldSpec {
    fn dim(&self) -> usize {
        2 * (self.problem.dim_x() + self.problem.dim_y() + self.problem.dim_z())
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let z = PhaseState::from_flat(&self.problem, y)?;
        let d = vector_field(self, t, &z)?;
        let mut offset = 0;
        for block in d.blocks() {
            dy[offset..offset + block.len()].copy_from_slice(block.as_slice());
            offset += block.len();
        }
        Ok(())
    }
}

/// `‖(ẍ + ÿ) + γ(ẋ + ẏ)‖` for problems with `f = g = 0` and square `A`, `B`.
/// When additionally `B = −A`, the coupling cancels in `s = x + y`, which
/// obeys `s̈ + γṡ = 0`, and the value is zero.
pub fn sum_decoupling_check(fs: &FieldSpec, t: f64, z: &PhaseState) -> Result<f64> {
    let p = &fs.problem;
    let (f, g) = fs.smooth_blocks()?;
    let zero_block = |b: &dyn SmoothFunction| {
        b.quadratic_form()
            .is_some_and(|(h, q)| h.iter().all(|&v| v == 0.0) && q.iter().all(|&v| v == 0.0))
    };
    if !zero_block(f) || !zero_block(g) || p.dim_x() != p.dim_z() || p.dim_y() != p.dim_z() {
        return Err(Error::Contract(
            "sum decoupling check needs f = g = 0 and square A, B of equal size".into(),
        ));
    }
    let d = vector_field(fs, t, z)?;
    let gamma = fs.schedule.gamma(t);
    Ok(((&d.u + &d.v) + (&z.u + &z.v) * gamma).norm())
}

/// `‖[A B]‖₂`.
fn constraint_norm(p: &ProblemSpec) -> f64 {
    let (m, nx, ny) = (p.dim_z(), p.dim_x(), p.dim_y());
    let mut l = Matrix::zeros(m, nx + ny);
    l.columns_mut(0, nx).copy_from(&p.a);
    l.columns_mut(nx, ny).copy_from(&p.b);
    l.singular_values().max()
}

fn stiffness_with_norm(fs: &FieldSpec, t: f64, norm: f64) -> f64 {
    let s = &fs.schedule;
    let b = s.b(t);
    (b * s.alpha(t) + (b * fs.problem.mu).sqrt()) * norm
}

/// Rough rate of the fastest mode at time `t`: the gyroscopic coupling
/// `bα‖L‖` plus the penalty oscillation `√(bμ)‖L‖`, `L = [A B]`. Explicit
/// steppers need steps of order `1/κ`.
pub fn stiffness_index(fs: &FieldSpec, t: f64) -> f64 {
    stiffness_with_norm(fs, t, constraint_norm(&fs.problem))
}

/// Largest [`stiffness_index`] on a uniform 4096-point scan of
/// `[t_start, t_end]`.
pub fn peak_stiffness(fs: &FieldSpec, t_start: f64, t_end: f64) -> f64 {
    let norm = constraint_norm(&fs.problem);
    const SCAN: usize = 4096;
    (0..=SCAN)
        .map(|k| stiffness_with_norm(fs, t_start + (t_end - t_start) * k as f64 / SCAN as f64, norm))
        .fold(0.0, f64::max)
}

/// First time in `[t_start, t_end]` at which [`stiffness_index`] exceeds
/// `limit`, or `t_end` if it never does.
pub fn stiffness_horizon(fs: &FieldSpec, t_start: f64, t_end: f64, limit: f64) -> f64 {
    let norm = constraint_norm(&fs.problem);
    let over = |t: f64| !(stiffness_with_norm(fs, t, norm) <= limit);
    const SCAN: usize = 4096;
    let mut lo = t_start;
    for k in 1..=SCAN {
        let hi = t_start + (t_end - t_start) * k as f64 / SCAN as f64;
        if over(hi) {
            if over(lo) {
                return lo;
            }
            let mut hi = hi;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if over(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return lo;
        }
        lo = hi;
    }
    t_end
}
