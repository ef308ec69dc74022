//! The constrained problem `min f(x) + g(y) s.t. Ax + By = c`, its
//! Lagrangian `ℒ` and augmented Lagrangian `ℒ_μ`, and saddle-point oracles.

pub mod blocks;
mod examples;
mod oracle;

pub use blocks::{Block, BoxIndicator, Logistic, ProxFunction, Quadratic, QuadraticL1, SmoothFunction};
pub use examples::{make_example1, make_example1_l1, make_example2, EXAMPLE_MU};
pub use oracle::{
    solve_saddle_point_from, solve_saddle_point_quadratic, solve_saddle_point_reference, ReferenceSolution,
};

use crate::error::{check_dim, Error, Result};
use crate::{Matrix, Vector};

#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub f: Block,
    pub g: Block,
    pub a: Matrix,
    pub b: Matrix,
    pub c: Vector,
    pub mu: f64,
}

/// A saddle point `(x*, y*, λ*)` of the Lagrangian together with `F* = F(x*, y*)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddlePoint {
    pub x: Vector,
    pub y: Vector,
    pub lambda: Vector,
    pub f_star: f64,
}

/// Partial gradients of `ℒ_μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AugLagrangianGrad {
    pub x: Vector,
    pub y: Vector,
    pub lambda: Vector,
}

impl ProblemSpec {
    pub fn new(f: Block, g: Block, a: Matrix, b: Matrix, c: Vector, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("μ must be positive, got {mu}")));
        }
        check_dim("rows of B", a.nrows(), b.nrows())?;
        check_dim("length of c", a.nrows(), c.len())?;
        check_dim("columns of A vs dim of f", a.ncols(), f.dim())?;
        check_dim("columns of B vs dim of g", b.ncols(), g.dim())?;
        Ok(Self { f, g, a, b, c, mu })
    }

    pub fn dim_x(&self) -> usize {
        self.a.ncols()
    }

    pub fn dim_y(&self) -> usize {
        self.b.ncols()
    }

    pub fn dim_z(&self) -> usize {
        self.a.nrows()
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(
            self.f.clone(),
            self.g.clone(),
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            mu,
        )
    }

    pub fn is_smooth(&self) -> bool {
        self.f.is_smooth() && self.g.is_smooth()
    }

    /// Strong convexity modulus of `F(x, y) = f(x) + g(y)` when both blocks
    /// report one.
    pub fn strong_convexity(&self) -> Option<f64> {
        match (&self.f, &self.g) {
            (Block::Smooth(f), Block::Smooth(g)) => Some(f.strong_convexity()?.min(g.strong_convexity()?)),
            _ => None,
        }
    }

    fn check_primal(&self, x: &Vector, y: &Vector) -> Result<()> {
        check_dim("x", self.dim_x(), x.len())?;
        check_dim("y", self.dim_y(), y.len())
    }

    fn check_point(&self, x: &Vector, y: &Vector, lambda: &Vector) -> Result<()> {
        self.check_primal(x, y)?;
        check_dim("λ", self.dim_z(), lambda.len())
    }

    /// `Ax + By − c`.
    pub fn residual(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_primal(x, y)?;
        Ok(&self.a * x + &self.b * y - &self.c)
    }

    /// `F(x, y) = f(x) + g(y)`.
    pub fn objective(&self, x: &Vector, y: &Vector) -> Result<f64> {
        self.check_primal(x, y)?;
        Ok(self.f.value(x) + self.g.value(y))
    }

    /// `ℒ(x, y, λ) = F(x, y) + ⟨λ, Ax + By − c⟩`.
    pub fn lagrangian(&self, x: &Vector, y: &Vector, lambda: &Vector) -> Result<f64> {
        self.check_point(x, y, lambda)?;
        let r = self.residual(x, y)?;
        Ok(self.objective(x, y)? + lambda.dot(&r))
    }

    /// `ℒ_μ = ℒ + (μ/2)‖Ax + By − c‖²`.
    pub fn aug_lagrangian(&self, x: &Vector, y: &Vector, lambda: &Vector) -> Result<f64> {
        self.check_point(x, y, lambda)?;
        let r = self.residual(x, y)?;
        Ok(self.objective(x, y)? + lambda.dot(&r) + 0.5 * self.mu * r.norm_squared())
    }

    pub fn grad_aug_lagrangian(&self, x: &Vector, y: &Vector, lambda: &Vector) -> Result<AugLagrangianGrad> {
        self.check_point(x, y, lambda)?;
        let f = self.f.as_smooth()?;
        let g = self.g.as_smooth()?;
        let r = self.residual(x, y)?;
        let multiplier = lambda + &r * self.mu;
        Ok(AugLagrangianGrad {
            x: f.grad(x) + self.a.tr_mul(&multiplier),
            y: g.grad(y) + self.b.tr_mul(&multiplier),
            lambda: r,
        })
    }

    /// `‖Ax + By − c‖`.
    pub fn feasibility_gap(&self, x: &Vector, y: &Vector) -> Result<f64> {
        Ok(self.residual(x, y)?.norm())
    }

    /// Stacked optimality residuals `(∇f(x) + Aᵀλ, ∇g(y) + Bᵀλ, Ax + By − c)`.
    pub fn kkt_vector(&self, x: &Vector, y: &Vector, lambda: &Vector) -> Result<Vector> {
        self.check_point(x, y, lambda)?;
        let f = self.f.as_smooth()?;
        let g = self.g.as_smooth()?;
        let rx = f.grad(x) + self.a.tr_mul(lambda);
        let ry = g.grad(y) + self.b.tr_mul(lambda);
        let rz = self.residual(x, y)?;
        let mut out = Vector::zeros(rx.len() + ry.len() + rz.len());
        out.rows_mut(0, rx.len()).copy_from(&rx);
        out.rows_mut(rx.len(), ry.len()).copy_from(&ry);
        out.rows_mut(rx.len() + ry.len(), rz.len()).copy_from(&rz);
        Ok(out)
    }

    /// Euclidean norm of [`ProblemSpec::kkt_vector`].
    pub fn kkt_residual(&self, x: &Vector, y: &Vector, lambda: &Vector) -> Result<f64> {
        Ok(self.kkt_vector(x, y, lambda)?.norm())
    }

    pub fn saddle_kkt_residual(&self, sp: &SaddlePoint) -> Result<f64> {
        self.kkt_residual(&sp.x, &sp.y, &sp.lambda)
    }
}
