//! Moreau–Yosida smoothing of prox-capable blocks.
//!
//! `f_θ(x) = min_ξ f(ξ) + ‖x − ξ‖²/(2θ)` is `C¹` with `(1/θ)`-Lipschitz
//! gradient `(x − prox_θ(x))/θ`, and `f − (θ/2)‖∂f⁰‖² ≤ f_θ ≤ f`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::{Block, ProblemSpec, ProxFunction, SmoothFunction};
use crate::{Matrix, Vector};

/// Smoothing parameter used by the harness unless configured otherwise.
pub const DEFAULT_THETA: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct MoreauBlock {
    base: Arc<dyn ProxFunction>,
    theta: f64,
}

impl MoreauBlock {
    pub fn new(base: Arc<dyn ProxFunction>, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!("θ must be positive, got {theta}")));
        }
        Ok(Self { base, theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn base(&self) -> &Arc<dyn ProxFunction> {
        &self.base
    }
}

/// `value(p) + ‖x − p‖²/(2θ)` with `p = prox(θ, x)`.
pub fn moreau_value(m: &MoreauBlock, x: &Vector) -> f64 {
    let p = m.base.prox(m.theta, x);
    m.base.value(&p) + (x - &p).norm_squared() / (2.0 * m.theta)
}

/// `(x − prox(θ, x))/θ`.
pub fn moreau_grad(m: &MoreauBlock, x: &Vector) -> Vector {
    (x - m.base.prox(m.theta, x)) / m.theta
}

impl SmoothFunction for MoreauBlock {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn value(&self, x: &Vector) -> f64 {
        moreau_value(self, x)
    }

    fn grad(&self, x: &Vector) -> Vector {
        moreau_grad(self, x)
    }

    fn hessian(&self, x: &Vector) -> Matrix {
        match self.base.prox_jacobian(self.theta, x) {
            Some(jac) => (Matrix::identity(x.len(), x.len()) - jac) / self.theta,
            None => crate::problem::blocks::fd_jacobian(|z| moreau_grad(self, z), x),
        }
    }
}

/// Replaces every prox block of `p` by its Moreau envelope with parameter
/// `theta`; smooth blocks pass through unchanged.
pub fn smooth_problem(p: &ProblemSpec, theta: f64) -> Result<ProblemSpec> {
    let smooth = |block: &Block| -> Result<Block> {
        Ok(match block {
            Block::Smooth(_) => block.clone(),
            Block::Prox(base) => Block::Smooth(Arc::new(MoreauBlock::new(base.clone(), theta)?)),
        })
    };
    ProblemSpec::new(
        smooth(&p.f)?,
        smooth(&p.g)?,
        p.a.clone(),
        p.b.clone(),
        p.c.clone(),
        p.mu,
    )
}
