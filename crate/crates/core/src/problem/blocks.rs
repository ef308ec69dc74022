//! Objective blocks: smooth functions exposing a gradient, and non-smooth
//! functions exposing a proximal map.

use std::fmt;
use std::sync::Arc;

use nalgebra::SymmetricEigen;

use crate::error::{check_dim, Error, Result};
use crate::{Matrix, Vector};

/// A convex `C¹` function with an analytic gradient.
pub trait SmoothFunction: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &Vector) -> f64;

    fn grad(&self, x: &Vector) -> Vector;

    /// `(Q, q)` such that the function is `½xᵀQx + qᵀx + const`, when it is
    /// quadratic.
    fn quadratic_form(&self) -> Option<(Matrix, Vector)> {
        None
    }

    /// Hessian (or a generalized Jacobian of the gradient). Falls back to
    /// central differences of [`SmoothFunction::grad`].
    fn hessian(&self, x: &Vector) -> Matrix {
        fd_jacobian(|z| self.grad(z), x)
    }

    /// Modulus of strong convexity, when the function is known to be
    /// strongly convex.
    fn strong_convexity(&self) -> Option<f64> {
        None
    }
}

/// A proper convex lower-semicontinuous function with a computable proximal
/// map `prox(θ, x) = argmin_ξ value(ξ) + ‖x − ξ‖²/(2θ)`.
pub trait ProxFunction: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// May return `+∞` outside the domain.
    fn value(&self, x: &Vector) -> f64;

    fn prox(&self, theta: f64, x: &Vector) -> Vector;

    /// Generalized Jacobian of `x ↦ prox(θ, x)`, if available in closed form.
    fn prox_jacobian(&self, _theta: f64, _x: &Vector) -> Option<Matrix> {
        None
    }
}

/// One of the two objective blocks `f` or `g`.
#[derive(Clone, Debug)]
pub enum Block {
    Smooth(Arc<dyn SmoothFunction>),
    Prox(Arc<dyn ProxFunction>),
}

impl Block {
    pub fn smooth(f: impl SmoothFunction + 'static) -> Self {
        Block::Smooth(Arc::new(f))
    }

    pub fn prox(f: impl ProxFunction + 'static) -> Self {
        Block::Prox(Arc::new(f))
    }

    pub fn dim(&self) -> usize {
        match self {
            Block::Smooth(f) => f.dim(),
            Block::Prox(f) => f.dim(),
        }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        match self {
            Block::Smooth(f) => f.value(x),
            Block::Prox(f) => f.value(x),
        }
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self, Block::Smooth(_))
    }

    pub fn as_smooth(&self) -> Result<&dyn SmoothFunction> {
        match self {
            Block::Smooth(f) => Ok(f.as_ref()),
            Block::Prox(f) => Err(Error::Contract(format!(
                "gradient requested on a non-smooth block ({f:?}); smooth it with a Moreau envelope first"
            ))),
        }
    }
}

/// Central-difference Jacobian of a vector map, symmetrized.
pub(crate) fn fd_jacobian(map: impl Fn(&Vector) -> Vector, x: &Vector) -> Matrix {
    let n = x.len();
    let mut jac = Matrix::zeros(n, n);
    let mut probe = x.clone();
    for j in 0..n {
        let h = 1e-6 * x[j].abs().max(1.0);
        probe[j] = x[j] + h;
        let plus = map(&probe);
        probe[j] = x[j] - h;
        let minus = map(&probe);
        probe[j] = x[j];
        jac.set_column(j, &((plus - minus) / (2.0 * h)));
    }
    (&jac + jac.transpose()) * 0.5
}

/// `½xᵀQx + qᵀx + k` with `Q` symmetric positive semidefinite.
#[derive(Clone, Debug)]
pub struct Quadratic {
    hessian: Matrix,
    linear: Vector,
    constant: f64,
    min_eigenvalue: f64,
}

impl Quadratic {
    pub fn new(hessian: Matrix, linear: Vector, constant: f64) -> Result<Self> {
        if !hessian.is_square() {
            return Err(Error::InvalidParameter("quadratic Hessian must be square".into()));
        }
        check_dim("quadratic linear term", hessian.nrows(), linear.len())?;
        let scale = hessian.amax().max(1.0);
        if (&hessian - hessian.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidParameter("quadratic Hessian must be symmetric".into()));
        }
        let min_eigenvalue = if hessian.nrows() == 0 {
            0.0
        } else {
            SymmetricEigen::new(hessian.clone()).eigenvalues.min()
        };
        if min_eigenvalue < -1e-12 * scale {
            return Err(Error::InvalidParameter(format!(
                "quadratic is not convex (smallest Hessian eigenvalue {min_eigenvalue:e})"
            )));
        }
        Ok(Self {
            hessian,
            linear,
            constant,
            min_eigenvalue,
        })
    }

    /// `‖x − center‖²`.
    pub fn squared_distance(center: Vector) -> Self {
        let n = center.len();
        let constant = center.norm_squared();
        Self::new(Matrix::identity(n, n) * 2.0, center * -2.0, constant).expect("2I is positive definite")
    }

    /// `(s/2)‖x‖²`.
    pub fn scaled_norm(dim: usize, scale: f64) -> Self {
        Self::new(Matrix::identity(dim, dim) * scale, Vector::zeros(dim), 0.0)
            .expect("scaled identity with nonnegative scale")
    }

    pub fn zero(dim: usize) -> Self {
        Self::scaled_norm(dim, 0.0)
    }
}

impl SmoothFunction for Quadratic {
    fn dim(&self) -> usize {
        self.linear.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.hessian * x)) + self.linear.dot(x) + self.constant
    }

    fn grad(&self, x: &Vector) -> Vector {
        &self.hessian * x + &self.linear
    }

    fn quadratic_form(&self) -> Option<(Matrix, Vector)> {
        Some((self.hessian.clone(), self.linear.clone()))
    }

    fn hessian(&self, _x: &Vector) -> Matrix {
        self.hessian.clone()
    }

    fn strong_convexity(&self) -> Option<f64> {
        (self.min_eigenvalue > 1e-12).then_some(self.min_eigenvalue)
    }
}

/// Logistic loss `log(1 + exp(−⟨a, x⟩))`. Its Hessian is rank one, so it is
/// never strongly convex in dimension ≥ 2.
#[derive(Clone, Debug)]
pub struct Logistic {
    direction: Vector,
}

impl Logistic {
    pub fn new(direction: Vector) -> Self {
        Self { direction }
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl SmoothFunction for Logistic {
    fn dim(&self) -> usize {
        self.direction.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        softplus(-self.direction.dot(x))
    }

    fn grad(&self, x: &Vector) -> Vector {
        let s = self.direction.dot(x);
        &self.direction * -sigmoid(-s)
    }

    fn hessian(&self, x: &Vector) -> Matrix {
        let s = self.direction.dot(x);
        let w = sigmoid(s) * sigmoid(-s);
        &self.direction * self.direction.transpose() * w
    }

    fn strong_convexity(&self) -> Option<f64> {
        // rank-one curvature: strongly convex only in one dimension, and even
        // then the curvature vanishes at infinity
        None
    }
}

/// `κ‖x‖₁ + (s/2)‖x − a‖²`, with closed-form prox (soft thresholding of a
/// shrunk point). `s = 0` gives the plain ℓ1 norm and `κ = 0` a scaled
/// quadratic.
#[derive(Clone, Debug)]
pub struct QuadraticL1 {
    pub weight: f64,
    pub scale: f64,
    pub center: Vector,
}

impl QuadraticL1 {
    pub fn new(weight: f64, scale: f64, center: Vector) -> Result<Self> {
        if !(weight >= 0.0 && scale >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ℓ1 weight and quadratic scale must be nonnegative (got {weight}, {scale})"
            )));
        }
        Ok(Self { weight, scale, center })
    }

    /// `κ‖x‖₁`.
    pub fn l1(dim: usize, weight: f64) -> Result<Self> {
        Self::new(weight, 0.0, Vector::zeros(dim))
    }

    /// A minimal-norm subgradient at `x` (componentwise selection).
    pub fn subgradient(&self, x: &Vector) -> Vector {
        Vector::from_iterator(
            x.len(),
            x.iter().zip(self.center.iter()).map(|(&xi, &ai)| {
                let smooth = self.scale * (xi - ai);
                if xi > 0.0 {
                    smooth + self.weight
                } else if xi < 0.0 {
                    smooth - self.weight
                } else {
                    // pick the element of smooth + [−κ, κ] closest to zero
                    smooth - smooth.clamp(-self.weight, self.weight)
                }
            }),
        )
    }

    fn shrink(&self, theta: f64, x: &Vector) -> (Vector, f64) {
        let denom = 1.0 + self.scale * theta;
        let shifted = (x + &self.center * (self.scale * theta)) / denom;
        (shifted, self.weight * theta / denom)
    }
}

impl ProxFunction for QuadraticL1 {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        self.weight * x.lp_norm(1) + 0.5 * self.scale * (x - &self.center).norm_squared()
    }

    fn prox(&self, theta: f64, x: &Vector) -> Vector {
        let (shifted, threshold) = self.shrink(theta, x);
        shifted.map(|z| z.signum() * (z.abs() - threshold).max(0.0))
    }

    fn prox_jacobian(&self, theta: f64, x: &Vector) -> Option<Matrix> {
        let (shifted, threshold) = self.shrink(theta, x);
        let denom = 1.0 + self.scale * theta;
        let diag = shifted.map(|z| if z.abs() > threshold { 1.0 / denom } else { 0.0 });
        Some(Matrix::from_diagonal(&diag))
    }
}

/// Indicator of the box `[lower, upper]`; its prox is the projection.
#[derive(Clone, Debug)]
pub struct BoxIndicator {
    pub lower: Vector,
    pub upper: Vector,
}

impl BoxIndicator {
    pub fn new(lower: Vector, upper: Vector) -> Result<Self> {
        check_dim("box bounds", lower.len(), upper.len())?;
        if lower.iter().zip(upper.iter()).any(|(l, u)| !(l <= u)) {
            return Err(Error::InvalidParameter("box requires lower ≤ upper".into()));
        }
        Ok(Self { lower, upper })
    }
}

impl ProxFunction for BoxIndicator {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        let inside = x
            .iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .all(|(xi, (l, u))| l <= xi && xi <= u);
        if inside {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, _theta: f64, x: &Vector) -> Vector {
        Vector::from_iterator(
            x.len(),
            x.iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .map(|(xi, (l, u))| xi.clamp(*l, *u)),
        )
    }

    fn prox_jacobian(&self, _theta: f64, x: &Vector) -> Option<Matrix> {
        let diag = Vector::from_iterator(
            x.len(),
            x.iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .map(|(xi, (l, u))| if l < xi && xi < u { 1.0 } else { 0.0 }),
        );
        Some(Matrix::from_diagonal(&diag))
    }
}
