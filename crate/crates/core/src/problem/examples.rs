//! Built-in instances on `ℝ² × ℝ² × ℝ²`.
//!
//! Both examples share the constraint `y = x + (−x₂, 0)ᵀ`, i.e.
//! `y₁ = x₁ − x₂`, `y₂ = x₂`, written as `Ax + By = c` with
//! `A = [[−1, 1], [0, −1]]`, `B = I`, `c = 0`.

use super::blocks::{Block, Logistic, Quadratic, QuadraticL1};
use super::ProblemSpec;
use crate::{Matrix, Vector};

/// Augmentation parameter used by the reference experiments.
pub const EXAMPLE_MU: f64 = 10.0;

/// Weight of the ℓ1 term in [`make_example1_l1`].
pub const EXAMPLE1_L1_WEIGHT: f64 = 0.5;

fn shared_constraint() -> (Matrix, Matrix, Vector) {
    let a = Matrix::from_row_slice(2, 2, &[-1.0, 1.0, 0.0, -1.0]);
    (a, Matrix::identity(2, 2), Vector::zeros(2))
}

/// `‖x − (1,1)‖² + ‖y‖²` under the shared constraint. Strongly convex.
pub fn make_example1() -> ProblemSpec {
    let (a, b, c) = shared_constraint();
    let f = Quadratic::squared_distance(Vector::from_element(2, 1.0));
    let g = Quadratic::scaled_norm(2, 2.0);
    ProblemSpec::new(Block::smooth(f), Block::smooth(g), a, b, c, EXAMPLE_MU).expect("valid example")
}

/// `log(1 + exp(−⟨(1,1), x⟩)) + ‖y‖²` under the shared constraint. Convex,
/// not strongly convex.
pub fn make_example2() -> ProblemSpec {
    let (a, b, c) = shared_constraint();
    let f = Logistic::new(Vector::from_element(2, 1.0));
    let g = Quadratic::scaled_norm(2, 2.0);
    ProblemSpec::new(Block::smooth(f), Block::smooth(g), a, b, c, EXAMPLE_MU).expect("valid example")
}

/// Non-smooth extension of Example 1: `f(x) = ‖x − (1,1)‖² + ½‖x‖₁`, given
/// as a prox-capable block.
pub fn make_example1_l1() -> ProblemSpec {
    let (a, b, c) = shared_constraint();
    let f = QuadraticL1::new(EXAMPLE1_L1_WEIGHT, 2.0, Vector::from_element(2, 1.0)).expect("valid parameters");
    let g = Quadratic::scaled_norm(2, 2.0);
    ProblemSpec::new(Block::prox(f), Block::smooth(g), a, b, c, EXAMPLE_MU).expect("valid example")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_defaults_to_ten() {
        assert_eq!(make_example1().mu, 10.0);
        assert_eq!(make_example2().mu, 10.0);
    }

    #[test]
    fn constraint_matches_y_equals_x_plus_shift() {
        let p = make_example1();
        let x = Vector::from_vec(vec![1.0, 1.0]);
        let y = Vector::from_vec(vec![0.0, 1.0]);
        assert_eq!(p.feasibility_gap(&x, &y).unwrap(), 0.0);

        let x = Vector::from_vec(vec![2.5, -0.75]);
        let y = Vector::from_vec(vec![x[0] - x[1], x[1]]);
        assert!(p.feasibility_gap(&x, &y).unwrap() < 1e-15);
    }
}
