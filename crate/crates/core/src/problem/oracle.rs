//! Saddle-point oracles used as ground truth by the diagnostics.

use super::{ProblemSpec, SaddlePoint};
use crate::error::{Error, Result};
use crate::{Matrix, Vector};

const NEWTON_MAX_ITERATIONS: usize = 200;

/// Output of [`solve_saddle_point_from`].
#[derive(Clone, Debug)]
pub struct ReferenceSolution {
    pub point: SaddlePoint,
    pub iterations: usize,
    pub residual: f64,
}

fn kkt_matrix(p: &ProblemSpec, hf: &Matrix, hg: &Matrix) -> Matrix {
    let (nx, ny, nz) = (p.dim_x(), p.dim_y(), p.dim_z());
    let n = nx + ny + nz;
    let mut k = Matrix::zeros(n, n);
    k.view_mut((0, 0), (nx, nx)).copy_from(hf);
    k.view_mut((nx, nx), (ny, ny)).copy_from(hg);
    k.view_mut((0, nx + ny), (nx, nz)).copy_from(&p.a.transpose());
    k.view_mut((nx, nx + ny), (ny, nz)).copy_from(&p.b.transpose());
    k.view_mut((nx + ny, 0), (nz, nx)).copy_from(&p.a);
    k.view_mut((nx + ny, nx), (nz, ny)).copy_from(&p.b);
    k
}

fn split(p: &ProblemSpec, w: &Vector) -> (Vector, Vector, Vector) {
    let (nx, ny, nz) = (p.dim_x(), p.dim_y(), p.dim_z());
    (
        w.rows(0, nx).into_owned(),
        w.rows(nx, ny).into_owned(),
        w.rows(nx + ny, nz).into_owned(),
    )
}

fn saddle_from(p: &ProblemSpec, w: &Vector) -> Result<SaddlePoint> {
    let (x, y, lambda) = split(p, w);
    let f_star = p.objective(&x, &y)?;
    Ok(SaddlePoint { x, y, lambda, f_star })
}

/// Solves the linear KKT system directly when both blocks are quadratic.
pub fn solve_saddle_point_quadratic(p: &ProblemSpec) -> Result<SaddlePoint> {
    let f = p.f.as_smooth()?;
    let g = p.g.as_smooth()?;
    let ((hf, qf), (hg, qg)) = match (f.quadratic_form(), g.quadratic_form()) {
        (Some(fq), Some(gq)) => (fq, gq),
        _ => {
            return Err(Error::Contract(
                "quadratic saddle-point oracle needs quadratic f and g".into(),
            ))
        }
    };
    let k = kkt_matrix(p, &hf, &hg);
    let mut rhs = Vector::zeros(k.nrows());
    rhs.rows_mut(0, p.dim_x()).copy_from(&(-qf));
    rhs.rows_mut(p.dim_x(), p.dim_y()).copy_from(&(-qg));
    rhs.rows_mut(p.dim_x() + p.dim_y(), p.dim_z()).copy_from(&p.c);

    let w = k
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Oracle("KKT matrix is singular; supply the saddle point explicitly".into()))?;
    let sp = saddle_from(p, &w)?;
    let scale = 1.0 + k.amax() * w.amax() + rhs.amax();
    let residual = p.saddle_kkt_residual(&sp)?;
    if !(residual <= 1e-9 * scale) {
        return Err(Error::Oracle(format!(
            "KKT matrix is numerically singular (residual {residual:e} after solve)"
        )));
    }
    Ok(sp)
}

/// Damped Newton on the KKT system from the origin.
pub fn solve_saddle_point_reference(p: &ProblemSpec, tol: f64) -> Result<SaddlePoint> {
    let start = SaddlePoint {
        x: Vector::zeros(p.dim_x()),
        y: Vector::zeros(p.dim_y()),
        lambda: Vector::zeros(p.dim_z()),
        f_star: f64::NAN,
    };
    Ok(solve_saddle_point_from(p, &start, tol)?.point)
}

/// Damped Newton on the KKT system, globalized by backtracking on the
/// residual norm. `start.f_star` is ignored.
pub fn solve_saddle_point_from(p: &ProblemSpec, start: &SaddlePoint, tol: f64) -> Result<ReferenceSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let f = p.f.as_smooth()?;
    let g = p.g.as_smooth()?;
    let n = p.dim_x() + p.dim_y() + p.dim_z();
    let mut w = Vector::zeros(n);
    w.rows_mut(0, p.dim_x()).copy_from(&start.x);
    w.rows_mut(p.dim_x(), p.dim_y()).copy_from(&start.y);
    w.rows_mut(p.dim_x() + p.dim_y(), p.dim_z()).copy_from(&start.lambda);

    let residual_at = |w: &Vector| -> Result<Vector> {
        let (x, y, l) = split(p, w);
        p.kkt_vector(&x, &y, &l)
    };

    let mut r = residual_at(&w)?;
    let mut norm = r.norm();
    for iteration in 0..=NEWTON_MAX_ITERATIONS {
        if norm <= tol {
            return Ok(ReferenceSolution {
                point: saddle_from(p, &w)?,
                iterations: iteration,
                residual: norm,
            });
        }
        if iteration == NEWTON_MAX_ITERATIONS {
            break;
        }
        let (x, y, _) = split(p, &w);
        let k = kkt_matrix(p, &f.hessian(&x), &g.hessian(&y));
        let step = match k.clone().lu().solve(&(-&r)) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => k
                .svd(true, true)
                .solve(&(-&r), 1e-14)
                .map_err(|e| Error::Oracle(format!("Newton system unsolvable: {e}")))?,
        };

        let mut t = 1.0;
        loop {
            let trial = &w + &step * t;
            let rt = residual_at(&trial)?;
            let nt = rt.norm();
            if nt <= (1.0 - 1e-4 * t) * norm || (nt < norm && t < 1e-3) {
                w = trial;
                r = rt;
                norm = nt;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::Oracle(format!(
                    "line search stalled at KKT residual {norm:e} (iteration {iteration})"
                )));
            }
        }
    }
    Err(Error::Oracle(format!(
        "no convergence within {NEWTON_MAX_ITERATIONS} Newton iterations (KKT residual {norm:e})"
    )))
}
