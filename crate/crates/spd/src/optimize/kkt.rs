//! First- and second-order optimality residuals, computed from finite
//! differences when analytic gradients are not attached.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{ObjectiveProblem, FD_STEP};

/// First-order KKT residuals at a candidate point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KktResiduals {
    /// Max-norm of the projected Lagrangian gradient.
    pub stationarity: f64,
    /// Max equality-constraint violation.
    pub feasibility: f64,
    /// Max over bound constraints of |multiplier estimate * slack|.
    pub complementarity: f64,
}

/// Central finite-difference gradient.
pub(crate) fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut xp = x.to_vec();
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() {
        let h = FD_STEP * (1.0 + x[i].abs());
        let orig = xp[i];
        xp[i] = orig + h;
        let fp = f(&xp);
        xp[i] = orig - h;
        let fm = f(&xp);
        xp[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

fn lagrangian_gradient(problem: &ObjectiveProblem, x: &[f64], multipliers: &[f64]) -> Vec<f64> {
    let mut g = problem.objective_gradient(x);
    for (nu, c) in multipliers.iter().zip(problem.constraints()) {
        for (gi, ci) in g.iter_mut().zip(c.grad(x)) {
            *gi += nu * ci;
        }
    }
    g
}

/// Evaluate the first-order KKT residuals of `problem` at `point` with the
/// given equality multipliers. Bound multipliers are estimated from the
/// Lagrangian gradient itself.
pub fn kkt_residuals(
    problem: &ObjectiveProblem,
    point: &[f64],
    multipliers: &[f64],
) -> KktResiduals {
    assert_eq!(multipliers.len(), problem.constraints().len());
    let g = lagrangian_gradient(problem, point, multipliers);
    let bounds = problem.bounds();

    let stationarity = point
        .iter()
        .zip(&g)
        .enumerate()
        .map(|(i, (&xi, &gi))| (xi - bounds.clamp(i, xi - gi)).abs())
        .fold(0.0f64, f64::max);

    let feasibility = problem.max_violation(point);

    let mut complementarity = 0.0f64;
    for (i, (&xi, &gi)) in point.iter().zip(&g).enumerate() {
        let lo = bounds.lower()[i];
        let hi = bounds.upper()[i];
        if lo.is_finite() {
            let eta = gi.max(0.0); // lower-bound multiplier estimate
            complementarity = complementarity.max((eta * (xi - lo)).abs());
        }
        if hi.is_finite() {
            let eta = (-gi).max(0.0);
            complementarity = complementarity.max((eta * (hi - xi)).abs());
        }
    }

    KktResiduals {
        stationarity,
        feasibility,
        complementarity,
    }
}

/// Smallest eigenvalue of the finite-difference Lagrangian Hessian
/// projected onto the null space of the active constraint gradients
/// (equalities plus bounds active at `point`).
///
/// Directions spanned by the active gradients are projected out, so they
/// contribute zero eigenvalues; the returned value is therefore
/// `min(0, smallest null-space eigenvalue)` whenever active constraints
/// exist, which is exactly what a second-order necessary-condition check
/// `>= -tol` needs.
pub fn projected_hessian_min_eigenvalue(
    problem: &ObjectiveProblem,
    point: &[f64],
    multipliers: &[f64],
) -> f64 {
    let n = point.len();
    let lagrangian = |x: &[f64]| -> f64 {
        let mut v = problem.objective(x);
        for (nu, c) in multipliers.iter().zip(problem.constraints()) {
            v += nu * c.eval(x);
        }
        v
    };

    // finite-difference Hessian, h ~ eps^(1/4) per coordinate
    let h: Vec<f64> = point
        .iter()
        .map(|xi| f64::EPSILON.powf(0.25) * (1.0 + xi.abs()))
        .collect();
    let mut xp = point.to_vec();
    let f0 = lagrangian(&xp);
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        // diagonal
        let oi = xp[i];
        xp[i] = oi + h[i];
        let fp = lagrangian(&xp);
        xp[i] = oi - h[i];
        let fm = lagrangian(&xp);
        xp[i] = oi;
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in (i + 1)..n {
            let oj = xp[j];
            xp[i] = oi + h[i];
            xp[j] = oj + h[j];
            let fpp = lagrangian(&xp);
            xp[j] = oj - h[j];
            let fpm = lagrangian(&xp);
            xp[i] = oi - h[i];
            let fmm = lagrangian(&xp);
            xp[j] = oj + h[j];
            let fmp = lagrangian(&xp);
            xp[i] = oi;
            xp[j] = oj;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }

    // active constraint normals: equality gradients plus active bound axes
    let bounds = problem.bounds();
    let mut normals: Vec<DVector<f64>> = problem
        .constraints()
        .iter()
        .map(|c| DVector::from_vec(c.grad(point)))
        .collect();
    for (i, &xi) in point.iter().enumerate() {
        let tol = 1e-9 * (1.0 + xi.abs());
        let active = (bounds.lower()[i].is_finite() && xi - bounds.lower()[i] <= tol)
            || (bounds.upper()[i].is_finite() && bounds.upper()[i] - xi <= tol);
        if active {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            normals.push(e);
        }
    }

    let projected = if normals.is_empty() {
        hess
    } else {
        let a = DMatrix::from_columns(&normals); // n x k
        let svd = a.clone().svd(true, false);
        let u = svd.u.expect("requested U");
        let tol = svd.singular_values.max() * 1e-12;
        let rank_cols: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&j| svd.singular_values[j] > tol)
            .collect();
        // projector onto the orthogonal complement of the active normals
        let mut proj = DMatrix::identity(n, n);
        for &j in &rank_cols {
            let uj = u.column(j);
            proj -= uj * uj.transpose();
        }
        &proj * hess * &proj
    };

    let sym = (&projected + projected.transpose()) * 0.5;
    let eigen = sym.symmetric_eigen();
    eigen
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::{Bounds, Constraint, ObjectiveProblem};

    fn quadratic() -> ObjectiveProblem {
        ObjectiveProblem::new(
            2,
            |x: &[f64]| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2),
            vec![],
            Bounds::unbounded(2),
        )
    }

    #[test]
    fn residuals_vanish_at_the_vertex() {
        let r = kkt_residuals(&quadratic(), &[1.0, -0.5], &[]);
        assert!(r.stationarity <= 1e-6);
        assert!(r.feasibility == 0.0);
        assert!(r.complementarity == 0.0);
    }

    #[test]
    fn perturbation_is_detected() {
        let r = kkt_residuals(&quadratic(), &[1.1, -0.5], &[]);
        assert!(r.stationarity > 1e-3);
    }

    #[test]
    fn constrained_residuals_with_multiplier() {
        // minimize |x|^2 st x1 + x2 = 1: solution (0.5, 0.5), multiplier -1
        let p = ObjectiveProblem::new(
            2,
            |x: &[f64]| x[0] * x[0] + x[1] * x[1],
            vec![Constraint::linear(vec![1.0, 1.0], 1.0)],
            Bounds::unbounded(2),
        );
        let r = kkt_residuals(&p, &[0.5, 0.5], &[-1.0]);
        assert!(r.stationarity <= 1e-8);
        assert!(r.feasibility <= 1e-15);
    }

    #[test]
    fn convex_hessian_has_nonnegative_projection() {
        let p = ObjectiveProblem::new(
            2,
            |x: &[f64]| x[0] * x[0] + x[1] * x[1],
            vec![Constraint::linear(vec![1.0, 1.0], 1.0)],
            Bounds::unbounded(2),
        );
        let ev = projected_hessian_min_eigenvalue(&p, &[0.5, 0.5], &[-1.0]);
        assert!(ev >= -1e-4, "eigenvalue {ev}");
    }

    #[test]
    fn saddle_is_flagged() {
        // x^2 - y^2 has a negative curvature direction at the origin
        let p = ObjectiveProblem::new(
            2,
            |x: &[f64]| x[0] * x[0] - x[1] * x[1],
            vec![],
            Bounds::unbounded(2),
        );
        let ev = projected_hessian_min_eigenvalue(&p, &[0.0, 0.0], &[]);
        assert!(ev < -1.0, "eigenvalue {ev}");
    }
}
