//! Constrained minimization kernel: an augmented-Lagrangian outer loop over
//! equality constraints, with box constraints handled by projection inside
//! the inner minimizers.
//!
//! Two inner minimizers are available: Nelder-Mead for low-dimensional
//! problems and a projected quasi-Newton (limited-memory BFGS with Armijo
//! backtracking along the projection arc) for high-dimensional ones. `Auto`
//! dispatches on problem dimension; callers can override.
//!
//! The kernel is deterministic: identical problem, start, and configuration
//! produce bit-identical iterates.

mod kkt;
mod nelder_mead;
mod quasi_newton;

pub use kkt::{kkt_residuals, projected_hessian_min_eigenvalue, KktResiduals};
pub use nelder_mead::NmOptions;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type ScalarFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VectorFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Central finite-difference step for gradients, `(machine eps)^(1/3)`.
pub(crate) const FD_STEP: f64 = 6.055454452393343e-6;

/// Per-coordinate box constraints; entries may be infinite.
#[derive(Debug, Clone)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        assert!(
            lower.iter().zip(&upper).all(|(l, u)| l <= u),
            "lower bound exceeds upper bound"
        );
        Self { lower, upper }
    }

    pub fn unbounded(dim: usize) -> Self {
        Self {
            lower: vec![f64::NEG_INFINITY; dim],
            upper: vec![f64::INFINITY; dim],
        }
    }

    pub fn nonnegative(dim: usize) -> Self {
        Self {
            lower: vec![0.0; dim],
            upper: vec![f64::INFINITY; dim],
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn clamp(&self, i: usize, v: f64) -> f64 {
        v.max(self.lower[i]).min(self.upper[i])
    }

    pub fn project(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = self.clamp(i, *v);
        }
    }

    pub fn projected(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        self.project(&mut y);
        y
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .enumerate()
            .all(|(i, v)| self.lower[i] <= *v && *v <= self.upper[i])
    }
}

/// A scalar equality constraint `c(x) = 0`, optionally with a gradient.
pub struct Constraint {
    value: ScalarFn,
    gradient: Option<VectorFn>,
}

impl Constraint {
    pub fn new(value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Box::new(value),
            gradient: None,
        }
    }

    pub fn with_gradient(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Box::new(value),
            gradient: Some(Box::new(gradient)),
        }
    }

    /// Linear constraint `w . x - rhs = 0` with its constant gradient.
    pub fn linear(weights: Vec<f64>, rhs: f64) -> Self {
        let w = weights.clone();
        Self {
            value: Box::new(move |x: &[f64]| {
                x.iter().zip(&w).map(|(xi, wi)| xi * wi).sum::<f64>() - rhs
            }),
            gradient: Some(Box::new(move |_: &[f64]| weights.clone())),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        match &self.gradient {
            Some(g) => g(x),
            None => kkt::fd_gradient(&*self.value, x),
        }
    }
}

/// An equality-constrained minimization problem over a box.
pub struct ObjectiveProblem {
    dimension: usize,
    objective: ScalarFn,
    gradient: Option<VectorFn>,
    hessian_diagonal: Option<VectorFn>,
    equality_constraints: Vec<Constraint>,
    bounds: Bounds,
}

impl ObjectiveProblem {
    pub fn new(
        dimension: usize,
        objective: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        equality_constraints: Vec<Constraint>,
        bounds: Bounds,
    ) -> Self {
        assert_eq!(bounds.len(), dimension);
        Self {
            dimension,
            objective: Box::new(objective),
            gradient: None,
            hessian_diagonal: None,
            equality_constraints,
            bounds,
        }
    }

    /// Attach an analytic objective gradient.
    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Box::new(gradient));
        self
    }

    /// Attach the diagonal of the objective Hessian. The quasi-Newton inner
    /// minimizer uses it (plus the exact penalty diagonal of linear
    /// constraints) as a preconditioner, which matters when the objective
    /// curvature varies by orders of magnitude across coordinates.
    pub fn with_hessian_diagonal(
        mut self,
        diagonal: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.hessian_diagonal = Some(Box::new(diagonal));
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.equality_constraints
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        (self.objective)(x)
    }

    pub fn objective_gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.gradient {
            Some(g) => g(x),
            None => kkt::fd_gradient(&*self.objective, x),
        }
    }

    pub fn constraint_values(&self, x: &[f64]) -> Vec<f64> {
        self.equality_constraints
            .iter()
            .map(|c| c.eval(x))
            .collect()
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.constraint_values(x)
            .iter()
            .fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Which inner minimizer the augmented-Lagrangian loop uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InnerMethod {
    /// Nelder-Mead at or below [`SolverConfig::nm_dimension_limit`],
    /// projected quasi-Newton above it.
    Auto,
    NelderMead,
    ProjectedQuasiNewton,
}

/// Tolerances and iteration limits for [`minimize_auglag`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Maximum allowed equality violation at a converged point.
    pub eq_tol: f64,
    /// Maximum allowed projected-gradient stationarity residual.
    pub kkt_tol: f64,
    /// Relative objective-change threshold used to detect stalls.
    pub objective_rel_tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub penalty_cap: f64,
    /// Required violation shrink factor per outer iteration before the
    /// penalty is raised instead of the multipliers updated.
    pub violation_improvement: f64,
    pub inner_method: InnerMethod,
    /// `Auto` uses Nelder-Mead for dimensions up to this.
    pub nm_dimension_limit: usize,
    /// Projected-gradient target for the final polish solve.
    pub polish_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eq_tol: 1e-8,
            kkt_tol: 1e-5,
            objective_rel_tol: 1e-10,
            max_outer: 50,
            max_inner: 5000,
            initial_penalty: 10.0,
            penalty_growth: 10.0,
            penalty_cap: 1e8,
            violation_improvement: 4.0,
            inner_method: InnerMethod::Auto,
            nm_dimension_limit: 5,
            polish_tol: 1e-12,
        }
    }
}

impl SolverConfig {
    fn effective_method(&self, dim: usize) -> InnerMethod {
        match self.inner_method {
            InnerMethod::Auto => {
                if dim <= self.nm_dimension_limit {
                    InnerMethod::NelderMead
                } else {
                    InnerMethod::ProjectedQuasiNewton
                }
            }
            m => m,
        }
    }
}

/// One row of the per-outer-iteration merit log (`--trace` output).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TracePoint {
    pub outer: usize,
    pub penalty: f64,
    pub merit_start: f64,
    pub merit_end: f64,
    pub objective: f64,
    pub max_violation: f64,
}

/// Outcome summary of a constrained solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    pub inner_iterations: usize,
    pub objective_value: f64,
    pub max_equality_violation: f64,
    pub kkt_stationarity_residual: f64,
    pub converged: bool,
    pub method_tag: String,
    /// Final multiplier estimates for the equality constraints.
    pub multipliers: Vec<f64>,
    pub trace: Vec<TracePoint>,
}

struct Merit<'a> {
    problem: &'a ObjectiveProblem,
    nu: Vec<f64>,
    rho: f64,
}

impl Merit<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        let mut v = self.problem.objective(x);
        for (k, c) in self.problem.equality_constraints.iter().enumerate() {
            let ck = c.eval(x);
            v += self.nu[k] * ck + 0.5 * self.rho * ck * ck;
        }
        v
    }

    fn analytic_gradients_available(&self) -> bool {
        self.problem.gradient.is_some()
            && self
                .problem
                .equality_constraints
                .iter()
                .all(|c| c.gradient.is_some())
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        if self.analytic_gradients_available() {
            let mut g = self.problem.objective_gradient(x);
            for (k, c) in self.problem.equality_constraints.iter().enumerate() {
                let ck = c.eval(x);
                let scale = self.nu[k] + self.rho * ck;
                for (gi, dci) in g.iter_mut().zip(c.grad(x)) {
                    *gi += scale * dci;
                }
            }
            g
        } else {
            kkt::fd_gradient(&|x: &[f64]| self.value(x), x)
        }
    }

    /// Preconditioning diagonal for the inner minimizer: the objective
    /// Hessian diagonal alone. The penalty Hessian is a low-rank term (one
    /// direction per constraint) that the quasi-Newton pairs capture
    /// quickly; folding it into the diagonal would drown the objective
    /// curvature and ruin the metric on the feasible subspace.
    fn hessian_diagonal(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.problem.hessian_diagonal.as_ref().map(|d| d(x))
    }
}

fn check_finite(value: f64, x: &[f64]) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteObjective {
            value,
            point: x.to_vec(),
        })
    }
}

/// Max-norm of the projected gradient `x - P(x - g)`; zero exactly at a
/// first-order stationary point of the box-constrained problem.
fn projected_gradient_norm(bounds: &Bounds, x: &[f64], g: &[f64]) -> f64 {
    x.iter()
        .zip(g)
        .enumerate()
        .map(|(i, (xi, gi))| (xi - bounds.clamp(i, xi - gi)).abs())
        .fold(0.0, f64::max)
}

fn run_inner(
    merit: &Merit<'_>,
    method: InnerMethod,
    x: Vec<f64>,
    pg_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64, usize)> {
    let bounds = &merit.problem.bounds;
    match method {
        InnerMethod::NelderMead => {
            let opts = NmOptions {
                max_iter,
                ..NmOptions::default()
            };
            let f = |x: &[f64]| merit.value(x);
            let r = nelder_mead::minimize(&f, bounds, x, &opts)?;
            Ok((r.x, r.value, r.iterations))
        }
        InnerMethod::ProjectedQuasiNewton => {
            let f = |x: &[f64]| merit.value(x);
            let g = |x: &[f64]| merit.gradient(x);
            let precond = |x: &[f64]| merit.hessian_diagonal(x);
            let r = quasi_newton::minimize(&f, &g, &precond, bounds, x, pg_tol, max_iter)?;
            Ok((r.x, r.value, r.iterations))
        }
        InnerMethod::Auto => unreachable!("resolved before dispatch"),
    }
}

/// Minimize an equality-constrained problem over a box with the method of
/// multipliers.
///
/// The returned point satisfies the bounds exactly. `converged` in the
/// diagnostics means the equality violation is within `eq_tol` and the
/// stationarity residual of the Lagrangian (with the returned multiplier
/// estimates) is within `kkt_tol`; otherwise the best point found is
/// returned with `converged = false`.
pub fn minimize_auglag(
    problem: &ObjectiveProblem,
    initial: &[f64],
    config: &SolverConfig,
) -> Result<(Vec<f64>, SolveDiagnostics)> {
    assert_eq!(initial.len(), problem.dimension());
    let method = config.effective_method(problem.dimension());
    let method_tag = match method {
        InnerMethod::NelderMead => "auglag/nelder-mead",
        InnerMethod::ProjectedQuasiNewton => "auglag/projected-quasi-newton",
        InnerMethod::Auto => unreachable!(),
    };

    let mut x = problem.bounds.projected(initial);
    check_finite(problem.objective(&x), &x)?;

    let n_constraints = problem.equality_constraints.len();
    let mut nu = vec![0.0; n_constraints];
    let mut rho = if n_constraints == 0 {
        0.0
    } else {
        config.initial_penalty
    };

    let mut trace = Vec::new();
    let mut total_inner = 0usize;
    let mut outer_done = 0usize;
    let mut prev_violation = f64::INFINITY;
    let mut prev_objective = f64::INFINITY;
    let mut inner_tol = 1e-6;
    let mut converged = false;

    for outer in 1..=config.max_outer {
        outer_done = outer;
        let merit = Merit {
            problem,
            nu: nu.clone(),
            rho,
        };
        let merit_start = merit.value(&x);
        let tol = if n_constraints == 0 {
            config.polish_tol
        } else {
            inner_tol
        };
        let (x_new, merit_end, iters) =
            run_inner(&merit, method, x.clone(), tol, config.max_inner)?;
        total_inner += iters;
        x = x_new;

        let c = problem.constraint_values(&x);
        let violation = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let objective = problem.objective(&x);
        check_finite(objective, &x)?;
        trace.push(TracePoint {
            outer,
            penalty: rho,
            merit_start,
            merit_end,
            objective,
            max_violation: violation,
        });

        if violation <= config.eq_tol {
            // promote the first-order multiplier estimate, then polish the
            // subproblem to a tight stationarity residual
            for (nk, ck) in nu.iter_mut().zip(&c) {
                *nk += rho * ck;
            }
            let merit = Merit {
                problem,
                nu: nu.clone(),
                rho,
            };
            let ms = merit.value(&x);
            let (x_pol, me, iters) = run_inner(
                &merit,
                method,
                x.clone(),
                config.polish_tol,
                config.max_inner,
            )?;
            total_inner += iters;
            x = x_pol;
            let c = problem.constraint_values(&x);
            let violation = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let objective = problem.objective(&x);
            let g = merit.gradient(&x);
            let stationarity = projected_gradient_norm(&problem.bounds, &x, &g);
            trace.push(TracePoint {
                outer,
                penalty: rho,
                merit_start: ms,
                merit_end: me,
                objective,
                max_violation: violation,
            });
            // the merit gradient at (nu, rho) equals the Lagrangian gradient
            // with multipliers nu + rho*c, which is what we report
            for (nk, ck) in nu.iter_mut().zip(&c) {
                *nk += rho * ck;
            }
            if violation <= config.eq_tol && stationarity <= config.kkt_tol {
                converged = true;
            }
            if converged || n_constraints == 0 {
                let diagnostics = SolveDiagnostics {
                    iterations: outer,
                    inner_iterations: total_inner,
                    objective_value: objective,
                    max_equality_violation: violation,
                    kkt_stationarity_residual: stationarity,
                    converged,
                    method_tag: method_tag.into(),
                    multipliers: nu,
                    trace,
                };
                return Ok((x, diagnostics));
            }
        } else if violation <= prev_violation / config.violation_improvement {
            for (nk, ck) in nu.iter_mut().zip(&c) {
                *nk += rho * ck;
            }
        } else {
            rho = (rho * config.penalty_growth).min(config.penalty_cap);
        }

        // stall detection: penalty capped, violation stuck, objective flat
        let obj_change = (objective - prev_objective).abs();
        if rho >= config.penalty_cap
            && violation > config.eq_tol
            && violation > 0.999 * prev_violation
            && obj_change <= config.objective_rel_tol * objective.abs().max(1.0)
        {
            break;
        }
        prev_violation = violation.min(prev_violation);
        prev_objective = objective;
        inner_tol = (inner_tol * 0.1).max(config.polish_tol);
    }

    // not converged: report the best point with honest residuals
    let merit = Merit {
        problem,
        nu: nu.clone(),
        rho,
    };
    let c = problem.constraint_values(&x);
    let violation = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let g = merit.gradient(&x);
    let stationarity = projected_gradient_norm(&problem.bounds, &x, &g);
    let diagnostics = SolveDiagnostics {
        iterations: outer_done,
        inner_iterations: total_inner,
        objective_value: problem.objective(&x),
        max_equality_violation: violation,
        kkt_stationarity_residual: stationarity,
        converged: false,
        method_tag: method_tag.into(),
        multipliers: nu,
        trace,
    };
    Ok((x, diagnostics))
}
