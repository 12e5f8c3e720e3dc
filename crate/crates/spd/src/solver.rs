//! Direct route: treat the n midpoint density values as decision variables
//! and minimize the discretized CDF path length subject to linear raw-moment
//! constraints and nonnegativity.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::density::{MomentSpec, Partition, PiecewiseDensity};
use crate::error::{Error, Result};
use crate::optimize::{
    minimize_auglag, Bounds, Constraint, ObjectiveProblem, SolveDiagnostics, SolverConfig,
};

/// A full problem instance: grid plus moment targets.
#[derive(Debug, Clone)]
pub struct SpdProblem {
    partition: Partition,
    spec: MomentSpec,
}

impl SpdProblem {
    /// Re-validates attainability of the targets on the partition's interval.
    pub fn new(partition: Partition, spec: MomentSpec) -> Result<Self> {
        let spec = MomentSpec::new(partition.interval(), spec.targets().to_vec())?;
        Ok(Self { partition, spec })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn spec(&self) -> &MomentSpec {
        &self.spec
    }
}

/// Converged density with its achieved moments and functionals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub density: PiecewiseDensity,
    pub achieved_moments: Vec<f64>,
    pub path_length: f64,
    pub uniformity_index: f64,
    pub diagnostics: SolveDiagnostics,
}

impl SolveReport {
    /// Assemble a report for a density produced by any route.
    pub fn from_density(
        density: PiecewiseDensity,
        spec: &MomentSpec,
        diagnostics: SolveDiagnostics,
    ) -> Self {
        let achieved_moments = (0..=spec.order() as u32)
            .map(|k| density.raw_moment(k))
            .collect();
        let path_length = density.path_length();
        let uniformity_index = density.uniformity_index();
        Self {
            density,
            achieved_moments,
            path_length,
            uniformity_index,
            diagnostics,
        }
    }

    pub fn max_moment_error(&self, spec: &MomentSpec) -> f64 {
        self.achieved_moments
            .iter()
            .zip(spec.targets())
            .map(|(a, t)| (a - t).abs())
            .fold(0.0, f64::max)
    }
}

/// Normalized moment-constraint data for the kernel: each weight vector is
/// divided by its Euclidean norm so the penalty treats all orders evenly.
fn normalized_constraints(partition: &Partition, spec: &MomentSpec) -> Vec<Constraint> {
    (0..=spec.order() as u32)
        .map(|k| {
            let mut w = partition.moment_weights(k);
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in w.iter_mut() {
                *v /= norm;
            }
            Constraint::linear(w, spec.target(k as usize) / norm)
        })
        .collect()
}

/// Warm start: the uniform density scaled to the mass target, tilted
/// linearly to match the mean when the tilt stays nonnegative.
fn warm_start(partition: &Partition, spec: &MomentSpec) -> Vec<f64> {
    let uniform = spec.target(0) / partition.interval().width();
    if spec.order() == 0 {
        return vec![uniform; partition.len()];
    }
    let w0 = partition.moment_weights(0);
    let w1 = partition.moment_weights(1);
    let p = partition.midpoints();
    let s00: f64 = w0.iter().sum();
    let s01: f64 = p.iter().zip(&w0).map(|(pi, wi)| pi * wi).sum();
    let s10: f64 = w1.iter().sum();
    let s11: f64 = p.iter().zip(&w1).map(|(pi, wi)| pi * wi).sum();
    let det = s00 * s11 - s01 * s10;
    if det.abs() < 1e-300 {
        return vec![uniform; partition.len()];
    }
    let alpha = (spec.target(0) * s11 - s01 * spec.target(1)) / det;
    let beta = (s00 * spec.target(1) - spec.target(0) * s10) / det;
    let tilt: Vec<f64> = p.iter().map(|pi| alpha + beta * pi).collect();
    if tilt.iter().any(|v| *v < 0.0) {
        vec![uniform; partition.len()]
    } else {
        tilt
    }
}

/// The kernel form of an instance: path-length objective with its analytic
/// gradient and Hessian diagonal, norm-scaled linear moment constraints,
/// and nonnegativity bounds. Exposed so optimality certificates
/// ([`crate::optimize::kkt_residuals`],
/// [`crate::optimize::projected_hessian_min_eigenvalue`]) can be evaluated
/// against the exact problem the solver saw.
pub fn kernel_problem(problem: &SpdProblem) -> ObjectiveProblem {
    let n = problem.partition.len();
    let delta = problem.partition.cell_width();
    let objective =
        move |f: &[f64]| -> f64 { delta * f.iter().map(|v| (1.0 + v * v).sqrt()).sum::<f64>() };
    let gradient = move |f: &[f64]| -> Vec<f64> {
        f.iter().map(|v| delta * v / (1.0 + v * v).sqrt()).collect()
    };
    let hessian_diagonal = move |f: &[f64]| -> Vec<f64> {
        f.iter().map(|v| delta / (1.0 + v * v).powf(1.5)).collect()
    };
    ObjectiveProblem::new(
        n,
        objective,
        normalized_constraints(&problem.partition, &problem.spec),
        Bounds::nonnegative(n),
    )
    .with_gradient(gradient)
    .with_hessian_diagonal(hessian_diagonal)
}

/// Solve the discretized shortest-path-distribution problem.
///
/// `converged` additionally requires every achieved raw moment to be within
/// `config.eq_tol` of its target; a solve that satisfies only the kernel's
/// normalized tolerance is reported unconverged.
pub fn solve_spd(problem: &SpdProblem, config: &SolverConfig) -> Result<SolveReport> {
    solve_spd_from(problem, None, config)
}

/// [`solve_spd`] with an explicit starting density (used by refinement and
/// multistart drivers).
pub fn solve_spd_from(
    problem: &SpdProblem,
    initial: Option<Vec<f64>>,
    config: &SolverConfig,
) -> Result<SolveReport> {
    let n = problem.partition.len();
    let m = problem.spec.order();
    if n < m + 2 {
        return Err(Error::TooFewCells {
            n,
            needed: m + 2,
            constraints: m + 1,
        });
    }

    let kernel_problem = kernel_problem(problem);

    let start = match initial {
        Some(v) => {
            assert_eq!(v.len(), n);
            v
        }
        None => warm_start(&problem.partition, &problem.spec),
    };

    let (values, mut diagnostics) = minimize_auglag(&kernel_problem, &start, config)?;
    let density = PiecewiseDensity::new(problem.partition.clone(), values)?;
    let report_converged = diagnostics.converged;
    let mut report = SolveReport::from_density(density, &problem.spec, diagnostics.clone());
    if report_converged && report.max_moment_error(&problem.spec) > config.eq_tol {
        diagnostics.converged = false;
        report.diagnostics = diagnostics;
    }
    Ok(report)
}

/// Piecewise-constant prolongation of density values onto a finer grid of
/// the same interval.
fn prolong(coarse: &PiecewiseDensity, fine: &Partition) -> Vec<f64> {
    fine.midpoints()
        .iter()
        .map(|&x| {
            let i = coarse.partition().cell_of(x).expect("same interval");
            coarse.values()[i]
        })
        .collect()
}

/// Solve on a sequence of grids, warm-starting each stage from the previous
/// solution.
pub fn refine_solve(
    interval: crate::density::Interval,
    spec: &MomentSpec,
    n_schedule: &[usize],
    config: &SolverConfig,
) -> Result<Vec<SolveReport>> {
    if n_schedule.windows(2).any(|w| w[0] >= w[1]) || n_schedule.is_empty() {
        return Err(Error::BadSchedule);
    }
    let mut reports = Vec::with_capacity(n_schedule.len());
    let mut previous: Option<PiecewiseDensity> = None;
    for &n in n_schedule {
        let partition = Partition::new(interval, n)?;
        let problem = SpdProblem::new(partition.clone(), spec.clone())?;
        let start = previous.as_ref().map(|d| prolong(d, &partition));
        let report = solve_spd_from(&problem, start, config)?;
        previous = Some(report.density.clone());
        reports.push(report);
    }
    Ok(reports)
}

/// Least-change correction of `values` onto the affine set of exact
/// moment targets, alternated with clipping to nonnegativity until both
/// hold tightly. Used to build feasible trial densities.
pub fn project_to_moments(
    partition: &Partition,
    spec: &MomentSpec,
    values: &[f64],
) -> Result<Vec<f64>> {
    const MAX_ROUNDS: usize = 50_000;
    const TOL: f64 = 1e-12;

    let m1 = spec.order() + 1;
    let weights: Vec<Vec<f64>> = (0..=spec.order() as u32)
        .map(|k| {
            let mut w = partition.moment_weights(k);
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in w.iter_mut() {
                *v /= norm;
            }
            w
        })
        .collect();
    let rhs: Vec<f64> = (0..m1)
        .map(|k| {
            let norm = partition
                .moment_weights(k as u32)
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt();
            spec.target(k) / norm
        })
        .collect();

    // Gram matrix of the normalized weight rows
    let mut gram = vec![vec![0.0; m1]; m1];
    for i in 0..m1 {
        for j in 0..m1 {
            gram[i][j] = weights[i].iter().zip(&weights[j]).map(|(a, b)| a * b).sum();
        }
    }

    let mut x = values.to_vec();
    for _ in 0..MAX_ROUNDS {
        // affine projection: x -= W^T (W W^T)^{-1} (W x - mu)
        let resid: Vec<f64> = (0..m1)
            .map(|k| weights[k].iter().zip(&x).map(|(w, v)| w * v).sum::<f64>() - rhs[k])
            .collect();
        let gamma = solve_small(&gram, &resid);
        for (i, xi) in x.iter_mut().enumerate() {
            let corr: f64 = (0..m1).map(|k| gamma[k] * weights[k][i]).sum();
            *xi -= corr;
        }
        // clip, then test both memberships
        let mut clip_change = 0.0f64;
        for xi in x.iter_mut() {
            if *xi < 0.0 {
                clip_change = clip_change.max(-*xi);
                *xi = 0.0;
            }
        }
        let viol = (0..m1)
            .map(|k| (weights[k].iter().zip(&x).map(|(w, v)| w * v).sum::<f64>() - rhs[k]).abs())
            .fold(0.0f64, f64::max);
        if clip_change <= TOL && viol <= TOL {
            return Ok(x);
        }
    }
    Err(Error::ProjectionFailure {
        iterations: MAX_ROUNDS,
    })
}

/// Draw a random feasible density: i.i.d. uniform cell values projected to
/// the moment constraints and renonnegativized until both hold.
pub fn sample_feasible_density<R: Rng>(
    partition: &Partition,
    spec: &MomentSpec,
    rng: &mut R,
) -> Result<PiecewiseDensity> {
    let scale = 2.0 / partition.interval().width();
    let raw: Vec<f64> = (0..partition.len())
        .map(|_| rng.gen::<f64>() * scale)
        .collect();
    let values = project_to_moments(partition, spec, &raw)?;
    PiecewiseDensity::new(partition.clone(), values)
}

/// Gaussian elimination with partial pivoting for the small Gram systems.
fn solve_small(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let pivot_row = m[col].clone();
        let d = pivot_row[col];
        for row in (col + 1)..n {
            let factor = m[row][col] / d;
            for (mk, pk) in m[row].iter_mut().zip(&pivot_row).skip(col) {
                *mk -= factor * pk;
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    x
}
