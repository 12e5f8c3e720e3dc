//! The constrained-minimization kernel on its own: build a problem, solve
//! it, verify the first-order KKT residuals and the second-order projected
//! Hessian condition, and inspect the outer-iteration merit trace.
//!
//!     cargo run --example solver_diagnostics

use spd::optimize::{
    kkt_residuals, minimize_auglag, projected_hessian_min_eigenvalue, Bounds, Constraint,
    ObjectiveProblem, SolverConfig,
};

fn main() -> spd::Result<()> {
    // minimize sum sqrt(1 + x_i^2) over x >= 0 with sum(x_i) = 4 and a
    // weighted first-moment constraint; a small instance of the arc-length
    // family the library solves at scale
    let n = 16;
    let problem = ObjectiveProblem::new(
        n,
        |x: &[f64]| x.iter().map(|v| (1.0 + v * v).sqrt()).sum(),
        vec![
            Constraint::linear(vec![1.0; n], 4.0),
            Constraint::linear((0..n).map(|i| i as f64 / n as f64).collect(), 1.2),
        ],
        Bounds::nonnegative(n),
    )
    .with_gradient(|x: &[f64]| x.iter().map(|v| v / (1.0 + v * v).sqrt()).collect())
    .with_hessian_diagonal(|x: &[f64]| x.iter().map(|v| 1.0 / (1.0 + v * v).powf(1.5)).collect());

    let config = SolverConfig::default();
    let (x, diagnostics) = minimize_auglag(&problem, &vec![0.25; n], &config)?;

    println!("solution: {x:.4?}");
    println!(
        "converged {} in {} outer / {} inner iterations, objective {:.9}",
        diagnostics.converged,
        diagnostics.iterations,
        diagnostics.inner_iterations,
        diagnostics.objective_value
    );

    let residuals = kkt_residuals(&problem, &x, &diagnostics.multipliers);
    println!(
        "KKT residuals: stationarity {:.2e}, feasibility {:.2e}, complementarity {:.2e}",
        residuals.stationarity, residuals.feasibility, residuals.complementarity
    );

    let min_eig = projected_hessian_min_eigenvalue(&problem, &x, &diagnostics.multipliers);
    println!(
        "projected Hessian minimum eigenvalue {min_eig:.3e} (second-order condition wants >= -1e-4)"
    );

    println!("\nouter-iteration merit trace (what --trace writes):");
    println!("outer  penalty      merit_start       merit_end         max_violation");
    for t in &diagnostics.trace {
        println!(
            "{:>5}  {:>8.1}  {:>16.12}  {:>16.12}  {:.3e}",
            t.outer, t.penalty, t.merit_start, t.merit_end, t.max_violation
        );
    }
    Ok(())
}
