//! The variational route: stationarity of the constrained arc-length
//! functional gives the density family f(x) = P(x)/sqrt(1 - P(x)^2) with
//! P a polynomial in the Lagrange multipliers. Fitting the multipliers by
//! least squares over the feasibility polytope reproduces the direct
//! per-cell solve.
//!
//!     cargo run --example multiplier_route

use spd::optimize::SolverConfig;
use spd::parametric::{feasibility_margin, fit_multipliers, induced_density, initial_multipliers};
use spd::solver::{solve_spd, SpdProblem};
use spd::{Interval, MomentSpec, Partition};

fn main() -> spd::Result<()> {
    let interval = Interval::new(0.0, 0.1)?;
    let partition = Partition::new(interval, 200)?;
    let spec = MomentSpec::new(&interval, vec![1.0, 0.04])?;

    // start from the multipliers of the constant density, strictly inside
    // the polytope 0 <= P(p_j) < 1
    let start = initial_multipliers(spec.order(), &partition);
    println!(
        "start lambdas {:?}, feasibility margin {:.4e}",
        start.lambdas(),
        feasibility_margin(&start, &partition)
    );

    let config = SolverConfig::default();
    let (lambda, diag) = fit_multipliers(&spec, &partition, &start, &config)?;
    println!(
        "fitted lambdas {:?}\n  converged {}  moment residual {:.3e}  ({}, {} inner iterations)",
        lambda.lambdas(),
        diag.converged,
        diag.objective_value.sqrt(),
        diag.method_tag,
        diag.inner_iterations,
    );

    // the induced density against the direct per-cell solve
    let induced = induced_density(&lambda, &partition)?;
    let direct = solve_spd(&SpdProblem::new(partition, spec)?, &config)?;
    let sup = induced
        .values()
        .iter()
        .zip(direct.density.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!(
        "induced vs direct: sup-norm {:.3e}, path lengths {:.9} vs {:.9}",
        sup,
        induced.path_length(),
        direct.path_length,
    );

    println!(
        "\nmultipliers as JSON: {}",
        serde_json::to_string(&lambda).expect("serializes")
    );
    Ok(())
}
