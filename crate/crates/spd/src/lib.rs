//! Shortest-path distributions.
//!
//! Among all densities on a finite interval, the uniform one gives the CDF
//! whose graph is the shortest curve from `(a, 0)` to `(b, 1)`. Fixing raw
//! moments and asking for the density whose CDF path is shortest subject to
//! those constraints defines the *shortest path distribution* (SPD); the
//! ratio of the straight-line length to a CDF's arc length is a *uniformity
//! index* in `(1/sqrt(2), 1]`. This crate solves those problems and compares
//! the results against moment-matched maximum-entropy baselines.
//!
//! Two solver routes are implemented and cross-checked:
//!
//! - [`solver`]: the direct route; the density value on each grid cell is a
//!   decision variable, minimized under linear moment constraints and
//!   nonnegativity by an augmented-Lagrangian kernel ([`optimize`]).
//! - [`parametric`]: the variational route; stationarity gives the family
//!   `f(x) = P(x)/sqrt(1 - P(x)^2)` with `P` a polynomial in the Lagrange
//!   multipliers, fitted to the moments by least squares.
//!
//! [`reference`] supplies the maximum-entropy baselines (uniform, truncated
//! exponential, scaled Beta, normal) with quadrature-exact path lengths, and
//! [`experiment`] drives the comparison cases, bound sweeps, reports, and
//! SVG overlays behind the `spd` command-line tool.
//!
//! The `examples/` directory is the guided tour: one runnable program per
//! capability (`cargo run --example <name>`).
//!
//! ```
//! use spd::{Interval, MomentSpec, Partition, SolverConfig};
//! use spd::solver::{solve_spd, SpdProblem};
//!
//! // the shortest-path density on [0, 0.1] with mean 0.04
//! let interval = Interval::new(0.0, 0.1)?;
//! let spec = MomentSpec::new(&interval, vec![1.0, 0.04])?;
//! let partition = Partition::new(interval, 100)?;
//! let report = solve_spd(&SpdProblem::new(partition, spec)?, &SolverConfig::default())?;
//!
//! assert!(report.diagnostics.converged);
//! assert!((report.density.raw_moment(1) - 0.04).abs() < 1e-8);
//! assert!((report.path_length - 1.0056).abs() < 1e-3);
//! # Ok::<(), spd::Error>(())
//! ```

pub mod density;
pub mod error;
pub mod experiment;
pub mod optimize;
pub mod parametric;
mod quad;
pub mod reference;
pub mod solver;

pub use density::{Interval, MomentSpec, Partition, PiecewiseDensity};
pub use error::{Error, Result};
pub use experiment::{
    emit_report, run_bound_sweep, run_case, CaseOutcome, CaseSpec, ComparisonRow, ReferenceFamily,
    ReportFormat, RunOptions, SolverChoice,
};
pub use optimize::{
    kkt_residuals, minimize_auglag, Bounds, Constraint, InnerMethod, KktResiduals,
    ObjectiveProblem, SolveDiagnostics, SolverConfig,
};
pub use parametric::{
    feasibility_margin, fit_multipliers, induced_density, initial_multipliers, MultiplierVector,
    ParametricDensity,
};
pub use reference::{ReferenceDistribution, ReferenceKind};
pub use solver::{
    project_to_moments, refine_solve, sample_feasible_density, solve_spd, SolveReport, SpdProblem,
};
