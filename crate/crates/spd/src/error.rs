//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by grid construction, solvers, and reference fitting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval [{a}, {b}]: bounds must be finite with a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid partition: cell count must be at least 1")]
    EmptyPartition,

    #[error("invalid density values: {reason}")]
    InvalidDensity { reason: String },

    #[error("moment targets are not attainable on [{a}, {b}]: {reason}")]
    UnattainableMoments { a: f64, b: f64, reason: String },

    #[error("cdf evaluated at x = {x} outside the support [{a}, {b}]")]
    OutOfSupport { x: f64, a: f64, b: f64 },

    #[error("multiplier polynomial reaches {p} >= 1 at x = {x}: density is singular there")]
    Singularity { x: f64, p: f64 },

    #[error("multiplier polynomial is negative ({p}) at x = {x}: density would be negative")]
    NegativePolynomial { x: f64, p: f64 },

    #[error("initial multipliers are infeasible (margin {margin}): start inside the polytope")]
    InfeasibleInitial { margin: f64 },

    #[error("problem needs at least {needed} cells for {constraints} constraints, got {n}")]
    TooFewCells {
        n: usize,
        needed: usize,
        constraints: usize,
    },

    #[error("objective returned a non-finite value {value} at {point:?}")]
    NonFiniteObjective { value: f64, point: Vec<f64> },

    #[error("reference distribution is infeasible: {reason}")]
    InfeasibleReference { reason: String },

    #[error("operation not supported for this reference kind: {reason}")]
    UnsupportedReference { reason: String },

    #[error("partition interval [{pa}, {pb}] does not match distribution support [{da}, {db}]")]
    IntervalMismatch { pa: f64, pb: f64, da: f64, db: f64 },

    #[error("quadrature failed to reach the requested tolerance {tol} (estimate {estimate})")]
    QuadratureFailure { tol: f64, estimate: f64 },

    #[error("refinement schedule must be strictly increasing")]
    BadSchedule,

    #[error("sweep interval [{a}, {b}] does not contain the base interval")]
    BadSweepInterval { a: f64, b: f64 },

    #[error("malformed density CSV: {reason}")]
    MalformedCsv { reason: String },

    #[error("feasible-point projection did not converge after {iterations} iterations")]
    ProjectionFailure { iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
