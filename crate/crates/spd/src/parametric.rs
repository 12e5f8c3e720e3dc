//! The multiplier-parameterized density family: a polynomial
//! `P(x) = sum_i lambda_i x^i` induces the density
//! `f(x) = P(x) / sqrt(1 - P(x)^2)` wherever `0 <= P(x) < 1`. Fitting the
//! multipliers to moment targets by least squares is the low-dimensional
//! alternative to the direct per-cell solve, and the two routes are checked
//! against each other in the test suites.

use serde::{Deserialize, Serialize};

use crate::density::{MomentSpec, Partition, PiecewiseDensity};
use crate::error::{Error, Result};
use crate::optimize::{
    minimize_auglag, Bounds, InnerMethod, ObjectiveProblem, SolveDiagnostics, SolverConfig,
};

/// Numerical margin below 1 that closes the open constraint `P(x) < 1`.
/// Densities stay below roughly `1/sqrt(2 eps)` inside the closed region.
pub const EPS_FEAS: f64 = 1e-6;

/// Moment residual at which a multiplier fit counts as converged:
/// `sqrt(sum_k M_k^2) <= MOMENT_FIT_TOL`.
pub const MOMENT_FIT_TOL: f64 = 1e-6;

const HINGE_WEIGHT: f64 = 1e4;

/// Lagrange multipliers `lambda_0..lambda_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MultiplierRepr", into = "MultiplierRepr")]
pub struct MultiplierVector {
    lambdas: Vec<f64>,
}

/// Wire format: `{m, lambdas}`.
#[derive(Serialize, Deserialize)]
struct MultiplierRepr {
    m: usize,
    lambdas: Vec<f64>,
}

impl TryFrom<MultiplierRepr> for MultiplierVector {
    type Error = Error;
    fn try_from(r: MultiplierRepr) -> Result<Self> {
        if r.lambdas.len() != r.m + 1 {
            return Err(Error::InvalidDensity {
                reason: format!(
                    "multiplier vector of order {} must have {} entries, got {}",
                    r.m,
                    r.m + 1,
                    r.lambdas.len()
                ),
            });
        }
        Ok(MultiplierVector { lambdas: r.lambdas })
    }
}

impl From<MultiplierVector> for MultiplierRepr {
    fn from(v: MultiplierVector) -> Self {
        MultiplierRepr {
            m: v.order(),
            lambdas: v.lambdas,
        }
    }
}

impl MultiplierVector {
    pub fn new(lambdas: Vec<f64>) -> Self {
        assert!(!lambdas.is_empty());
        Self { lambdas }
    }

    pub fn order(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Horner evaluation of `P(x)`.
    pub fn polynomial_at(&self, x: f64) -> f64 {
        self.lambdas.iter().rev().fold(0.0, |acc, l| acc * x + l)
    }
}

/// The polynomial value that induces a given density value:
/// the inverse of `p -> p / sqrt(1 - p^2)` on `[0, 1)`.
pub fn polynomial_for_density(value: f64) -> f64 {
    value / (1.0 + value * value).sqrt()
}

/// Multipliers for the constant density `1/(b-a)`: the order-`m` fit's
/// canonical starting point, strictly inside the feasible polytope.
pub fn initial_multipliers(order: usize, partition: &Partition) -> MultiplierVector {
    let mut lambdas = vec![0.0; order + 1];
    lambdas[0] = polynomial_for_density(1.0 / partition.interval().width());
    MultiplierVector::new(lambdas)
}

/// A density determined by multipliers on an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricDensity {
    multipliers: MultiplierVector,
    interval: crate::density::Interval,
}

impl ParametricDensity {
    pub fn new(multipliers: MultiplierVector, interval: crate::density::Interval) -> Self {
        Self {
            multipliers,
            interval,
        }
    }

    pub fn multipliers(&self) -> &MultiplierVector {
        &self.multipliers
    }

    /// `f(x) = P(x)/sqrt(1 - P(x)^2)`; errors where the polynomial leaves
    /// `[0, 1)`, identifying the offending point.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let p = self.multipliers.polynomial_at(x);
        if p >= 1.0 {
            return Err(Error::Singularity { x, p });
        }
        if p < 0.0 {
            return Err(Error::NegativePolynomial { x, p });
        }
        Ok(p / (1.0 - p * p).sqrt())
    }
}

/// Minimum over midpoints of `min(P(p_j), 1 - EPS_FEAS - P(p_j))`:
/// nonnegative exactly when the multipliers are feasible on the grid.
pub fn feasibility_margin(multipliers: &MultiplierVector, partition: &Partition) -> f64 {
    partition
        .midpoints()
        .iter()
        .map(|&p| {
            let v = multipliers.polynomial_at(p);
            v.min(1.0 - EPS_FEAS - v)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Sample the parametric density at the grid midpoints. Propagates the
/// singularity/negativity errors of [`ParametricDensity::eval`] for
/// infeasible multipliers.
pub fn induced_density(
    multipliers: &MultiplierVector,
    partition: &Partition,
) -> Result<PiecewiseDensity> {
    let dens = ParametricDensity::new(multipliers.clone(), *partition.interval());
    let values = partition
        .midpoints()
        .iter()
        .map(|&p| dens.eval(p))
        .collect::<Result<Vec<f64>>>()?;
    PiecewiseDensity::new(partition.clone(), values)
}

/// Squared-residual objective of the least-squares multiplier fit, with the
/// polytope enforced by clamping plus quadratic hinge penalties at every
/// midpoint.
struct FitObjective {
    weights: Vec<Vec<f64>>, // weights[k][j]
    targets: Vec<f64>,
    midpoints: Vec<f64>,
}

impl FitObjective {
    fn new(spec: &MomentSpec, partition: &Partition) -> Self {
        let weights = (0..=spec.order() as u32)
            .map(|k| partition.moment_weights(k))
            .collect();
        Self {
            weights,
            targets: spec.targets().to_vec(),
            midpoints: partition.midpoints().to_vec(),
        }
    }

    fn moment_residuals(&self, lambdas: &[f64]) -> Vec<f64> {
        let ceiling = 1.0 - EPS_FEAS;
        let mut residuals: Vec<f64> = self.targets.iter().map(|t| -t).collect();
        for (j, &x) in self.midpoints.iter().enumerate() {
            let p = lambdas.iter().rev().fold(0.0, |acc, l| acc * x + l);
            let clamped = p.clamp(0.0, ceiling);
            let f = clamped / (1.0 - clamped * clamped).sqrt();
            for (k, r) in residuals.iter_mut().enumerate() {
                *r += f * self.weights[k][j];
            }
        }
        residuals
    }

    fn hinge_penalty(&self, lambdas: &[f64]) -> f64 {
        let ceiling = 1.0 - EPS_FEAS;
        self.midpoints
            .iter()
            .map(|&x| {
                let p = lambdas.iter().rev().fold(0.0, |acc, l| acc * x + l);
                let below = (-p).max(0.0);
                let above = (p - ceiling).max(0.0);
                below * below + above * above
            })
            .sum::<f64>()
            * HINGE_WEIGHT
    }

    fn value(&self, lambdas: &[f64]) -> f64 {
        let ssq: f64 = self.moment_residuals(lambdas).iter().map(|r| r * r).sum();
        ssq + self.hinge_penalty(lambdas)
    }
}

/// Fit multipliers so the induced grid density matches the moment targets,
/// by least squares over the feasible polytope.
///
/// Nelder-Mead does the global work on this low-dimensional objective; if
/// the residual is not yet at fitting accuracy a quasi-Newton polish runs
/// from the simplex result. `converged` in the diagnostics means
/// `sqrt(objective) <= MOMENT_FIT_TOL` with a feasible final point;
/// everything else is reported, not hidden.
pub fn fit_multipliers(
    spec: &MomentSpec,
    partition: &Partition,
    initial: &MultiplierVector,
    config: &SolverConfig,
) -> Result<(MultiplierVector, SolveDiagnostics)> {
    if initial.order() != spec.order() {
        return Err(Error::InvalidDensity {
            reason: format!(
                "initial multipliers have order {}, spec has order {}",
                initial.order(),
                spec.order()
            ),
        });
    }
    let margin = feasibility_margin(initial, partition);
    if margin < 0.0 {
        return Err(Error::InfeasibleInitial { margin });
    }

    let dim = spec.order() + 1;
    let objective = FitObjective::new(spec, partition);

    let make_problem = || {
        let weights = objective.weights.clone();
        let targets = objective.targets.clone();
        let midpoints = objective.midpoints.clone();
        let obj = FitObjective {
            weights,
            targets,
            midpoints,
        };
        ObjectiveProblem::new(
            dim,
            move |l: &[f64]| obj.value(l),
            vec![],
            Bounds::unbounded(dim),
        )
    };

    let nm_config = SolverConfig {
        inner_method: InnerMethod::NelderMead,
        max_inner: 20_000,
        ..config.clone()
    };
    let (mut lambdas, mut diagnostics) =
        minimize_auglag(&make_problem(), initial.lambdas(), &nm_config)?;
    diagnostics.method_tag = "fit/nelder-mead".into();

    let fit_target = MOMENT_FIT_TOL * MOMENT_FIT_TOL;
    if diagnostics.objective_value > fit_target {
        let qn_config = SolverConfig {
            inner_method: InnerMethod::ProjectedQuasiNewton,
            max_inner: 20_000,
            ..config.clone()
        };
        let (polished, polish_diag) = minimize_auglag(&make_problem(), &lambdas, &qn_config)?;
        if polish_diag.objective_value < diagnostics.objective_value {
            lambdas = polished;
            diagnostics.inner_iterations += polish_diag.inner_iterations;
            diagnostics.objective_value = polish_diag.objective_value;
            diagnostics.kkt_stationarity_residual = polish_diag.kkt_stationarity_residual;
            diagnostics.method_tag = "fit/nelder-mead+quasi-newton-polish".into();
            diagnostics.trace.extend(polish_diag.trace);
        }
    }

    let result = MultiplierVector::new(lambdas);
    let residuals = objective.moment_residuals(result.lambdas());
    let ssq: f64 = residuals.iter().map(|r| r * r).sum();
    diagnostics.objective_value = ssq;
    diagnostics.max_equality_violation = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    diagnostics.converged =
        ssq.sqrt() <= MOMENT_FIT_TOL && feasibility_margin(&result, partition) >= 0.0;
    Ok((result, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Interval;
    use proptest::prelude::*;

    fn part(a: f64, b: f64, n: usize) -> Partition {
        Partition::new(Interval::new(a, b).unwrap(), n).unwrap()
    }

    #[test]
    fn constant_polynomial_evaluates_directly() {
        let d = ParametricDensity::new(
            MultiplierVector::new(vec![0.5]),
            Interval::new(0.0, 1.0).unwrap(),
        );
        assert!((d.eval(0.3).unwrap() - 0.5 / 0.75f64.sqrt()).abs() < 1e-12);

        let zero = ParametricDensity::new(
            MultiplierVector::new(vec![0.0, 0.0]),
            Interval::new(0.0, 1.0).unwrap(),
        );
        assert_eq!(zero.eval(0.7).unwrap(), 0.0);
    }

    #[test]
    fn eval_errors_identify_the_point() {
        let d = ParametricDensity::new(
            MultiplierVector::new(vec![1.5]),
            Interval::new(0.0, 1.0).unwrap(),
        );
        match d.eval(0.25) {
            Err(Error::Singularity { x, .. }) => assert_eq!(x, 0.25),
            other => panic!("expected singularity, got {other:?}"),
        }
        let d = ParametricDensity::new(
            MultiplierVector::new(vec![-0.2]),
            Interval::new(0.0, 1.0).unwrap(),
        );
        assert!(matches!(d.eval(0.5), Err(Error::NegativePolynomial { .. })));
    }

    #[test]
    fn margin_matches_hand_values() {
        let p = part(0.0, 1.0, 8);
        let m = feasibility_margin(&MultiplierVector::new(vec![0.5]), &p);
        assert!((m - (0.5 - EPS_FEAS)).abs() < 1e-12);

        let m = feasibility_margin(&MultiplierVector::new(vec![1.5]), &p);
        assert!(m < 0.0);

        // linear polynomial 10x on [0, 0.1] with 10 cells: largest midpoint 0.095
        let p = part(0.0, 0.1, 10);
        let m = feasibility_margin(&MultiplierVector::new(vec![0.0, 10.0]), &p);
        assert!((m - (1.0 - EPS_FEAS - 0.95)).abs() < 1e-12);
    }

    #[test]
    fn induced_density_of_constant_multiplier() {
        let p = part(0.0, 1.0, 4);
        let lambda = MultiplierVector::new(vec![std::f64::consts::FRAC_1_SQRT_2]);
        let d = induced_density(&lambda, &p).unwrap();
        for v in d.values() {
            assert!((v - 1.0).abs() < 1e-12);
        }

        let zeros = MultiplierVector::new(vec![0.0]);
        let d = induced_density(&zeros, &p).unwrap();
        assert_eq!(d.raw_moment(0), 0.0);
    }

    #[test]
    fn infeasible_multipliers_propagate_errors() {
        let p = part(0.0, 1.0, 4);
        let lambda = MultiplierVector::new(vec![1.5]);
        assert!(matches!(
            induced_density(&lambda, &p),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn order_zero_fit_recovers_the_uniform_density() {
        let p = part(0.0, 1.0, 50);
        let iv = *p.interval();
        let spec = MomentSpec::new(&iv, vec![1.0]).unwrap();
        let init = initial_multipliers(0, &p);
        let (lambda, diag) = fit_multipliers(&spec, &p, &init, &SolverConfig::default()).unwrap();
        assert!(diag.converged, "{diag:?}");
        assert!((lambda.lambdas()[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-7);
        let d = induced_density(&lambda, &p).unwrap();
        for v in d.values() {
            assert!((v - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn infeasible_start_is_an_argument_error() {
        let p = part(0.0, 1.0, 10);
        let iv = *p.interval();
        let spec = MomentSpec::new(&iv, vec![1.0]).unwrap();
        let bad = MultiplierVector::new(vec![1.2]);
        assert!(matches!(
            fit_multipliers(&spec, &p, &bad, &SolverConfig::default()),
            Err(Error::InfeasibleInitial { .. })
        ));
    }

    #[test]
    fn multiplier_json_round_trip() {
        let v = MultiplierVector::new(vec![0.3, -0.1]);
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("\"m\":1"));
        let back: MultiplierVector = serde_json::from_str(&text).unwrap();
        assert_eq!(v, back);
        assert!(serde_json::from_str::<MultiplierVector>("{\"m\":2,\"lambdas\":[0.1]}").is_err());
    }

    proptest! {
        // the map v -> v/sqrt(1+v^2) inverts the density formula on [0, 1);
        // the relative error of the round trip is eps * v^2 / 2 (the storage
        // precision of P near 1), so the 1e-12 identity holds for v <= ~90
        #[test]
        fn polynomial_density_inversion_round_trips(v in 0.0f64..50.0) {
            let p = polynomial_for_density(v);
            prop_assert!((0.0..1.0).contains(&p));
            let d = ParametricDensity::new(
                MultiplierVector::new(vec![p]),
                Interval::new(0.0, 1.0).unwrap(),
            );
            let back = d.eval(0.5).unwrap();
            let scale = v.abs().max(1e-12);
            prop_assert!((back - v).abs() / scale <= 1e-12);
        }

        // eval is strictly increasing in the polynomial value
        #[test]
        fn eval_monotone_in_polynomial(p1 in 0.0f64..0.999, p2 in 0.0f64..0.999) {
            prop_assume!(p1 != p2);
            let (lo, hi) = if p1 < p2 { (p1, p2) } else { (p2, p1) };
            let f = |p: f64| p / (1.0 - p * p).sqrt();
            prop_assert!(f(lo) < f(hi));
        }
    }
}
