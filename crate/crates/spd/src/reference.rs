//! Moment-matched maximum-entropy reference distributions and exact
//! quadrature of their CDF path lengths. These are the comparison baselines:
//! uniform (mass only), truncated exponential (fixed mean), scaled Beta
//! (fixed mean and variance), and the normal (shape overlay only, no path
//! length on an unbounded support).

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, Continuous, Normal};

use crate::density::{Interval, Partition, PiecewiseDensity};
use crate::error::{Error, Result};
use crate::quad;

/// Default absolute quadrature tolerance for path lengths.
pub const PATH_LENGTH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceKind {
    Uniform,
    /// `rate e^(-rate x) / (1 - e^(-rate b))` on `[0, b]`; rate 0 is the
    /// uniform limit and negative rates tilt the mass rightward.
    TruncatedExponential {
        rate: f64,
    },
    /// Beta(alpha, beta) affinely mapped onto the interval.
    ScaledBeta {
        alpha: f64,
        beta: f64,
    },
    /// Unbounded; density evaluation only.
    Normal {
        mean: f64,
        variance: f64,
    },
}

/// A reference distribution, bounded except for the normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ReferenceRepr", into = "ReferenceRepr")]
pub struct ReferenceDistribution {
    kind: ReferenceKind,
    support: Option<Interval>,
}

/// Wire format: `{kind, a, b, params}` with `a`/`b` null for the normal.
#[derive(Serialize, Deserialize)]
struct ReferenceRepr {
    kind: String,
    a: Option<f64>,
    b: Option<f64>,
    params: Vec<f64>,
}

impl TryFrom<ReferenceRepr> for ReferenceDistribution {
    type Error = Error;
    fn try_from(r: ReferenceRepr) -> Result<Self> {
        let bounded = |a: Option<f64>, b: Option<f64>| -> Result<Interval> {
            match (a, b) {
                (Some(a), Some(b)) => Interval::new(a, b),
                _ => Err(Error::InfeasibleReference {
                    reason: format!("kind {:?} requires bounds", r.kind),
                }),
            }
        };
        match r.kind.as_str() {
            "uniform" => Ok(Self {
                kind: ReferenceKind::Uniform,
                support: Some(bounded(r.a, r.b)?),
            }),
            "truncated_exponential" => {
                if r.params.len() != 1 {
                    return Err(Error::InfeasibleReference {
                        reason: "truncated_exponential takes one parameter".into(),
                    });
                }
                Ok(Self {
                    kind: ReferenceKind::TruncatedExponential { rate: r.params[0] },
                    support: Some(bounded(r.a, r.b)?),
                })
            }
            "scaled_beta" => {
                if r.params.len() != 2 || r.params.iter().any(|p| *p <= 0.0) {
                    return Err(Error::InfeasibleReference {
                        reason: "scaled_beta takes two positive parameters".into(),
                    });
                }
                Ok(Self {
                    kind: ReferenceKind::ScaledBeta {
                        alpha: r.params[0],
                        beta: r.params[1],
                    },
                    support: Some(bounded(r.a, r.b)?),
                })
            }
            "normal" => {
                if r.params.len() != 2 || r.params[1] <= 0.0 {
                    return Err(Error::InfeasibleReference {
                        reason: "normal takes mean and positive variance".into(),
                    });
                }
                Ok(Self {
                    kind: ReferenceKind::Normal {
                        mean: r.params[0],
                        variance: r.params[1],
                    },
                    support: None,
                })
            }
            other => Err(Error::InfeasibleReference {
                reason: format!("unknown kind {other:?}"),
            }),
        }
    }
}

impl From<ReferenceDistribution> for ReferenceRepr {
    fn from(d: ReferenceDistribution) -> Self {
        let (a, b) = match d.support {
            Some(iv) => (Some(iv.lower()), Some(iv.upper())),
            None => (None, None),
        };
        let (kind, params) = match d.kind {
            ReferenceKind::Uniform => ("uniform", vec![]),
            ReferenceKind::TruncatedExponential { rate } => ("truncated_exponential", vec![rate]),
            ReferenceKind::ScaledBeta { alpha, beta } => ("scaled_beta", vec![alpha, beta]),
            ReferenceKind::Normal { mean, variance } => ("normal", vec![mean, variance]),
        };
        ReferenceRepr {
            kind: kind.into(),
            a,
            b,
            params,
        }
    }
}

/// Mean of the truncated exponential with the given rate on `[0, b]`.
/// A series expansion takes over near rate zero where the closed form
/// cancels catastrophically.
pub fn truncated_exponential_mean(rate: f64, b: f64) -> f64 {
    let u = rate * b;
    if u.abs() < 1e-4 {
        b / 2.0 - rate * b * b / 12.0 + rate.powi(3) * b.powi(4) / 720.0
    } else {
        1.0 / rate - b / u.exp_m1()
    }
}

impl ReferenceDistribution {
    pub fn uniform(interval: Interval) -> Self {
        Self {
            kind: ReferenceKind::Uniform,
            support: Some(interval),
        }
    }

    pub fn normal(mean: f64, variance: f64) -> Result<Self> {
        if variance.is_nan() || variance <= 0.0 {
            return Err(Error::InfeasibleReference {
                reason: format!("variance must be positive, got {variance}"),
            });
        }
        Ok(Self {
            kind: ReferenceKind::Normal { mean, variance },
            support: None,
        })
    }

    /// Truncated exponential on `[0, b]` whose mean matches the target, the
    /// rate found by safeguarded bisection on the monotone mean-of-rate map.
    pub fn match_truncated_exponential(interval: Interval, mean: f64) -> Result<Self> {
        if interval.lower() != 0.0 {
            return Err(Error::InfeasibleReference {
                reason: format!(
                    "truncated exponential needs lower bound 0, got {}",
                    interval.lower()
                ),
            });
        }
        let b = interval.upper();
        if !(mean > 0.0 && mean < b) {
            return Err(Error::InfeasibleReference {
                reason: format!("mean {mean} outside (0, {b})"),
            });
        }
        if mean == b / 2.0 {
            return Ok(Self {
                kind: ReferenceKind::TruncatedExponential { rate: 0.0 },
                support: Some(interval),
            });
        }

        // mean is strictly decreasing in the rate
        let (mut lo, mut hi) = (-1e4f64, 1e4f64);
        if mean > truncated_exponential_mean(lo, b) || mean < truncated_exponential_mean(hi, b) {
            return Err(Error::InfeasibleReference {
                reason: format!("mean {mean} outside the bisection bracket on [0, {b}]"),
            });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if truncated_exponential_mean(mid, b) >= mean {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * lo.abs().max(1.0) {
                break;
            }
        }
        let rate = 0.5 * (lo + hi);
        Ok(Self {
            kind: ReferenceKind::TruncatedExponential { rate },
            support: Some(interval),
        })
    }

    /// Beta on the interval with the given mean and variance, via the
    /// standard moment inversion on the unit interval.
    pub fn match_scaled_beta(interval: Interval, mean: f64, variance: f64) -> Result<Self> {
        let (a, b) = (interval.lower(), interval.upper());
        if !(mean > a && mean < b) {
            return Err(Error::InfeasibleReference {
                reason: format!("mean {mean} outside ({a}, {b})"),
            });
        }
        let max_var = (mean - a) * (b - mean);
        if !(variance > 0.0 && variance < max_var) {
            return Err(Error::InfeasibleReference {
                reason: format!("variance {variance} outside (0, {max_var})"),
            });
        }
        let w = interval.width();
        let m = (mean - a) / w;
        let v = variance / (w * w);
        let nu = m * (1.0 - m) / v - 1.0;
        let alpha = m * nu;
        let beta = (1.0 - m) * nu;
        Ok(Self {
            kind: ReferenceKind::ScaledBeta { alpha, beta },
            support: Some(interval),
        })
    }

    pub fn kind(&self) -> &ReferenceKind {
        &self.kind
    }

    pub fn support(&self) -> Option<&Interval> {
        self.support.as_ref()
    }

    /// Density at `x`; zero outside a bounded support.
    pub fn density_at(&self, x: f64) -> f64 {
        match (&self.kind, &self.support) {
            (ReferenceKind::Uniform, Some(iv)) => {
                if iv.contains(x) {
                    1.0 / iv.width()
                } else {
                    0.0
                }
            }
            (ReferenceKind::TruncatedExponential { rate }, Some(iv)) => {
                if !iv.contains(x) {
                    return 0.0;
                }
                let b = iv.upper();
                if rate.abs() * b < 1e-12 {
                    return 1.0 / b;
                }
                rate * (-rate * x).exp() / (-(-rate * b).exp_m1())
            }
            (ReferenceKind::ScaledBeta { alpha, beta }, Some(iv)) => {
                if !iv.contains(x) {
                    return 0.0;
                }
                let y = (x - iv.lower()) / iv.width();
                let dist = Beta::new(*alpha, *beta).expect("validated shapes");
                dist.pdf(y) / iv.width()
            }
            (ReferenceKind::Normal { mean, variance }, _) => {
                let dist = Normal::new(*mean, variance.sqrt()).expect("validated parameters");
                dist.pdf(x)
            }
            _ => unreachable!("bounded kinds always carry a support"),
        }
    }

    /// Mean of the distribution, in closed form.
    pub fn mean(&self) -> f64 {
        match (&self.kind, &self.support) {
            (ReferenceKind::Uniform, Some(iv)) => iv.midpoint(),
            (ReferenceKind::TruncatedExponential { rate }, Some(iv)) => {
                truncated_exponential_mean(*rate, iv.upper())
            }
            (ReferenceKind::ScaledBeta { alpha, beta }, Some(iv)) => {
                iv.lower() + iv.width() * alpha / (alpha + beta)
            }
            (ReferenceKind::Normal { mean, .. }, _) => *mean,
            _ => unreachable!(),
        }
    }

    /// Variance, in closed form where available (not for the truncated
    /// exponential, which is matched on its mean only).
    pub fn variance(&self) -> Option<f64> {
        match (&self.kind, &self.support) {
            (ReferenceKind::Uniform, Some(iv)) => Some(iv.width() * iv.width() / 12.0),
            (ReferenceKind::ScaledBeta { alpha, beta }, Some(iv)) => {
                let s = alpha + beta;
                Some(iv.width() * iv.width() * alpha * beta / (s * s * (s + 1.0)))
            }
            (ReferenceKind::Normal { variance, .. }, _) => Some(*variance),
            _ => None,
        }
    }

    /// CDF arc length by adaptive quadrature at the default tolerance.
    pub fn path_length(&self) -> Result<f64> {
        self.path_length_with_tol(PATH_LENGTH_TOL)
    }

    /// CDF arc length to an explicit absolute tolerance. Beta references
    /// with a shape parameter below 1 have integrable endpoint spikes; those
    /// are integrated under the square-root substitution that flattens the
    /// singularity.
    pub fn path_length_with_tol(&self, tol: f64) -> Result<f64> {
        let iv = match (&self.kind, &self.support) {
            (ReferenceKind::Normal { .. }, _) => {
                return Err(Error::UnsupportedReference {
                    reason: "the normal has unbounded support, its CDF path length diverges".into(),
                })
            }
            (_, Some(iv)) => *iv,
            _ => unreachable!(),
        };
        let integrand = |x: f64| {
            let f = self.density_at(x);
            (1.0 + f * f).sqrt()
        };
        let singular = matches!(
            self.kind,
            ReferenceKind::ScaledBeta { alpha, beta } if alpha < 1.0 || beta < 1.0
        );
        if singular {
            // near a singular endpoint sqrt(1+f^2) ~ f ~ (x-a)^(-1/2)
            quad::integrate_endpoint_singular(integrand, iv.lower(), iv.upper(), tol)
        } else {
            quad::integrate(integrand, iv.lower(), iv.upper(), tol)
        }
    }

    /// Sample the density at the grid midpoints. The partition must cover
    /// exactly the distribution's support.
    pub fn discretize_on(&self, partition: &Partition) -> Result<PiecewiseDensity> {
        let iv = self.support.ok_or_else(|| Error::UnsupportedReference {
            reason: "cannot discretize an unbounded reference onto a finite grid".into(),
        })?;
        let p = partition.interval();
        if p.lower() != iv.lower() || p.upper() != iv.upper() {
            return Err(Error::IntervalMismatch {
                pa: p.lower(),
                pb: p.upper(),
                da: iv.lower(),
                db: iv.upper(),
            });
        }
        let values = partition
            .midpoints()
            .iter()
            .map(|&x| self.density_at(x))
            .collect();
        PiecewiseDensity::new(partition.clone(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn texp_rate_for_the_reported_mean() {
        let d = ReferenceDistribution::match_truncated_exponential(iv(0.0, 0.1), 0.04).unwrap();
        let ReferenceKind::TruncatedExponential { rate } = d.kind() else {
            panic!()
        };
        assert!((rate - 12.3).abs() < 0.05, "rate {rate}");
        assert!((d.mean() - 0.04).abs() < 1e-10);
    }

    #[test]
    fn texp_midpoint_mean_is_the_uniform_limit() {
        let d = ReferenceDistribution::match_truncated_exponential(iv(0.0, 1.0), 0.5).unwrap();
        let ReferenceKind::TruncatedExponential { rate } = d.kind() else {
            panic!()
        };
        assert_eq!(*rate, 0.0);
        assert!((d.density_at(0.3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn texp_mean_inversion_round_trips() {
        let b = 0.1;
        for i in 1..=100 {
            let target = b * (0.01 + 0.98 * (i as f64 - 1.0) / 99.0);
            let d = ReferenceDistribution::match_truncated_exponential(iv(0.0, b), target).unwrap();
            assert!(
                (d.mean() - target).abs() < 1e-10,
                "target {target}, got {}",
                d.mean()
            );
        }
    }

    #[test]
    fn texp_infeasible_means_are_rejected() {
        assert!(ReferenceDistribution::match_truncated_exponential(iv(0.0, 0.1), 0.11).is_err());
        assert!(ReferenceDistribution::match_truncated_exponential(iv(0.0, 0.1), 0.0).is_err());
        assert!(
            ReferenceDistribution::match_truncated_exponential(iv(0.1, 0.2), 0.15).is_err(),
            "lower bound must be zero"
        );
    }

    #[test]
    fn beta_shapes_for_the_preset_cases() {
        let bell = ReferenceDistribution::match_scaled_beta(iv(-0.1, 0.1), 0.0, 0.001).unwrap();
        let ReferenceKind::ScaledBeta { alpha, beta } = bell.kind() else {
            panic!()
        };
        assert!((alpha - 4.5).abs() < 1e-8 && (beta - 4.5).abs() < 1e-8);

        let bowl = ReferenceDistribution::match_scaled_beta(iv(-0.1, 0.1), 0.0, 0.005).unwrap();
        let ReferenceKind::ScaledBeta { alpha, beta } = bowl.kind() else {
            panic!()
        };
        assert!((alpha - 0.5).abs() < 1e-8 && (beta - 0.5).abs() < 1e-8);

        let unif = ReferenceDistribution::match_scaled_beta(iv(0.0, 1.0), 0.5, 1.0 / 12.0).unwrap();
        let ReferenceKind::ScaledBeta { alpha, beta } = unif.kind() else {
            panic!()
        };
        assert!((alpha - 1.0).abs() < 1e-8 && (beta - 1.0).abs() < 1e-8);
    }

    #[test]
    fn beta_moment_inversion_round_trips() {
        let cases = [
            (-0.1, 0.1, 0.02, 0.0013),
            (0.0, 1.0, 0.3, 0.04),
            (2.0, 5.0, 3.0, 0.5),
        ];
        for (a, b, mean, var) in cases {
            let d = ReferenceDistribution::match_scaled_beta(iv(a, b), mean, var).unwrap();
            assert!((d.mean() - mean).abs() < 1e-10);
            assert!((d.variance().unwrap() - var).abs() < 1e-10);
        }
        assert!(ReferenceDistribution::match_scaled_beta(iv(0.0, 1.0), 0.5, 0.3).is_err());
    }

    #[test]
    fn uniform_path_length_is_the_straight_line() {
        let d = ReferenceDistribution::uniform(iv(0.0, 0.1));
        assert!((d.path_length().unwrap() - 1.01f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn texp_path_length_matches_the_closed_form() {
        // antiderivative of sqrt(1+f^2) under u = f(x):
        // (1/rate) * [sqrt(1+u^2) - ln((1 + sqrt(1+u^2))/u)]
        let d = ReferenceDistribution::match_truncated_exponential(iv(0.0, 0.1), 0.04).unwrap();
        let ReferenceKind::TruncatedExponential { rate } = *d.kind() else {
            panic!()
        };
        let f0 = d.density_at(0.0);
        let f1 = d.density_at(0.1);
        let anti = |u: f64| {
            let s = (1.0 + u * u).sqrt();
            s - ((1.0 + s) / u).ln()
        };
        let exact = (anti(f0) - anti(f1)) / rate;
        let quadrature = d.path_length().unwrap();
        assert!(
            (quadrature - exact).abs() < 1e-8,
            "quadrature {quadrature} vs closed form {exact}"
        );
        // the closed-form value itself: about 1.00564, not 1.017
        assert!((exact - 1.005636).abs() < 5e-5);
    }

    #[test]
    fn bell_and_bowl_path_lengths() {
        let bell = ReferenceDistribution::match_scaled_beta(iv(-0.1, 0.1), 0.0, 0.001).unwrap();
        let l = bell.path_length().unwrap();
        assert!((l - 1.06285).abs() < 1e-3, "bell length {l}");

        let bowl = ReferenceDistribution::match_scaled_beta(iv(-0.1, 0.1), 0.0, 0.005).unwrap();
        let l = bowl.path_length().unwrap();
        assert!((l - 1.02423).abs() < 1e-3, "bowl length {l}");
    }

    #[test]
    fn quadrature_self_consistency_under_tolerance_halving() {
        let bowl = ReferenceDistribution::match_scaled_beta(iv(-0.1, 0.1), 0.0, 0.005).unwrap();
        for tol in [1e-6, 1e-8] {
            let coarse = bowl.path_length_with_tol(tol).unwrap();
            let fine = bowl.path_length_with_tol(tol / 2.0).unwrap();
            assert!((coarse - fine).abs() < tol);
        }
    }

    #[test]
    fn normal_has_no_path_length() {
        let d = ReferenceDistribution::normal(0.0, 0.001).unwrap();
        assert!(matches!(
            d.path_length(),
            Err(Error::UnsupportedReference { .. })
        ));
        // density is still available for overlays
        assert!(d.density_at(0.0) > 0.0);
    }

    #[test]
    fn discretization_needs_matching_intervals() {
        let d = ReferenceDistribution::uniform(iv(0.0, 0.1));
        let p = Partition::new(iv(0.0, 0.2), 10).unwrap();
        assert!(matches!(
            d.discretize_on(&p),
            Err(Error::IntervalMismatch { .. })
        ));

        let p = Partition::new(iv(0.0, 0.1), 10).unwrap();
        let disc = d.discretize_on(&p).unwrap();
        for v in disc.values() {
            assert!((v - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn texp_discretization_matches_quadrature_length() {
        let d = ReferenceDistribution::match_truncated_exponential(iv(0.0, 0.1), 0.04).unwrap();
        let p = Partition::new(iv(0.0, 0.1), 400).unwrap();
        let disc = d.discretize_on(&p).unwrap();
        assert!((disc.path_length() - d.path_length().unwrap()).abs() < 0.002);
        assert!((disc.raw_moment(0) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn bell_discretization_peaks_at_the_center() {
        let d = ReferenceDistribution::match_scaled_beta(iv(-0.1, 0.1), 0.0, 0.001).unwrap();
        let p = Partition::new(iv(-0.1, 0.1), 400).unwrap();
        let disc = d.discretize_on(&p).unwrap();
        let peak_idx = disc
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!(peak_idx == 199 || peak_idx == 200);
    }

    #[test]
    fn reference_json_round_trip() {
        let d = ReferenceDistribution::match_scaled_beta(iv(-0.1, 0.1), 0.0, 0.001).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.contains("scaled_beta"));
        let back: ReferenceDistribution = serde_json::from_str(&text).unwrap();
        assert_eq!(d, back);

        let d = ReferenceDistribution::normal(0.0, 0.001).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        let back: ReferenceDistribution = serde_json::from_str(&text).unwrap();
        assert_eq!(d, back);
    }
}
