//! Grids, piecewise-constant densities, and the core functionals: raw
//! moments, CDF evaluation, CDF path length, and the uniformity index.
//!
//! A density on `[a, b]` is represented by its values at the midpoints of
//! `n` equal-width cells. Moments are Riemann sums with exact cell integrals
//! of `x^k` as weights, which makes every moment constraint linear in the
//! density values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the zeroth moment below which a density counts as
/// normalized.
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// A finite interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntervalRepr", into = "IntervalRepr")]
pub struct Interval {
    a: f64,
    b: f64,
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    a: f64,
    b: f64,
}

impl TryFrom<IntervalRepr> for Interval {
    type Error = Error;
    fn try_from(r: IntervalRepr) -> Result<Self> {
        Interval::new(r.a, r.b)
    }
}

impl From<Interval> for IntervalRepr {
    fn from(i: Interval) -> Self {
        IntervalRepr { a: i.a, b: i.b }
    }
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    /// Arc length of the uniform CDF on this interval, `sqrt(1 + (b-a)^2)`.
    /// Every CDF path on the interval is at least this long.
    pub fn straight_line_length(&self) -> f64 {
        (1.0 + self.width() * self.width()).sqrt()
    }
}

/// `n` equal-width cells covering an interval, with cached midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    interval: Interval,
    n: usize,
    cell_width: f64,
    midpoints: Vec<f64>,
}

impl Partition {
    pub fn new(interval: Interval, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyPartition);
        }
        let width = interval.width() / n as f64;
        let a = interval.lower();
        let midpoints = (1..=n)
            .map(|i| a + (2 * i - 1) as f64 * width / 2.0)
            .collect();
        Ok(Self {
            interval,
            n,
            cell_width: width,
            midpoints,
        })
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_width(&self) -> f64 {
        self.cell_width
    }

    pub fn midpoints(&self) -> &[f64] {
        &self.midpoints
    }

    /// Cell boundary `x_i = a + i * (b-a)/n` for `i = 0..=n`.
    pub fn edge(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n);
        if i == self.n {
            // avoid drifting past b by rounding
            self.interval.upper()
        } else {
            self.interval.lower() + i as f64 * self.cell_width
        }
    }

    /// Exact integrals of `x^k` over each cell:
    /// `w_i = (x_i^{k+1} - x_{i-1}^{k+1}) / (k+1)`.
    ///
    /// These are the weights that turn midpoint density values into Riemann
    /// moments; their sum telescopes to `(b^{k+1} - a^{k+1}) / (k+1)`.
    pub fn moment_weights(&self, k: u32) -> Vec<f64> {
        let p = k as i32 + 1;
        let scale = 1.0 / p as f64;
        let mut prev = self.edge(0).powi(p);
        (1..=self.n)
            .map(|i| {
                let cur = self.edge(i).powi(p);
                let w = (cur - prev) * scale;
                prev = cur;
                w
            })
            .collect()
    }

    /// Index of the cell containing `x` (clamped to the last cell at `b`).
    pub fn cell_of(&self, x: f64) -> Result<usize> {
        if !self.interval.contains(x) {
            return Err(Error::OutOfSupport {
                x,
                a: self.interval.lower(),
                b: self.interval.upper(),
            });
        }
        let i = ((x - self.interval.lower()) / self.cell_width).floor() as usize;
        Ok(i.min(self.n - 1))
    }
}

/// A nonnegative piecewise-constant density on a [`Partition`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRepr", into = "DensityRepr")]
pub struct PiecewiseDensity {
    partition: Partition,
    values: Vec<f64>,
}

/// Wire format: `{a, b, n, values}`.
#[derive(Serialize, Deserialize)]
struct DensityRepr {
    a: f64,
    b: f64,
    n: usize,
    values: Vec<f64>,
}

impl TryFrom<DensityRepr> for PiecewiseDensity {
    type Error = Error;
    fn try_from(r: DensityRepr) -> Result<Self> {
        let partition = Partition::new(Interval::new(r.a, r.b)?, r.n)?;
        PiecewiseDensity::new(partition, r.values)
    }
}

impl From<PiecewiseDensity> for DensityRepr {
    fn from(d: PiecewiseDensity) -> Self {
        DensityRepr {
            a: d.partition.interval().lower(),
            b: d.partition.interval().upper(),
            n: d.partition.len(),
            values: d.values,
        }
    }
}

impl PiecewiseDensity {
    pub fn new(partition: Partition, values: Vec<f64>) -> Result<Self> {
        if values.len() != partition.len() {
            return Err(Error::InvalidDensity {
                reason: format!("expected {} values, got {}", partition.len(), values.len()),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidDensity {
                reason: format!("values must be finite and nonnegative, found {v}"),
            });
        }
        Ok(Self { partition, values })
    }

    /// The uniform density `1/(b-a)` on the given grid.
    pub fn uniform(partition: Partition) -> Self {
        let v = 1.0 / partition.interval().width();
        let values = vec![v; partition.len()];
        Self { partition, values }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Riemann raw moment `sum_i f_i * w^k_i` with exact cell weights.
    pub fn raw_moment(&self, k: u32) -> f64 {
        self.partition
            .moment_weights(k)
            .iter()
            .zip(&self.values)
            .map(|(w, f)| w * f)
            .sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.raw_moment(0) - 1.0).abs() <= tol
    }

    /// Arc length of the piecewise-linear CDF:
    /// `delta * sum_i sqrt(1 + f_i^2)`.
    pub fn path_length(&self) -> f64 {
        let delta = self.partition.cell_width();
        delta
            * self
                .values
                .iter()
                .map(|f| (1.0 + f * f).sqrt())
                .sum::<f64>()
    }

    /// Ratio of the straight-line CDF length to this CDF's path length.
    /// Equals 1 for the uniform density and decreases as mass concentrates.
    pub fn uniformity_index(&self) -> f64 {
        self.partition.interval().straight_line_length() / self.path_length()
    }

    /// Piecewise-linear CDF at `x` in `[a, b]`. Starts at 0 and ends at the
    /// zeroth Riemann moment.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let cell = self.partition.cell_of(x)?;
        let w0 = self.partition.moment_weights(0);
        let whole_cells: f64 = self.values[..cell]
            .iter()
            .zip(&w0[..cell])
            .map(|(f, w)| f * w)
            .sum();
        Ok(whole_cells + self.values[cell] * (x - self.partition.edge(cell)))
    }

    /// CSV with header `cell,midpoint,density`, cells 1-indexed, 17
    /// significant digits so values round-trip exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cell,midpoint,density\n");
        for (i, (p, f)) in self
            .partition
            .midpoints()
            .iter()
            .zip(&self.values)
            .enumerate()
        {
            out.push_str(&format!("{},{:.16e},{:.16e}\n", i + 1, p, f));
        }
        out
    }

    /// Parse the [`to_csv`](Self::to_csv) format. The grid is reconstructed
    /// from the midpoints, which pin `a`, `b`, and `n`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut mids = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if lineno == 0 {
                if line.trim() != "cell,midpoint,density" {
                    return Err(Error::MalformedCsv {
                        reason: format!("unexpected header {line:?}"),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::MalformedCsv {
                    reason: format!("line {}: expected 3 fields", lineno + 1),
                });
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|_| Error::MalformedCsv {
                    reason: format!("line {}: bad number {s:?}", lineno + 1),
                })
            };
            mids.push(parse(fields[1])?);
            values.push(parse(fields[2])?);
        }
        if mids.is_empty() {
            return Err(Error::MalformedCsv {
                reason: "no data rows".into(),
            });
        }
        let n = mids.len();
        // midpoints are a + (2i-1) w/2; recover w and a
        let w = if n > 1 {
            (mids[n - 1] - mids[0]) / (n - 1) as f64
        } else {
            return Err(Error::MalformedCsv {
                reason: "cannot recover the interval from a single row".into(),
            });
        };
        let a = mids[0] - w / 2.0;
        let b = mids[n - 1] + w / 2.0;
        let partition = Partition::new(Interval::new(a, b)?, n)?;
        PiecewiseDensity::new(partition, values)
    }
}

/// Target raw moments `mu_0..mu_m` with `mu_0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSpec {
    targets: Vec<f64>,
}

impl MomentSpec {
    /// Validates `mu_0 = 1` and, for `m <= 2`, that the targets are
    /// attainable on the interval: `a <= mu_1 <= b` and
    /// `mu_1^2 <= mu_2 <= mu_1 (a+b) - a b`. Higher orders are accepted
    /// unchecked; the solver reports infeasibility instead.
    pub fn new(interval: &Interval, targets: Vec<f64>) -> Result<Self> {
        let (a, b) = (interval.lower(), interval.upper());
        let fail = |reason: String| Error::UnattainableMoments { a, b, reason };
        if targets.is_empty() {
            return Err(fail("at least mu_0 is required".into()));
        }
        if targets[0] != 1.0 {
            return Err(fail(format!("mu_0 must be exactly 1, got {}", targets[0])));
        }
        if let Some(bad) = targets.iter().find(|t| !t.is_finite()) {
            return Err(fail(format!("non-finite target {bad}")));
        }
        if targets.len() >= 2 {
            let mu1 = targets[1];
            if mu1 < a || mu1 > b {
                return Err(fail(format!("mu_1 = {mu1} outside [{a}, {b}]")));
            }
            if targets.len() >= 3 {
                let mu2 = targets[2];
                let hi = mu1 * (a + b) - a * b;
                if mu2 < mu1 * mu1 || mu2 > hi {
                    return Err(fail(format!("mu_2 = {mu2} outside [{}, {hi}]", mu1 * mu1)));
                }
            }
        }
        Ok(Self { targets })
    }

    /// Moments from a mean and variance: `mu_2 = var + mean^2`.
    pub fn from_mean_variance(
        interval: &Interval,
        mean: f64,
        variance: Option<f64>,
    ) -> Result<Self> {
        let mut targets = vec![1.0, mean];
        if let Some(v) = variance {
            targets.push(v + mean * mean);
        }
        Self::new(interval, targets)
    }

    /// Highest constrained order `m`.
    pub fn order(&self) -> usize {
        self.targets.len() - 1
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn target(&self, k: usize) -> f64 {
        self.targets[k]
    }

    pub fn mean(&self) -> Option<f64> {
        self.targets.get(1).copied()
    }

    pub fn variance(&self) -> Option<f64> {
        match (self.targets.get(1), self.targets.get(2)) {
            (Some(m), Some(m2)) => Some(m2 - m * m),
            _ => None,
        }
    }
}
