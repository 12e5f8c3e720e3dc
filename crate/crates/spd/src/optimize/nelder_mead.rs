//! Nelder-Mead simplex search with trial points projected onto the box.

use super::Bounds;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NmOptions {
    pub f_tol_abs: f64,
    pub f_tol_rel: f64,
    pub x_tol: f64,
    pub max_iter: usize,
    /// Relative size of the initial simplex steps.
    pub initial_step: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self {
            f_tol_abs: 1e-15,
            f_tol_rel: 4e-15,
            x_tol: 1e-10,
            max_iter: 5000,
            initial_step: 1.0,
        }
    }
}

pub struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

struct Vertex {
    x: Vec<f64>,
    f: f64,
}

fn eval(f: &dyn Fn(&[f64]) -> f64, x: Vec<f64>) -> Result<Vertex> {
    let v = f(&x);
    if !v.is_finite() {
        return Err(Error::NonFiniteObjective { value: v, point: x });
    }
    Ok(Vertex { x, f: v })
}

/// Minimize `f` over the box from `x0` with a projected Nelder-Mead simplex.
/// Works for dimension >= 1 (a 1-d simplex is a pair of points).
pub fn minimize(
    f: &dyn Fn(&[f64]) -> f64,
    bounds: &Bounds,
    x0: Vec<f64>,
    opts: &NmOptions,
) -> Result<NmResult> {
    let dim = x0.len();
    let x0 = bounds.projected(&x0);

    // orthogonal initial simplex, stepping away from bounds when needed
    let mut simplex = Vec::with_capacity(dim + 1);
    simplex.push(eval(f, x0.clone())?);
    for i in 0..dim {
        let h = if x0[i] != 0.0 {
            0.05 * x0[i].abs()
        } else {
            0.00025
        } * opts.initial_step;
        let mut xi = x0.clone();
        xi[i] = bounds.clamp(i, x0[i] + h);
        if xi[i] == x0[i] {
            xi[i] = bounds.clamp(i, x0[i] - h);
        }
        simplex.push(eval(f, xi)?);
    }
    simplex.sort_by(|a, b| a.f.total_cmp(&b.f));

    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;

        let best = simplex[0].f;
        let worst = simplex[dim].f;
        let spread_ok = (worst - best) <= opts.f_tol_abs.max(opts.f_tol_rel * best.abs());
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|v| v.x.iter().zip(&simplex[0].x).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if spread_ok && x_spread <= opts.x_tol {
            break;
        }

        // centroid of all but the worst vertex
        let mut centroid = vec![0.0; dim];
        for v in &simplex[..dim] {
            for (ci, xi) in centroid.iter_mut().zip(&v.x) {
                *ci += xi;
            }
        }
        for ci in centroid.iter_mut() {
            *ci /= dim as f64;
        }

        let worst_x = simplex[dim].x.clone();
        let towards = |scale: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid
                .iter()
                .zip(&worst_x)
                .map(|(c, w)| c + scale * (c - w))
                .collect();
            bounds.project(&mut x);
            x
        };

        let reflected = eval(f, towards(1.0))?;
        let replacement = if reflected.f < simplex[0].f {
            let expanded = eval(f, towards(2.0))?;
            if expanded.f < reflected.f {
                expanded
            } else {
                reflected
            }
        } else if reflected.f < simplex[dim - 1].f {
            reflected
        } else if reflected.f < simplex[dim].f {
            let outside = eval(f, towards(0.5))?;
            if outside.f <= reflected.f {
                outside
            } else {
                shrink(f, bounds, &mut simplex)?;
                continue;
            }
        } else {
            let inside = eval(f, towards(-0.5))?;
            if inside.f < simplex[dim].f {
                inside
            } else {
                shrink(f, bounds, &mut simplex)?;
                continue;
            }
        };

        simplex[dim] = replacement;
        simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
    }

    let best = simplex.swap_remove(0);
    Ok(NmResult {
        x: best.x,
        value: best.f,
        iterations,
    })
}

fn shrink(f: &dyn Fn(&[f64]) -> f64, bounds: &Bounds, simplex: &mut [Vertex]) -> Result<()> {
    let best = simplex[0].x.clone();
    for v in simplex.iter_mut().skip(1) {
        let mut x: Vec<f64> = best
            .iter()
            .zip(&v.x)
            .map(|(b, xi)| b + 0.5 * (xi - b))
            .collect();
        bounds.project(&mut x);
        *v = eval(f, x)?;
    }
    simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_shifted_quadratic() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2) + 2.0;
        let r = minimize(
            &f,
            &Bounds::unbounded(2),
            vec![0.0, 0.0],
            &NmOptions::default(),
        )
        .unwrap();
        assert!((r.x[0] - 1.5).abs() < 1e-6);
        assert!((r.x[1] + 0.5).abs() < 1e-6);
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn respects_bounds() {
        let f = |x: &[f64]| (x[0] + 2.0).powi(2);
        let r = minimize(
            &f,
            &Bounds::nonnegative(1),
            vec![1.0],
            &NmOptions::default(),
        )
        .unwrap();
        assert!(r.x[0].abs() < 1e-8, "constrained optimum at the bound");
    }

    #[test]
    fn one_dimensional_simplex_works() {
        let f = |x: &[f64]| (x[0] - 0.25).powi(2);
        let r = minimize(&f, &Bounds::unbounded(1), vec![3.0], &NmOptions::default()).unwrap();
        assert!((r.x[0] - 0.25).abs() < 1e-7);
    }

    #[test]
    fn banana_valley_converges() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NmOptions {
            max_iter: 20_000,
            ..NmOptions::default()
        };
        let r = minimize(&f, &Bounds::unbounded(2), vec![-1.2, 1.0], &opts).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-5, "{:?}", r.x);
        assert!((r.x[1] - 1.0).abs() < 1e-5);
    }
}
