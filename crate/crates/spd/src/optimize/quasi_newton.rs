//! Projected quasi-Newton minimization over a box: limited-memory BFGS
//! directions restricted to the free variables, with Armijo backtracking
//! along the projection arc.

use std::collections::VecDeque;

use super::Bounds;
use crate::error::{Error, Result};

const MEMORY: usize = 10;
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

pub struct QnResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    #[allow(dead_code)] // inspected by tests
    pub pg_norm: f64,
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coordinates pinned at a bound with the gradient pushing outward.
fn active_mask(bounds: &Bounds, x: &[f64], g: &[f64]) -> Vec<bool> {
    x.iter()
        .zip(g)
        .enumerate()
        .map(|(i, (&xi, &gi))| {
            (xi <= bounds.lower()[i] && gi > 0.0) || (xi >= bounds.upper()[i] && gi < 0.0)
        })
        .collect()
}

/// Two-loop L-BFGS recursion applied to the masked gradient. The initial
/// metric is the inverse Hessian diagonal when one is supplied, otherwise
/// the usual scalar secant scaling.
fn lbfgs_direction(
    pairs: &VecDeque<Pair>,
    g: &[f64],
    mask: &[bool],
    diag: Option<&[f64]>,
) -> Vec<f64> {
    let mut q: Vec<f64> = g
        .iter()
        .zip(mask)
        .map(|(gi, m)| if *m { 0.0 } else { *gi })
        .collect();
    let mut alphas = Vec::with_capacity(pairs.len());
    for p in pairs.iter().rev() {
        let alpha = p.rho * dot(&p.s, &q);
        for (qi, yi) in q.iter_mut().zip(&p.y) {
            *qi -= alpha * yi;
        }
        alphas.push(alpha);
    }
    match diag {
        Some(d) => {
            for (qi, di) in q.iter_mut().zip(d) {
                *qi /= di.max(1e-300);
            }
        }
        None => {
            if let Some(last) = pairs.back() {
                let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
                for qi in q.iter_mut() {
                    *qi *= gamma;
                }
            }
        }
    }
    for (p, alpha) in pairs.iter().zip(alphas.into_iter().rev()) {
        let beta = p.rho * dot(&p.y, &q);
        for (qi, si) in q.iter_mut().zip(&p.s) {
            *qi += (alpha - beta) * si;
        }
    }
    for (qi, m) in q.iter_mut().zip(mask) {
        if *m {
            *qi = 0.0;
        }
        *qi = -*qi;
    }
    q
}

pub fn minimize(
    f: &dyn Fn(&[f64]) -> f64,
    grad: &dyn Fn(&[f64]) -> Vec<f64>,
    precond: &dyn Fn(&[f64]) -> Option<Vec<f64>>,
    bounds: &Bounds,
    x0: Vec<f64>,
    pg_tol: f64,
    max_iter: usize,
) -> Result<QnResult> {
    let mut x = bounds.projected(&x0);
    let mut fx = f(&x);
    if !fx.is_finite() {
        return Err(Error::NonFiniteObjective {
            value: fx,
            point: x,
        });
    }
    let mut g = grad(&x);
    let mut pairs: VecDeque<Pair> = VecDeque::with_capacity(MEMORY);
    let mut iterations = 0;
    let mut pg_norm = f64::INFINITY;

    while iterations < max_iter {
        pg_norm = x
            .iter()
            .zip(&g)
            .enumerate()
            .map(|(i, (&xi, &gi))| (xi - bounds.clamp(i, xi - gi)).abs())
            .fold(0.0f64, f64::max);
        if pg_norm <= pg_tol {
            break;
        }
        iterations += 1;

        let mask = active_mask(bounds, &x, &g);
        let diag = precond(&x);
        let mut d = lbfgs_direction(&pairs, &g, &mask, diag.as_deref());
        // NaN-safe: anything but a strict descent direction falls through
        let is_descent = |v: f64| v.is_finite() && v < 0.0;
        let mut descent = dot(&g, &d);
        if !is_descent(descent) {
            // curvature information unusable; fall back to (preconditioned)
            // projected steepest descent
            pairs.clear();
            d = g
                .iter()
                .zip(&mask)
                .enumerate()
                .map(|(i, (gi, m))| {
                    if *m {
                        0.0
                    } else {
                        match &diag {
                            Some(di) => -gi / di[i].max(1e-300),
                            None => -gi,
                        }
                    }
                })
                .collect();
            descent = dot(&g, &d);
            if !is_descent(descent) {
                break; // every free direction is uphill: stationary
            }
        }

        // Armijo backtracking along the projection arc
        let mut step = 1.0f64;
        let mut accepted: Option<(Vec<f64>, f64)> = None;
        for _ in 0..MAX_BACKTRACKS {
            let mut xt: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            bounds.project(&mut xt);
            let displacement: f64 = xt
                .iter()
                .zip(&x)
                .zip(&g)
                .map(|((t, xi), gi)| gi * (t - xi))
                .sum();
            let ft = f(&xt);
            if !ft.is_finite() {
                return Err(Error::NonFiniteObjective {
                    value: ft,
                    point: xt,
                });
            }
            if ft <= fx + ARMIJO_C1 * displacement.min(0.0) && ft < fx {
                accepted = Some((xt, ft));
                break;
            }
            // flat to rounding: treat as converged rather than looping
            if (ft - fx).abs() <= 1e-16 * fx.abs().max(1.0) && step < 1e-12 {
                break;
            }
            step *= 0.5;
        }

        // Near the optimum the predicted improvement drops below the
        // rounding noise of f and Armijo goes blind, while the gradient is
        // still accurate. Accept the full step there when it shrinks the
        // projected gradient decisively.
        if accepted.is_none() && descent.abs() <= 1e4 * f64::EPSILON * fx.abs().max(1.0) {
            let mut xt: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + di).collect();
            bounds.project(&mut xt);
            if xt != x {
                let gt = grad(&xt);
                let pg_t = xt
                    .iter()
                    .zip(&gt)
                    .enumerate()
                    .map(|(i, (&xi, &gi))| (xi - bounds.clamp(i, xi - gi)).abs())
                    .fold(0.0f64, f64::max);
                if pg_t <= 0.9 * pg_norm {
                    let ft = f(&xt);
                    if ft.is_finite() {
                        accepted = Some((xt, ft));
                    }
                }
            }
        }

        let Some((x_new, f_new)) = accepted else {
            if pairs.is_empty() {
                break; // steepest descent cannot improve: numerically stationary
            }
            pairs.clear();
            continue;
        };

        let g_new = grad(&x_new);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let ss = dot(&s, &s).sqrt();
        let yy = dot(&y, &y).sqrt();
        if sy > 1e-10 * ss * yy && sy > 0.0 {
            if pairs.len() == MEMORY {
                pairs.pop_front();
            }
            pairs.push_back(Pair {
                s,
                y,
                rho: 1.0 / sy,
            });
        }
        x = x_new;
        fx = f_new;
        g = g_new;
    }

    Ok(QnResult {
        x,
        value: fx,
        iterations,
        pg_norm,
    })
}
