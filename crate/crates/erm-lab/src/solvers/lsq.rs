//! Norm-constrained least squares in coefficient space: ridge-path bisection
//! for the l2 ball, coordinate-descent lasso plus dual bisection for the l1
//! ball. Dimensions here are small (the feature dimension of a linear class).

use crate::error::Result;
use crate::solvers::dense;

/// Gram matrix X'X (d x d) and X'y for a row-major n x d design.
pub fn normal_equations(x: &[f64], n: usize, d: usize, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut g = vec![0.0; d * d];
    let mut b = vec![0.0; d];
    for i in 0..n {
        let row = &x[i * d..(i + 1) * d];
        for a in 0..d {
            b[a] += row[a] * y[i];
            for c in a..d {
                g[a * d + c] += row[a] * row[c];
            }
        }
    }
    for a in 0..d {
        for c in 0..a {
            g[a * d + c] = g[c * d + a];
        }
    }
    (g, b)
}

fn l2norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// minimize ||y - X theta||^2 s.t. ||theta||_2 <= radius.
/// Exact via the ridge path: theta(lambda) = (G + lambda I)^{-1} X'y has
/// monotone-decreasing norm, so the active constraint pins a unique lambda.
pub fn l2_ball_ls(x: &[f64], n: usize, d: usize, y: &[f64], radius: f64) -> Result<Vec<f64>> {
    let (g, b) = normal_equations(x, n, d, y);
    if let Ok(theta) = dense::solve_ridge(&g, d, 0.0, &b) {
        if l2norm(&theta) <= radius {
            return Ok(theta);
        }
    }
    let bn = l2norm(&b);
    if bn == 0.0 {
        return Ok(vec![0.0; d]);
    }
    let mut lo = 0.0f64;
    let mut hi = bn / radius; // ||theta(hi)|| <= ||b||/hi = radius
    let mut theta = vec![0.0; d];
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let t = dense::solve_ridge(&g, d, mid.max(1e-300), &b)?;
        let nrm = l2norm(&t);
        theta = t;
        if nrm > radius {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-15 * (1.0 + hi) {
            break;
        }
    }
    // final answer at hi is feasible
    let t = dense::solve_ridge(&g, d, hi.max(1e-300), &b)?;
    if l2norm(&t) <= radius * (1.0 + 1e-12) {
        theta = t;
    }
    Ok(theta)
}

/// Coordinate descent for 0.5||y - X theta||^2 + lambda ||theta||_1.
pub fn lasso_cd(
    x: &[f64],
    n: usize,
    d: usize,
    y: &[f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
) -> Vec<f64> {
    let mut theta = vec![0.0; d];
    let mut resid = y.to_vec(); // y - X theta
    let col_sq: Vec<f64> = (0..d)
        .map(|j| (0..n).map(|i| x[i * d + j] * x[i * d + j]).sum())
        .collect();
    for _ in 0..max_sweeps {
        let mut max_delta = 0.0f64;
        for j in 0..d {
            if col_sq[j] == 0.0 {
                continue;
            }
            let rho: f64 = (0..n).map(|i| x[i * d + j] * resid[i]).sum::<f64>()
                + col_sq[j] * theta[j];
            let new = soft_threshold(rho, lambda) / col_sq[j];
            let delta = new - theta[j];
            if delta != 0.0 {
                for i in 0..n {
                    resid[i] -= delta * x[i * d + j];
                }
                theta[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta < tol {
            break;
        }
    }
    theta
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// minimize ||y - X theta||^2 s.t. ||theta||_1 <= radius, by bisecting the
/// lasso penalty until the constraint is active (or slack at lambda = 0).
pub fn l1_ball_ls(x: &[f64], n: usize, d: usize, y: &[f64], radius: f64) -> Result<Vec<f64>> {
    let (g, b) = normal_equations(x, n, d, y);
    if let Ok(theta) = dense::solve_ridge(&g, d, 1e-12, &b) {
        if theta.iter().map(|v| v.abs()).sum::<f64>() <= radius {
            return Ok(theta);
        }
    }
    let lam_max = b.iter().map(|v| v.abs()).fold(0.0f64, f64::max) * 1.001 + 1e-12;
    let mut lo = 0.0f64;
    let mut hi = lam_max;
    let mut best = vec![0.0; d];
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let theta = lasso_cd(x, n, d, y, mid, 1e-12, 4000);
        let l1: f64 = theta.iter().map(|v| v.abs()).sum();
        if l1 > radius {
            lo = mid;
        } else {
            hi = mid;
            best = theta;
        }
        if (hi - lo) < 1e-13 * lam_max {
            break;
        }
    }
    // rescale the feasible iterate onto the sphere if the solution is
    // constraint-active but bisection stopped a hair inside
    let l1: f64 = best.iter().map(|v| v.abs()).sum();
    if l1 > 0.0 && (radius - l1) / radius < 1e-6 {
        for v in &mut best {
            *v *= radius / l1;
        }
    }
    Ok(best)
}
