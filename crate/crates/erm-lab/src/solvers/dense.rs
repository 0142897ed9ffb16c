//! Small dense linear algebra: Gaussian elimination with partial pivoting,
//! enough for the d x d and |active-set| x |active-set| systems that appear
//! in the coefficient-ball and simplex-QP solvers.

use crate::error::{Error, Result};

/// Solve A x = b in place; `a` is row-major n x n.
pub fn solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-300 {
            return Err(Error::Solver("singular matrix in dense solve".into()));
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s -= a[col * n + c] * b[c];
        }
        b[col] = s / a[col * n + col];
    }
    Ok(b)
}

/// Solve (G + lambda I) x = b for symmetric G (row-major d x d).
pub fn solve_ridge(g: &[f64], d: usize, lambda: f64, b: &[f64]) -> Result<Vec<f64>> {
    let mut a = g.to_vec();
    for i in 0..d {
        a[i * d + i] += lambda;
    }
    solve(a, b.to_vec())
}
