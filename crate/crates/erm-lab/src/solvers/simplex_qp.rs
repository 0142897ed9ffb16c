//! Active-set solver for quadratic programs over the probability simplex:
//!
//!     minimize 1/2 w' H w + c' w    s.t.    sum w = 1,  w >= 0
//!
//! Exact up to linear-solve precision; the atom counts here are small.

use crate::error::{Error, Result};
use crate::solvers::dense;

pub struct SimplexQp<'a> {
    pub h: &'a [f64], // row-major k x k, symmetric PSD
    pub c: &'a [f64],
    pub k: usize,
}

impl<'a> SimplexQp<'a> {
    pub fn new(h: &'a [f64], c: &'a [f64], k: usize) -> Self {
        debug_assert_eq!(h.len(), k * k);
        debug_assert_eq!(c.len(), k);
        SimplexQp { h, c, k }
    }

    fn objective(&self, w: &[f64]) -> f64 {
        let mut v = 0.0;
        for i in 0..self.k {
            v += self.c[i] * w[i];
            for j in 0..self.k {
                v += 0.5 * w[i] * self.h[i * self.k + j] * w[j];
            }
        }
        v
    }

    /// Equality-constrained solve on a support set; returns (w_S, nu).
    fn eqp(&self, support: &[usize]) -> Result<(Vec<f64>, f64)> {
        let s = support.len();
        let dim = s + 1;
        let mut a = vec![0.0; dim * dim];
        let mut b = vec![0.0; dim];
        let ridge = 1e-12
            * (0..self.k).map(|i| self.h[i * self.k + i].abs()).fold(1.0, f64::max);
        for (r, &i) in support.iter().enumerate() {
            for (q, &j) in support.iter().enumerate() {
                a[r * dim + q] = self.h[i * self.k + j] + if r == q { ridge } else { 0.0 };
            }
            a[r * dim + s] = 1.0;
            a[s * dim + r] = 1.0;
            b[r] = -self.c[i];
        }
        b[s] = 1.0;
        let sol = dense::solve(a, b)?;
        Ok((sol[..s].to_vec(), sol[s]))
    }

    pub fn solve(&self) -> Result<Vec<f64>> {
        self.solve_warm(None)
    }

    /// Active-set solve, optionally warm-started from a feasible weight
    /// vector (its positive support seeds the active set).
    pub fn solve_warm(&self, start_w: Option<&[f64]>) -> Result<Vec<f64>> {
        let k = self.k;
        if k == 0 {
            return Err(Error::Solver("empty simplex qp".into()));
        }
        let scale = (0..k * k).map(|i| self.h[i].abs()).fold(0.0, f64::max)
            + self.c.iter().map(|v| v.abs()).fold(0.0, f64::max)
            + 1.0;
        let tol = 1e-11 * scale;

        let mut w = vec![0.0; k];
        let mut support: Vec<usize>;
        match start_w {
            Some(sw) if sw.len() == k && sw.iter().any(|&v| v > 0.0) => {
                support = (0..k).filter(|&i| sw[i] > 1e-12).collect();
                let total: f64 = support.iter().map(|&i| sw[i]).sum();
                for &i in &support {
                    w[i] = sw[i] / total;
                }
            }
            _ => {
                // start at the best single vertex
                let start = (0..k)
                    .min_by(|&a, &b| {
                        let fa = 0.5 * self.h[a * k + a] + self.c[a];
                        let fb = 0.5 * self.h[b * k + b] + self.c[b];
                        fa.partial_cmp(&fb).unwrap()
                    })
                    .unwrap();
                w[start] = 1.0;
                support = vec![start];
            }
        }

        for _ in 0..(100 + 20 * k) {
            let (ws, nu) = self.eqp(&support)?;
            if ws.iter().all(|&v| v >= -1e-12) {
                let mut wn = vec![0.0; k];
                for (idx, &i) in support.iter().enumerate() {
                    wn[i] = ws[idx].max(0.0);
                }
                let total: f64 = wn.iter().sum();
                for v in &mut wn {
                    *v /= total;
                }
                w = wn;
                // KKT: on the support g_j = -nu; off it we need g_j + nu >= 0
                let mut g = self.c.to_vec();
                for (j, gj) in g.iter_mut().enumerate() {
                    for (i, &wi) in w.iter().enumerate() {
                        *gj += self.h[j * k + i] * wi;
                    }
                }
                let mut worst = None;
                let mut worst_v = -tol;
                for j in 0..k {
                    if support.contains(&j) {
                        continue;
                    }
                    let viol = g[j] + nu;
                    if viol < worst_v {
                        worst_v = viol;
                        worst = Some(j);
                    }
                }
                match worst {
                    None => return Ok(w),
                    Some(j) => support.push(j),
                }
            } else {
                // step toward the EQP point until a coordinate hits zero
                let mut full = vec![0.0; k];
                for (idx, &i) in support.iter().enumerate() {
                    full[i] = ws[idx];
                }
                let mut alpha = 1.0f64;
                let mut blocker = None;
                for &i in &support {
                    if full[i] < w[i] {
                        let a = w[i] / (w[i] - full[i]);
                        if a < alpha {
                            alpha = a;
                            blocker = Some(i);
                        }
                    }
                }
                for i in 0..k {
                    w[i] += alpha * (full[i] - w[i]);
                    if w[i] < 0.0 {
                        w[i] = 0.0;
                    }
                }
                if let Some(bi) = blocker {
                    w[bi] = 0.0;
                    support.retain(|&i| i != bi);
                } else {
                    // numerical stall: accept current point
                    return Ok(w);
                }
            }
        }
        // iteration guard hit; return current feasible point
        let _ = self.objective(&w);
        Ok(w)
    }
}
