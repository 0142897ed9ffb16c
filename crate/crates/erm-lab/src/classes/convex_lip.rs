//! Convex 1-Lipschitz functions [0,1] -> [-1,1], d = 1. Feasibility on a
//! sample is a banded system in sorted order (nondecreasing slopes, end-slope
//! bounds, box), so both the LMO (an LP) and the least-squares fit (a QP) go
//! through the banded interior-point solver at O(n) per Newton step.

use crate::core::{DesignSample, FunctionValues, MemberFn};
use crate::core::inner_mean;
use crate::error::Result;
use crate::solvers::ipm::{BandRow, IpmProblem};

use super::{LmoOutcome, QuadOutcome};

pub struct CvxOracle<'a> {
    sample: &'a DesignSample,
    groups: Vec<(f64, Vec<usize>)>,
    xs: Vec<f64>,
}

impl<'a> CvxOracle<'a> {
    pub fn new(sample: &'a DesignSample) -> Self {
        // cluster points closer than 1e-6: a 1-Lipschitz function moves by
        // at most that much across a cluster, far below Monte-Carlo noise,
        // and the convexity rows stay conditioned enough for sharp duals
        let order = sample.sorted_order();
        let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
        for &i in order {
            let x = sample.x1(i);
            match groups.last_mut() {
                Some((gx, idxs)) if x - *gx < 1e-6 => idxs.push(i),
                _ => groups.push((x, vec![i])),
            }
        }
        let xs = groups.iter().map(|(x, _)| *x).collect();
        CvxOracle { sample, groups, xs }
    }

    fn constraint_rows(&self) -> Vec<BandRow> {
        let xs = &self.xs;
        let g = xs.len();
        let mut rows = Vec::with_capacity(3 * g + 2);
        for i in 1..g.saturating_sub(1) {
            let dl = xs[i] - xs[i - 1];
            let dr = xs[i + 1] - xs[i];
            // slope monotonicity as <=: dr*(f_i - f_{i-1}) - dl*(f_{i+1} - f_i) <= 0
            rows.push(BandRow::new(i - 1, vec![-dr, dl + dr, -dl], 0.0));
        }
        if g >= 2 {
            let d0 = xs[1] - xs[0];
            rows.push(BandRow::new(0, vec![1.0, -1.0], d0)); // slope >= -1
            let de = xs[g - 1] - xs[g - 2];
            rows.push(BandRow::new(g - 2, vec![-1.0, 1.0], de)); // slope <= 1
        }
        for i in 0..g {
            rows.push(BandRow::new(i, vec![1.0], 1.0));
            rows.push(BandRow::new(i, vec![-1.0], 1.0));
        }
        rows
    }

    /// A strictly feasible interior point: a shallow parabola.
    fn interior_start(&self) -> Vec<f64> {
        self.xs.iter().map(|x| 0.1 * (x - 0.5) * (x - 0.5) - 0.05).collect()
    }

    fn expand(&self, gv: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.sample.n()];
        for ((_, idxs), &v) in self.groups.iter().zip(gv) {
            for &i in idxs {
                out[i] = v;
            }
        }
        out
    }

    fn member(&self, gv: Vec<f64>) -> MemberFn {
        MemberFn::ConvexPwl { xs: self.xs.clone(), values: gv }
    }

    fn solve(&self, q_diag: Vec<f64>, c: Vec<f64>, tol: f64) -> Result<crate::solvers::ipm::IpmSolution> {
        let g = self.xs.len();
        if g == 1 {
            // single point: the class restricted to one value is just the box
            let v = if q_diag[0] > 0.0 {
                (-c[0] / q_diag[0]).clamp(-1.0, 1.0)
            } else {
                -c[0].signum().min(1.0).max(-1.0)
            };
            return Ok(crate::solvers::ipm::IpmSolution {
                objective: 0.5 * q_diag[0] * v * v + c[0] * v,
                f: vec![v],
                gap: 0.0,
                dual_residual: 0.0,
                iterations: 0,
                converged: true,
            });
        }
        let prob = IpmProblem::new(g, q_diag, c, self.constraint_rows());
        prob.solve(self.interior_start(), tol, 100)
    }

    pub fn lmo(&self, w: &FunctionValues) -> Result<LmoOutcome> {
        let n = self.sample.n() as f64;
        // group objective coefficients; minimize -w'f
        let gw: Vec<f64> = self
            .groups
            .iter()
            .map(|(_, idxs)| idxs.iter().map(|&i| w[i]).sum::<f64>())
            .collect();
        let c: Vec<f64> = gw.iter().map(|v| -v).collect();
        let g = self.xs.len();
        let sol = self.solve(vec![0.0; g], c, 1e-11)?;
        let values = self.expand(&sol.f);
        let objective = inner_mean(w.as_slice(), &values);
        Ok(LmoOutcome {
            values: FunctionValues(values),
            member: self.member(sol.f),
            objective,
            exact: sol.converged,
            gap: sol.gap / n,
        })
    }

    /// Least squares: minimize sum_i (f_i - y_i)^2 as a banded QP.
    pub fn erm_qp(&self, y: &FunctionValues, tol: f64) -> Result<(FunctionValues, MemberFn, f64, bool)> {
        let q: Vec<f64> = self.groups.iter().map(|(_, idxs)| 2.0 * idxs.len() as f64).collect();
        let c: Vec<f64> = self
            .groups
            .iter()
            .map(|(_, idxs)| -2.0 * idxs.iter().map(|&i| y[i]).sum::<f64>())
            .collect();
        let sol = self.solve(q, c, tol)?;
        let values = self.expand(&sol.f);
        let gap = sol.gap / self.sample.n() as f64;
        Ok((FunctionValues(values), self.member(sol.f), gap, sol.converged))
    }

    pub fn maximize_lq(&self, lin: &[f64], quad: &[f64], shift: &[f64]) -> Result<QuadOutcome> {
        // maximize lin'f - sum quad (f - shift)^2  ==
        // minimize sum quad f^2 - (lin + 2 quad shift)' f
        let q: Vec<f64> = self
            .groups
            .iter()
            .map(|(_, idxs)| 2.0 * idxs.iter().map(|&i| quad[i]).sum::<f64>())
            .collect();
        let c: Vec<f64> = self
            .groups
            .iter()
            .map(|(_, idxs)| {
                -idxs.iter().map(|&i| lin[i] + 2.0 * quad[i] * shift[i]).sum::<f64>()
            })
            .collect();
        let sol = self.solve(q, c, 1e-11)?;
        let values = self.expand(&sol.f);
        let mut obj = 0.0;
        for i in 0..values.len() {
            obj += lin[i] * values[i] - quad[i] * (values[i] - shift[i]) * (values[i] - shift[i]);
        }
        Ok(QuadOutcome {
            values: FunctionValues(values),
            member: self.member(sol.f),
            objective: obj,
            gap: sol.gap,
            exact: sol.converged,
        })
    }

    pub fn feasible_values(&self, v: &FunctionValues, tol: f64) -> bool {
        let g = self.xs.len();
        let mut gv = Vec::with_capacity(g);
        for (_, idxs) in &self.groups {
            let first = v[idxs[0]];
            for &i in idxs {
                if (v[i] - first).abs() > tol {
                    return false;
                }
            }
            if first.abs() > 1.0 + tol {
                return false;
            }
            gv.push(first);
        }
        if g < 2 {
            return true;
        }
        let mut prev_slope = f64::NEG_INFINITY;
        for i in 1..g {
            let s = (gv[i] - gv[i - 1]) / (self.xs[i] - self.xs[i - 1]);
            if s < prev_slope - tol {
                return false;
            }
            prev_slope = prev_slope.max(s);
        }
        let s0 = (gv[1] - gv[0]) / (self.xs[1] - self.xs[0]);
        let se = (gv[g - 1] - gv[g - 2]) / (self.xs[g - 1] - self.xs[g - 2]);
        s0 >= -1.0 - tol && se <= 1.0 + tol
    }
}
