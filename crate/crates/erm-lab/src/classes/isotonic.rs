//! Nondecreasing functions [0,1] -> [-1,1]. The LMO maximizer is a +/-1 step
//! function, found by a threshold scan over prefix sums; least squares is
//! pool-adjacent-violators with the box folded in afterwards.

use crate::core::{DesignSample, FunctionValues, MemberFn};
use crate::error::Result;
use crate::solvers::pava;

use super::{LmoOutcome, QuadOutcome};

pub struct IsoOracle<'a> {
    sample: &'a DesignSample,
    /// equal-x groups in sorted order: (x, original indices)
    groups: Vec<(f64, Vec<usize>)>,
}

impl<'a> IsoOracle<'a> {
    pub fn new(sample: &'a DesignSample) -> Self {
        let order = sample.sorted_order();
        let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
        for &i in order {
            let x = sample.x1(i);
            match groups.last_mut() {
                Some((gx, idxs)) if *gx == x => idxs.push(i),
                _ => groups.push((x, vec![i])),
            }
        }
        IsoOracle { sample, groups }
    }

    fn expand(&self, group_values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.sample.n()];
        for ((_, idxs), &v) in self.groups.iter().zip(group_values) {
            for &i in idxs {
                out[i] = v;
            }
        }
        out
    }

    fn step_member(&self, k: usize) -> MemberFn {
        let g = self.groups.len();
        if k == 0 {
            MemberFn::Constant { value: 1.0 }
        } else if k == g {
            MemberFn::Constant { value: -1.0 }
        } else {
            MemberFn::PiecewiseConstant {
                xs: vec![0.0, self.groups[k].0],
                values: vec![-1.0, 1.0],
            }
        }
    }

    pub fn lmo(&self, w: &FunctionValues) -> Result<LmoOutcome> {
        let g = self.groups.len();
        let gw: Vec<f64> = self
            .groups
            .iter()
            .map(|(_, idxs)| idxs.iter().map(|&i| w[i]).sum())
            .collect();
        let total: f64 = gw.iter().sum();
        // f = -1 on the first k groups, +1 on the rest: objective (T - 2 S_k)/n
        let mut best_k = 0usize;
        let mut best = total;
        let mut prefix = 0.0;
        for k in 1..=g {
            prefix += gw[k - 1];
            let obj = total - 2.0 * prefix;
            if obj > best {
                best = obj;
                best_k = k;
            }
        }
        let n = self.sample.n() as f64;
        if best <= 1e-14 * (1.0 + gw.iter().map(|v| v.abs()).sum::<f64>()) {
            // tie against the zero constant is broken toward zero
            return Ok(LmoOutcome {
                values: FunctionValues(vec![0.0; self.sample.n()]),
                member: MemberFn::Zero,
                objective: 0.0,
                exact: true,
                gap: 0.0,
            });
        }
        let member = self.step_member(best_k);
        let gv: Vec<f64> = (0..g).map(|j| if j < best_k { -1.0 } else { 1.0 }).collect();
        Ok(LmoOutcome {
            values: FunctionValues(self.expand(&gv)),
            member,
            objective: best / n,
            exact: true,
            gap: 0.0,
        })
    }

    pub fn exact_erm(&self, y: &FunctionValues) -> (FunctionValues, MemberFn) {
        let gy: Vec<f64> = self
            .groups
            .iter()
            .map(|(_, idxs)| idxs.iter().map(|&i| y[i]).sum::<f64>() / idxs.len() as f64)
            .collect();
        let gwt: Vec<f64> = self.groups.iter().map(|(_, idxs)| idxs.len() as f64).collect();
        let fit = pava::pava_box_weighted(&gy, &gwt, -1.0, 1.0);
        let member = MemberFn::PiecewiseConstant {
            xs: self.groups.iter().map(|(x, _)| *x).collect(),
            values: fit.clone(),
        };
        (FunctionValues(self.expand(&fit)), member)
    }

    pub fn maximize_lq(&self, lin: &[f64], quad: &[f64], shift: &[f64]) -> QuadOutcome {
        let q: Vec<f64> = self
            .groups
            .iter()
            .map(|(_, idxs)| idxs.iter().map(|&i| quad[i]).sum())
            .collect();
        let b: Vec<f64> = self
            .groups
            .iter()
            .map(|(_, idxs)| {
                idxs.iter().map(|&i| quad[i] * shift[i] + 0.5 * lin[i]).sum()
            })
            .collect();
        let fit = pava::pava_box_linear_quadratic(&q, &b, -1.0, 1.0);
        let values = self.expand(&fit);
        let mut obj = 0.0;
        for i in 0..values.len() {
            obj += lin[i] * values[i] - quad[i] * (values[i] - shift[i]) * (values[i] - shift[i]);
        }
        let member = MemberFn::PiecewiseConstant {
            xs: self.groups.iter().map(|(x, _)| *x).collect(),
            values: fit,
        };
        QuadOutcome {
            values: FunctionValues(values),
            member,
            objective: obj,
            gap: 0.0,
            exact: true,
        }
    }

    pub fn feasible_values(&self, v: &FunctionValues, tol: f64) -> bool {
        let mut prev = f64::NEG_INFINITY;
        for (_, idxs) in &self.groups {
            let first = v[idxs[0]];
            for &i in idxs {
                if (v[i] - first).abs() > tol {
                    return false; // one x, two values
                }
            }
            if first < prev - tol || first.abs() > 1.0 + tol {
                return false;
            }
            prev = prev.max(first);
        }
        true
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }
}
