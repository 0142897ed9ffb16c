//! The spiky-separated class: conv{0, union over the m-grid of families of
//! signed indicator sums on m pairwise-disjoint intervals of length m^{-5/4}
//! and height m^{-1/6}}. The LMO greedily selects the design points with the
//! largest |w| subject to interval disjointness; when every pairwise design
//! gap exceeds the interval length this is the exact maximizer, otherwise it
//! is a certified feasible lower bound and the outcome is flagged.

use crate::core::{inner_mean, DesignSample, FunctionValues, MemberFn, SpikyMember};
use crate::error::{Error, Result};

use super::LmoOutcome;

pub struct SpikyOracle<'a> {
    m_grid: Vec<usize>,
    sample: &'a DesignSample,
    sorted_x: Vec<f64>,
    sorted_idx: Vec<usize>,
    min_gap: f64,
}

impl<'a> SpikyOracle<'a> {
    pub fn new(m_grid: Vec<usize>, sample: &'a DesignSample) -> Self {
        let sorted_idx = sample.sorted_order().to_vec();
        let sorted_x: Vec<f64> = sorted_idx.iter().map(|&i| sample.x1(i)).collect();
        let min_gap = sample.min_gap_1d();
        SpikyOracle { m_grid, sample, sorted_x, sorted_idx, min_gap }
    }

    pub fn m_grid(&self) -> &[usize] {
        &self.m_grid
    }

    /// Values of a spiky member on the bound sample, using the sorted index.
    pub fn member_values(&self, member: &SpikyMember) -> Vec<f64> {
        let mut out = vec![0.0; self.sample.n()];
        let half = member.interval_length() / 2.0;
        let h = member.height();
        for (c, s) in member.centers.iter().zip(&member.signs) {
            let lo = self.sorted_x.partition_point(|&x| x < c - half);
            let hi = self.sorted_x.partition_point(|&x| x <= c + half);
            for k in lo..hi {
                out[self.sorted_idx[k]] = h * *s as f64;
            }
        }
        out
    }

    /// Greedy member of the m-family maximizing sum_i coeff_i * f(x_i):
    /// pick design points by |coeff| subject to separation, sign by coeff,
    /// then park any unused intervals in free space.
    pub fn greedy_member(&self, coeff: &[f64], m: usize) -> Option<SpikyMember> {
        let mut order: Vec<usize> = (0..coeff.len()).collect();
        order.sort_by(|&a, &b| coeff[b].abs().partial_cmp(&coeff[a].abs()).unwrap());
        self.greedy_member_ordered(coeff, &order, m)
    }

    fn greedy_member_ordered(&self, coeff: &[f64], order: &[usize], m: usize) -> Option<SpikyMember> {
        let len = (m as f64).powf(-1.25);
        let mut centers: Vec<f64> = Vec::new(); // kept sorted
        let mut signs: Vec<i8> = Vec::new();
        for &i in order {
            if centers.len() == m || coeff[i] == 0.0 {
                break;
            }
            let x = self.sample.x1(i);
            let pos = centers.partition_point(|&c| c < x);
            let ok_left = pos == 0 || x - centers[pos - 1] >= len * (1.0 + 1e-12);
            let ok_right = pos == centers.len() || centers[pos] - x >= len * (1.0 + 1e-12);
            if ok_left && ok_right {
                centers.insert(pos, x);
                signs.insert(pos, if coeff[i] >= 0.0 { 1 } else { -1 });
            }
        }
        // park unused intervals in free space, signed by what they cover;
        // the jump margin sits strictly above the conflict threshold so
        // rounding can never re-trigger the same conflict
        let margin = len * (1.0 + 1e-9) + 1e-15;
        let mut cursor = 0.0f64;
        while centers.len() < m && cursor <= 1.0 {
            let pos = centers.partition_point(|&c| c < cursor);
            if pos > 0 && cursor - centers[pos - 1] < len {
                cursor = centers[pos - 1] + margin;
                continue;
            }
            if pos < centers.len() && centers[pos] - cursor < len {
                cursor = centers[pos] + margin;
                continue;
            }
            let covered = self.covered_coeff_sum(coeff, cursor, len / 2.0);
            centers.insert(pos, cursor);
            signs.insert(pos, if covered >= 0.0 { 1 } else { -1 });
            cursor += margin;
        }
        if centers.len() < m {
            return None; // could not park every interval
        }
        Some(SpikyMember { m, centers, signs, weight: 1.0 })
    }

    fn covered_coeff_sum(&self, coeff: &[f64], center: f64, half: f64) -> f64 {
        let lo = self.sorted_x.partition_point(|&x| x < center - half);
        let hi = self.sorted_x.partition_point(|&x| x <= center + half);
        (lo..hi).map(|k| coeff[self.sorted_idx[k]]).sum()
    }

    /// Best greedy member across the m-grid against linear coefficients, or
    /// the zero function. Returns (member-or-none, values, objective, exact).
    /// One |coeff| sort serves the whole grid.
    pub fn greedy_best(&self, coeff: &[f64]) -> (Option<SpikyMember>, Vec<f64>, f64, bool) {
        let n = self.sample.n();
        let mut best: Option<SpikyMember> = None;
        let mut best_vals = vec![0.0; n];
        let mut best_obj = 0.0; // the zero function
        let mut exact = true;
        let mut order: Vec<usize> = (0..coeff.len()).collect();
        order.sort_by(|&a, &b| coeff[b].abs().partial_cmp(&coeff[a].abs()).unwrap());
        for &m in &self.m_grid {
            let len = (m as f64).powf(-1.25);
            let separated = self.min_gap > len;
            if let Some(mem) = self.greedy_member_ordered(coeff, &order, m) {
                let vals = self.member_values(&mem);
                let obj: f64 = coeff.iter().zip(&vals).map(|(a, b)| a * b).sum();
                if obj > best_obj {
                    best_obj = obj;
                    best_vals = vals;
                    best = Some(mem);
                    exact = separated;
                }
            }
        }
        (best, best_vals, best_obj, exact)
    }

    pub fn lmo(&self, w: &FunctionValues) -> Result<LmoOutcome> {
        if self.m_grid.is_empty() {
            return Err(Error::config("spiky m-grid is empty"));
        }
        let n = self.sample.n() as f64;
        let (member, values, obj_sum, exact) = self.greedy_best(w.as_slice());
        let member_fn = match member {
            Some(m) => MemberFn::Spiky(m),
            None => MemberFn::Zero,
        };
        let objective = obj_sum / n;
        debug_assert!(
            (objective - inner_mean(w.as_slice(), &values)).abs() < 1e-12 * (1.0 + objective.abs())
        );
        Ok(LmoOutcome {
            values: FunctionValues(values),
            member: member_fn,
            objective,
            exact,
            gap: 0.0,
        })
    }

    /// Structural membership: mixtures of valid spiky members (and zero)
    /// with total weight <= 1, every m on the grid.
    pub fn feasible_member(&self, f: &MemberFn, tol: f64) -> bool {
        fn walk(o: &SpikyOracle, f: &MemberFn, scale: f64, total: &mut f64, tol: f64) -> bool {
            match f {
                MemberFn::Zero => true,
                MemberFn::Spiky(s) => {
                    if s.validate().is_err() || !o.m_grid.contains(&s.m) {
                        return false;
                    }
                    *total += scale * s.weight;
                    true
                }
                MemberFn::Mixture { parts } => parts
                    .iter()
                    .all(|(w, p)| *w >= -tol && walk(o, p, scale * w, total, tol)),
                _ => false,
            }
        }
        let mut total = 0.0;
        walk(self, f, 1.0, &mut total, tol) && total <= 1.0 + tol
    }
}
