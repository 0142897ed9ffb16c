//! Finite dictionary classes: an explicit list of generator functions, used
//! either as a convex hull (for ERM and widths) or as a bare set (packing
//! tests only).

use crate::core::{FunctionValues, MemberFn};
use crate::core::{inner_mean, DesignSample};
use crate::error::{Error, Result};
use crate::solvers::simplex_qp::SimplexQp;

use super::{LmoOutcome, QuadOutcome};

pub struct DictOracle<'a> {
    generators: &'a [MemberFn],
    hull: bool,
    sample: &'a DesignSample,
    /// k x n generator values on the sample.
    values: Vec<Vec<f64>>,
}

impl<'a> DictOracle<'a> {
    pub fn new(generators: &'a [MemberFn], hull: bool, sample: &'a DesignSample) -> Self {
        let values = generators.iter().map(|g| g.eval_on(sample).0).collect();
        DictOracle { generators, hull, sample, values }
    }

    pub fn lmo(&self, w: &FunctionValues) -> Result<LmoOutcome> {
        let mut best = 0usize;
        let mut best_obj = f64::NEG_INFINITY;
        for (j, v) in self.values.iter().enumerate() {
            let obj = inner_mean(w.as_slice(), v);
            if obj > best_obj {
                best_obj = obj;
                best = j;
            }
        }
        Ok(LmoOutcome {
            values: FunctionValues(self.values[best].clone()),
            member: self.generators[best].clone(),
            objective: best_obj,
            exact: true,
            gap: 0.0,
        })
    }

    fn mixture_member(&self, weights: &[f64]) -> MemberFn {
        MemberFn::mixture(
            weights
                .iter()
                .zip(self.generators)
                .filter(|(w, _)| **w > 1e-14)
                .map(|(w, g)| (*w, g.clone()))
                .collect(),
        )
    }

    fn mixture_values(&self, weights: &[f64]) -> Vec<f64> {
        let n = self.sample.n();
        let mut out = vec![0.0; n];
        for (w, v) in weights.iter().zip(&self.values) {
            if *w == 0.0 {
                continue;
            }
            for i in 0..n {
                out[i] += w * v[i];
            }
        }
        out
    }

    /// Least squares over the simplex of vertex weights (hull), or best
    /// single generator (set-only).
    pub fn exact_erm(&self, y: &FunctionValues) -> Result<(FunctionValues, MemberFn)> {
        if !self.hull {
            let mut best = 0usize;
            let mut best_loss = f64::INFINITY;
            for (j, v) in self.values.iter().enumerate() {
                let loss: f64 = v.iter().zip(y.as_slice()).map(|(a, b)| (a - b) * (a - b)).sum();
                if loss < best_loss {
                    best_loss = loss;
                    best = j;
                }
            }
            return Ok((
                FunctionValues(self.values[best].clone()),
                self.generators[best].clone(),
            ));
        }
        let k = self.values.len();
        let mut h = vec![0.0; k * k];
        let mut c = vec![0.0; k];
        for i in 0..k {
            for j in i..k {
                let dot: f64 =
                    self.values[i].iter().zip(&self.values[j]).map(|(a, b)| a * b).sum();
                h[i * k + j] = 2.0 * dot;
                h[j * k + i] = 2.0 * dot;
            }
            c[i] = -2.0 * self.values[i].iter().zip(y.as_slice()).map(|(a, b)| a * b).sum::<f64>();
        }
        let w = SimplexQp::new(&h, &c, k).solve()?;
        Ok((FunctionValues(self.mixture_values(&w)), self.mixture_member(&w)))
    }

    /// maximize lin'f - sum quad (f - shift)^2 over the hull: a simplex QP in
    /// the vertex weights.
    pub fn maximize_lq(&self, lin: &[f64], quad: &[f64], shift: &[f64]) -> Result<QuadOutcome> {
        if !self.hull {
            return Err(Error::contract("localized maximization needs the hull variant"));
        }
        let k = self.values.len();
        let n = self.sample.n();
        // objective(w) = b'Vw - (Vw)'Q(Vw) + const; minimize the negation
        let mut h = vec![0.0; k * k];
        let mut c = vec![0.0; k];
        for i in 0..k {
            for j in i..k {
                let mut dot = 0.0;
                for t in 0..n {
                    dot += quad[t] * self.values[i][t] * self.values[j][t];
                }
                h[i * k + j] = 2.0 * dot;
                h[j * k + i] = 2.0 * dot;
            }
            let mut lin_i = 0.0;
            for t in 0..n {
                lin_i += (lin[t] + 2.0 * quad[t] * shift[t]) * self.values[i][t];
            }
            c[i] = -lin_i;
        }
        let w = SimplexQp::new(&h, &c, k).solve()?;
        let values = self.mixture_values(&w);
        let mut obj = 0.0;
        for t in 0..n {
            obj += lin[t] * values[t] - quad[t] * (values[t] - shift[t]) * (values[t] - shift[t]);
        }
        Ok(QuadOutcome {
            values: FunctionValues(values),
            member: self.mixture_member(&w),
            objective: obj,
            gap: 0.0,
            exact: true,
        })
    }

    /// Hull membership via projection distance; set-only membership via
    /// exact match against a generator.
    pub fn feasible_values(&self, v: &FunctionValues, tol: f64) -> Result<bool> {
        if self.hull {
            let (proj, _) = self.exact_erm(v)?;
            let d2: f64 = proj
                .as_slice()
                .iter()
                .zip(v.as_slice())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            Ok(d2.sqrt() <= tol * (self.sample.n() as f64).sqrt().max(1.0))
        } else {
            Ok(self.values.iter().any(|g| {
                g.iter().zip(v.as_slice()).all(|(a, b)| (a - b).abs() <= tol)
            }))
        }
    }
}

/// All 2^n sign patterns on a sample as piecewise-constant generators; the
/// hull's value set is the full cube [-1,1]^n. Intended for small n.
pub fn sign_hypercube_generators(sample: &DesignSample) -> Vec<MemberFn> {
    let n = sample.n();
    assert!(n <= 16, "sign hypercube blows up past n = 16");
    let xs = sample.sorted_x();
    let order = sample.sorted_order();
    (0..(1usize << n))
        .map(|mask| {
            // values in sorted position
            let mut vals = vec![0.0; n];
            for (pos, &orig) in order.iter().enumerate() {
                vals[pos] = if mask >> orig & 1 == 1 { 1.0 } else { -1.0 };
            }
            MemberFn::PiecewiseConstant { xs: xs.clone(), values: vals }
        })
        .collect()
}
