//! Linear functions with norm-bounded coefficients: f_theta(x) = <theta, x>,
//! ||theta|| <= R in l1 or l2. The LMO is closed form; least squares under
//! the ball is a ridge-path (l2) or lasso-path (l1) bisection.

use crate::core::{FunctionValues, MemberFn};
use crate::core::{inner_mean, DesignSample};
use crate::error::Result;
use crate::solvers::{dense, lsq};

use super::{CoefNorm, LmoOutcome, QuadOutcome};

pub struct CoefOracle<'a> {
    dim: usize,
    norm: CoefNorm,
    radius: f64,
    sample: &'a DesignSample,
    /// row-major n x d design matrix
    x: Vec<f64>,
}

impl<'a> CoefOracle<'a> {
    pub fn new(dim: usize, norm: CoefNorm, radius: f64, sample: &'a DesignSample) -> Self {
        let mut x = Vec::with_capacity(sample.n() * dim);
        for p in sample.iter_points() {
            x.extend_from_slice(p);
        }
        CoefOracle { dim, norm, radius, sample, x }
    }

    fn apply(&self, theta: &[f64]) -> Vec<f64> {
        let n = self.sample.n();
        let d = self.dim;
        (0..n)
            .map(|i| {
                let row = &self.x[i * d..(i + 1) * d];
                row.iter().zip(theta).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    fn xt_apply(&self, w: &[f64]) -> Vec<f64> {
        let n = self.sample.n();
        let d = self.dim;
        let mut v = vec![0.0; d];
        for i in 0..n {
            let row = &self.x[i * d..(i + 1) * d];
            for j in 0..d {
                v[j] += row[j] * w[i];
            }
        }
        v
    }

    fn outcome(&self, theta: Vec<f64>, w: &FunctionValues) -> LmoOutcome {
        let values = self.apply(&theta);
        let objective = inner_mean(w.as_slice(), &values);
        LmoOutcome {
            values: FunctionValues(values),
            member: MemberFn::Linear { theta },
            objective,
            exact: true,
            gap: 0.0,
        }
    }

    pub fn lmo(&self, w: &FunctionValues) -> Result<LmoOutcome> {
        let v = self.xt_apply(w.as_slice());
        let theta = match self.norm {
            CoefNorm::L2 => {
                let nrm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if nrm == 0.0 {
                    vec![0.0; self.dim]
                } else {
                    v.iter().map(|a| self.radius * a / nrm).collect()
                }
            }
            CoefNorm::L1 => {
                let mut best = 0usize;
                for j in 1..self.dim {
                    if v[j].abs() > v[best].abs() {
                        best = j;
                    }
                }
                let mut t = vec![0.0; self.dim];
                if v[best] != 0.0 {
                    t[best] = self.radius * v[best].signum();
                }
                t
            }
        };
        Ok(self.outcome(theta, w))
    }

    pub fn exact_erm(&self, y: &FunctionValues) -> Result<(FunctionValues, MemberFn)> {
        let n = self.sample.n();
        let theta = match self.norm {
            CoefNorm::L2 => lsq::l2_ball_ls(&self.x, n, self.dim, y.as_slice(), self.radius)?,
            CoefNorm::L1 => lsq::l1_ball_ls(&self.x, n, self.dim, y.as_slice(), self.radius)?,
        };
        let values = self.apply(&theta);
        Ok((FunctionValues(values), MemberFn::Linear { theta }))
    }

    /// Exact localized maximization for the l2 ball (trust-region style
    /// bisection); l1 falls back to conditional gradient.
    pub fn maximize_lq(
        &self,
        lin: &[f64],
        quad: &[f64],
        shift: &[f64],
    ) -> Result<Option<QuadOutcome>> {
        if matches!(self.norm, CoefNorm::L1) {
            return Ok(None);
        }
        let n = self.sample.n();
        let d = self.dim;
        // maximize a'theta - theta' M theta with
        //   M = sum quad_i x_i x_i',  a = X'(lin + 2 quad shift)
        let mut m = vec![0.0; d * d];
        let mut a = vec![0.0; d];
        for i in 0..n {
            let row = &self.x[i * d..(i + 1) * d];
            let ai = lin[i] + 2.0 * quad[i] * shift[i];
            for r in 0..d {
                a[r] += ai * row[r];
                for c in r..d {
                    m[r * d + c] += quad[i] * row[r] * row[c];
                }
            }
        }
        for r in 0..d {
            for c in 0..r {
                m[r * d + c] = m[c * d + r];
            }
        }
        let norm_of = |t: &[f64]| t.iter().map(|v| v * v).sum::<f64>().sqrt();
        // stationary point theta(mu) = (2M + 2 mu I)^{-1} a, mu >= 0
        let solve_mu = |mu: f64| -> Result<Vec<f64>> {
            let mut mm = vec![0.0; d * d];
            for i in 0..d * d {
                mm[i] = 2.0 * m[i];
            }
            for i in 0..d {
                mm[i * d + i] += 2.0 * mu;
            }
            dense::solve(mm, a.clone())
        };
        let theta = match solve_mu(1e-14) {
            Ok(t) if norm_of(&t) <= self.radius => t,
            _ => {
                let an = norm_of(&a);
                if an == 0.0 {
                    vec![0.0; d]
                } else {
                    let mut lo = 0.0f64;
                    let mut hi = an / (2.0 * self.radius) + 1e-12;
                    let mut best = vec![0.0; d];
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        let t = solve_mu(mid.max(1e-300))?;
                        if norm_of(&t) > self.radius {
                            lo = mid;
                        } else {
                            hi = mid;
                            best = t;
                        }
                        if hi - lo < 1e-15 * (1.0 + hi) {
                            break;
                        }
                    }
                    best
                }
            }
        };
        let values = self.apply(&theta);
        let mut obj = 0.0;
        for i in 0..n {
            obj += lin[i] * values[i] - quad[i] * (values[i] - shift[i]) * (values[i] - shift[i]);
        }
        Ok(Some(QuadOutcome {
            values: FunctionValues(values),
            member: MemberFn::Linear { theta },
            objective: obj,
            gap: 0.0,
            exact: true,
        }))
    }

    /// Values are feasible iff some ball-constrained theta reproduces them.
    pub fn feasible_values(&self, v: &FunctionValues, tol: f64) -> Result<bool> {
        let (proj, _) = self.exact_erm(v)?;
        let d2: f64 = proj
            .as_slice()
            .iter()
            .zip(v.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(d2.sqrt() <= tol * (self.sample.n() as f64).sqrt().max(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::DesignSample;

    #[test]
    fn l2_lmo_is_scaled_gradient() {
        let s = DesignSample::identity(4);
        let c = CoefOracle::new(4, CoefNorm::L2, 1.0, &s);
        let w = FunctionValues(vec![3.0, 0.0, 4.0, 0.0]);
        let out = c.lmo(&w).unwrap();
        // theta = (0.6, 0, 0.8, 0); objective = (3*0.6 + 4*0.8)/4 = 5/4
        assert!((out.objective - 1.25).abs() < 1e-12);
        assert!((out.values[0] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn l1_lmo_is_signed_max_coordinate() {
        let s = DesignSample::identity(3);
        let c = CoefOracle::new(3, CoefNorm::L1, 2.0, &s);
        let out = c.lmo(&FunctionValues(vec![0.5, -3.0, 1.0])).unwrap();
        assert_eq!(out.values.as_slice(), &[0.0, -2.0, 0.0]);
        assert!((out.objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn erm_projects_when_ball_is_active() {
        let s = DesignSample::identity(2);
        let c = CoefOracle::new(2, CoefNorm::L2, 1.0, &s);
        let (v, _) = c.exact_erm(&FunctionValues(vec![3.0, 4.0])).unwrap();
        assert!((v[0] - 0.6).abs() < 1e-8, "{v:?}");
        assert!((v[1] - 0.8).abs() < 1e-8);
    }
}
