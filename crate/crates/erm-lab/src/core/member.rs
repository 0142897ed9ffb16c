//! Concrete function representations. Every class member an oracle can return
//! is one of these, so fits stay evaluable at out-of-sample points and convex
//! combinations of oracle outputs remain representable (`Mixture`).

use serde::{Deserialize, Serialize};

use crate::core::sample::DesignSample;
use crate::core::values::FunctionValues;
use crate::error::{Error, Result};

/// One signed-indicator-sum member: weight * m^{-1/6} * sum_j sign_j 1{ |x - c_j| <= m^{-5/4}/2 }.
/// Intervals have length m^{-5/4} and must be pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikyMember {
    pub m: usize,
    pub centers: Vec<f64>,
    pub signs: Vec<i8>,
    pub weight: f64,
}

impl SpikyMember {
    pub fn interval_length(&self) -> f64 {
        (self.m as f64).powf(-1.25)
    }

    pub fn height(&self) -> f64 {
        self.weight * (self.m as f64).powf(-1.0 / 6.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::config("spiky member needs m >= 1"));
        }
        if self.centers.len() != self.m || self.signs.len() != self.m {
            return Err(Error::config("spiky member needs m centers and m signs"));
        }
        if !(0.0..=1.0).contains(&self.weight) {
            return Err(Error::config("spiky weight must lie in [0,1]"));
        }
        for &c in &self.centers {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::config("spiky centers must lie in [0,1]"));
            }
        }
        for &s in &self.signs {
            if s != 1 && s != -1 {
                return Err(Error::config("spiky signs must be +1 or -1"));
            }
        }
        if !self.intervals_disjoint() {
            return Err(Error::Infeasible("spiky intervals overlap".into()));
        }
        Ok(())
    }

    pub fn intervals_disjoint(&self) -> bool {
        let len = self.interval_length();
        let mut cs = self.centers.clone();
        cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cs.windows(2).all(|w| w[1] - w[0] >= len)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let half = self.interval_length() / 2.0;
        let h = self.height();
        // Intervals are disjoint; at most one can cover x.
        for (c, s) in self.centers.iter().zip(&self.signs) {
            if (x - c).abs() <= half {
                return h * *s as f64;
            }
        }
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MemberFn {
    Zero,
    Constant { value: f64 },
    /// <theta, x> on [0,1]^d.
    Linear { theta: Vec<f64> },
    /// a + b*x on [0,1] (1-d).
    Affine { intercept: f64, slope: f64 },
    /// Carry-forward step function on sorted breakpoints: value is
    /// values[i] for x in [xs[i], xs[i+1]), values[0] left of xs[0].
    PiecewiseConstant { xs: Vec<f64>, values: Vec<f64> },
    /// Piecewise-linear convex interpolant of (xs, values), extended by its
    /// end slopes outside the range and clamped to [-1, 1].
    ConvexPwl { xs: Vec<f64>, values: Vec<f64> },
    /// max_i (a_i + b_i x), a convex piecewise-linear function given by lines.
    MaxAffine { lines: Vec<(f64, f64)> },
    /// a*(x-b)^2 + c.
    Quadratic { a: f64, b: f64, c: f64 },
    Spiky(SpikyMember),
    /// Convex combination sum_i w_i f_i with w_i >= 0, sum w_i <= 1
    /// (any missing mass is the zero function).
    Mixture { parts: Vec<(f64, MemberFn)> },
}

impl MemberFn {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            MemberFn::Zero => 0.0,
            MemberFn::Constant { value } => *value,
            MemberFn::Linear { theta } => {
                theta.iter().zip(x).map(|(t, xi)| t * xi).sum()
            }
            MemberFn::Affine { intercept, slope } => intercept + slope * x[0],
            MemberFn::PiecewiseConstant { xs, values } => {
                let q = x[0];
                match xs.binary_search_by(|v| v.partial_cmp(&q).unwrap()) {
                    Ok(i) => values[i],
                    Err(0) => values[0],
                    Err(i) => values[i - 1],
                }
            }
            MemberFn::ConvexPwl { xs, values } => {
                let q = x[0];
                let k = xs.len();
                if k == 1 {
                    return values[0].clamp(-1.0, 1.0);
                }
                let y = if q <= xs[0] {
                    let s = (values[1] - values[0]) / (xs[1] - xs[0]);
                    values[0] + s * (q - xs[0])
                } else if q >= xs[k - 1] {
                    let s = (values[k - 1] - values[k - 2]) / (xs[k - 1] - xs[k - 2]);
                    values[k - 1] + s * (q - xs[k - 1])
                } else {
                    let j = match xs.binary_search_by(|v| v.partial_cmp(&q).unwrap()) {
                        Ok(i) => return values[i].clamp(-1.0, 1.0),
                        Err(i) => i,
                    };
                    let t = (q - xs[j - 1]) / (xs[j] - xs[j - 1]);
                    values[j - 1] + t * (values[j] - values[j - 1])
                };
                y.clamp(-1.0, 1.0)
            }
            MemberFn::MaxAffine { lines } => lines
                .iter()
                .map(|(a, b)| a + b * x[0])
                .fold(f64::NEG_INFINITY, f64::max),
            MemberFn::Quadratic { a, b, c } => {
                let t = x[0] - b;
                a * t * t + c
            }
            MemberFn::Spiky(s) => s.eval(x[0]),
            MemberFn::Mixture { parts } => {
                parts.iter().map(|(w, f)| w * f.eval(x)).sum()
            }
        }
    }

    /// Evaluate on every point of a sample. Query points must lie in the
    /// domain; design samples enforce that at construction.
    pub fn eval_on(&self, sample: &DesignSample) -> FunctionValues {
        FunctionValues(sample.iter_points().map(|p| self.eval(p)).collect())
    }

    /// Evaluate at explicit query points, checking the domain contract.
    pub fn eval_at(&self, queries: &[Vec<f64>]) -> Result<Vec<f64>> {
        for q in queries {
            for &c in q {
                if !(0.0..=1.0).contains(&c) {
                    return Err(Error::contract(format!(
                        "query coordinate {c} outside [0,1]^d"
                    )));
                }
            }
        }
        Ok(queries.iter().map(|q| self.eval(q)).collect())
    }

    /// Flatten nested mixtures into one weighted list (zero parts dropped).
    pub fn mixture(parts: Vec<(f64, MemberFn)>) -> MemberFn {
        let mut flat: Vec<(f64, MemberFn)> = Vec::new();
        let mut stack = parts;
        while let Some((w, f)) = stack.pop() {
            if w == 0.0 {
                continue;
            }
            match f {
                MemberFn::Mixture { parts } => {
                    for (wi, fi) in parts {
                        stack.push((w * wi, fi));
                    }
                }
                MemberFn::Zero => {}
                other => flat.push((w, other)),
            }
        }
        match flat.len() {
            0 => MemberFn::Zero,
            1 if (flat[0].0 - 1.0).abs() < 1e-15 => flat.pop().unwrap().1,
            _ => MemberFn::Mixture { parts: flat },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_eval() {
        let f = MemberFn::Linear { theta: vec![0.5] };
        assert_eq!(f.eval(&[0.4]), 0.2);
    }

    #[test]
    fn step_is_carry_forward() {
        let f = MemberFn::PiecewiseConstant { xs: vec![0.2, 0.8], values: vec![0.0, 1.0] };
        assert_eq!(f.eval(&[0.5]), 0.0);
        assert_eq!(f.eval(&[0.8]), 1.0);
        assert_eq!(f.eval(&[0.1]), 0.0);
        assert_eq!(f.eval(&[0.9]), 1.0);
    }

    #[test]
    fn spiky_indicator_eval() {
        // m = 1: interval length 1, height 1. I(0.5, 1) = [0, 1] covers both queries.
        let s = SpikyMember { m: 1, centers: vec![0.5], signs: vec![1], weight: 1.0 };
        s.validate().unwrap();
        assert_eq!(s.eval(0.5), 1.0);
        assert_eq!(s.eval(0.9), 1.0);
        // m = 4: length 4^{-5/4} ~ 0.177, so 0.9 falls outside every interval.
        let s4 = SpikyMember {
            m: 4,
            centers: vec![0.1, 0.32, 0.55, 0.78],
            signs: vec![1, -1, 1, 1],
            weight: 1.0,
        };
        s4.validate().unwrap();
        let h = 4f64.powf(-1.0 / 6.0);
        assert!((s4.eval(0.55) - h).abs() < 1e-15);
        assert!((s4.eval(0.32) + h).abs() < 1e-15);
        assert_eq!(s4.eval(0.9), 0.0);
    }

    #[test]
    fn spiky_overlap_rejected() {
        let s = SpikyMember { m: 2, centers: vec![0.5, 0.55], signs: vec![1, 1], weight: 1.0 };
        assert!(s.validate().is_err());
    }

    #[test]
    fn mixture_flattens() {
        let inner = MemberFn::mixture(vec![(0.5, MemberFn::Constant { value: 1.0 })]);
        let outer = MemberFn::mixture(vec![(0.5, inner), (0.25, MemberFn::Zero)]);
        assert_eq!(outer.eval(&[0.3]), 0.25);
    }

    #[test]
    fn query_domain_contract() {
        let f = MemberFn::Zero;
        assert!(f.eval_at(&[vec![1.5]]).is_err());
        assert!(f.eval_at(&[vec![0.5]]).is_ok());
    }
}
