//! Function values on a design sample and the L2(P_n) geometry.

use crate::core::sample::DesignSample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionValues(pub Vec<f64>);

impl FunctionValues {
    pub fn zeros(n: usize) -> Self {
        FunctionValues(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Index<usize> for FunctionValues {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

fn check_len(a: &FunctionValues, b: &FunctionValues, sample: &DesignSample) -> Result<()> {
    if a.len() != sample.n() {
        return Err(Error::LengthMismatch { expected: sample.n(), got: a.len() });
    }
    if b.len() != sample.n() {
        return Err(Error::LengthMismatch { expected: sample.n(), got: b.len() });
    }
    Ok(())
}

/// n^{-1} sum a_i b_i.
pub fn empirical_inner(a: &FunctionValues, b: &FunctionValues, sample: &DesignSample) -> Result<f64> {
    check_len(a, b, sample)?;
    Ok(inner_mean(&a.0, &b.0))
}

pub fn empirical_norm(a: &FunctionValues, sample: &DesignSample) -> Result<f64> {
    Ok(empirical_inner(a, a, sample)?.sqrt())
}

/// Mean of elementwise products, with compensated (Neumaier) accumulation so
/// reductions are identical no matter how work was scheduled upstream.
pub fn inner_mean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y)) / a.len() as f64
}

pub fn norm_mean(a: &[f64]) -> f64 {
    inner_mean(a, a).sqrt()
}

/// Neumaier compensated summation.
pub fn compensated_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Sample mean and standard error of a replicate vector.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum(xs.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::sample::DesignKind;
    use proptest::prelude::*;

    fn sample_n(n: usize) -> DesignSample {
        let pts = (0..n).map(|i| vec![(i as f64 + 0.5) / n as f64]).collect();
        DesignSample::from_points(pts, DesignKind::Fixed).unwrap()
    }

    #[test]
    fn inner_examples() {
        let s = sample_n(2);
        let ones = FunctionValues(vec![1.0, 1.0]);
        assert_eq!(empirical_inner(&ones, &ones, &s).unwrap(), 1.0);
        let a = FunctionValues(vec![1.0, -1.0]);
        assert_eq!(empirical_inner(&a, &ones, &s).unwrap(), 0.0);
        let b = FunctionValues(vec![3.0, 4.0]);
        assert_eq!(empirical_inner(&b, &b, &s).unwrap(), 12.5);
        assert!((empirical_norm(&b, &s).unwrap() - 3.5355339059327378).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let s = sample_n(3);
        let a = FunctionValues(vec![1.0, 2.0]);
        let b = FunctionValues(vec![1.0, 2.0, 3.0]);
        assert!(empirical_inner(&a, &b, &s).is_err());
    }

    proptest! {
        #[test]
        fn cauchy_schwarz(v in proptest::collection::vec(-10.0f64..10.0, 1..32),
                          w_seed in 0u64..1000) {
            let n = v.len();
            let s = sample_n(n);
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(w_seed);
            let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 20.0 - 10.0).collect();
            let a = FunctionValues(v);
            let b = FunctionValues(w);
            let lhs = empirical_inner(&a, &b, &s).unwrap().abs();
            let rhs = empirical_norm(&a, &s).unwrap() * empirical_norm(&b, &s).unwrap();
            prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs));
        }
    }
}
