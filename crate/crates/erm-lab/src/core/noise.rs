//! Standard Gaussian noise vectors, reproducible from a replicate seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::core::values::FunctionValues;

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseVector {
    pub xi: Vec<f64>,
    pub seed: u64,
}

impl NoiseVector {
    pub fn standard(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        NoiseVector { xi, seed }
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn as_values(&self) -> FunctionValues {
        FunctionValues(self.xi.clone())
    }

    /// Y_i = f0(x_i) + xi_i.
    pub fn targets(&self, f0_values: &FunctionValues) -> FunctionValues {
        debug_assert_eq!(f0_values.len(), self.len());
        FunctionValues(self.xi.iter().zip(&f0_values.0).map(|(x, f)| f + x).collect())
    }
}
