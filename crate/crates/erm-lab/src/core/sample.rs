//! Design samples: the points x_1..x_n, their empirical measure, and the
//! distributions they can be drawn from. Domain is always [0,1]^d.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionId {
    /// Uniform on [0,1]^d.
    Uniform { d: usize },
}

impl DistributionId {
    pub fn dim(&self) -> usize {
        match self {
            DistributionId::Uniform { d } => *d,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DesignKind {
    Fixed,
    Drawn { distribution: DistributionId, seed: u64 },
}

/// Immutable sample of n points in [0,1]^d plus the structure the empirical
/// measure induces: for d = 1 the sort permutation is precomputed since every
/// shape-constrained oracle works in sorted order.
#[derive(Debug, Clone)]
pub struct DesignSample {
    points: Vec<f64>, // row-major n x d
    n: usize,
    d: usize,
    kind: DesignKind,
    order_1d: Option<Vec<usize>>,
}

impl DesignSample {
    pub fn from_points(points: Vec<Vec<f64>>, kind: DesignKind) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::contract("design sample must contain at least one point"));
        }
        let d = points[0].len();
        if d == 0 {
            return Err(Error::contract("points must have dimension >= 1"));
        }
        let mut flat = Vec::with_capacity(points.len() * d);
        for p in &points {
            if p.len() != d {
                return Err(Error::contract("all points must share one dimension"));
            }
            for &c in p {
                if !(0.0..=1.0).contains(&c) || !c.is_finite() {
                    return Err(Error::contract(format!("coordinate {c} outside [0,1]")));
                }
                flat.push(c);
            }
        }
        Ok(Self::from_flat(flat, points.len(), d, kind))
    }

    fn from_flat(points: Vec<f64>, n: usize, d: usize, kind: DesignKind) -> Self {
        let order_1d = if d == 1 {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| points[a].partial_cmp(&points[b]).unwrap());
            Some(idx)
        } else {
            None
        };
        DesignSample { points, n, d, kind, order_1d }
    }

    /// Draw n i.i.d. points; reproducible from (distribution, seed).
    pub fn draw(distribution: DistributionId, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::contract("n must be >= 1"));
        }
        let d = distribution.dim();
        if d == 0 {
            return Err(Error::config("distribution dimension must be >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut flat = Vec::with_capacity(n * d);
        for _ in 0..n * d {
            flat.push(rng.random::<f64>());
        }
        Ok(Self::from_flat(flat, n, d, DesignKind::Drawn { distribution, seed }))
    }

    /// The n x n identity design: point i is the i-th standard basis vector
    /// of [0,1]^n. Features are orthonormal as vectors in R^n.
    pub fn identity(n: usize) -> Self {
        let mut flat = vec![0.0; n * n];
        for i in 0..n {
            flat[i * n + i] = 1.0;
        }
        Self::from_flat(flat, n, n, DesignKind::Fixed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> &DesignKind {
        &self.kind
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    /// First coordinate of point i (the coordinate for d = 1 classes).
    pub fn x1(&self, i: usize) -> f64 {
        self.points[i * self.d]
    }

    /// Indices sorted by the 1-d coordinate. Panics if d != 1.
    pub fn sorted_order(&self) -> &[usize] {
        self.order_1d
            .as_deref()
            .expect("sorted order is only defined for 1-d samples")
    }

    /// Sorted 1-d coordinates.
    pub fn sorted_x(&self) -> Vec<f64> {
        self.sorted_order().iter().map(|&i| self.x1(i)).collect()
    }

    /// Minimum gap between consecutive sorted coordinates (d = 1).
    pub fn min_gap_1d(&self) -> f64 {
        let xs = self.sorted_x();
        let mut gap = f64::INFINITY;
        for w in xs.windows(2) {
            gap = gap.min(w[1] - w[0]);
        }
        gap
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n).map(move |i| self.point(i))
    }

    /// Concatenate two samples over the same domain (self first). The result
    /// is a fixed design; used to couple a training sample with a reference
    /// sample inside one constraint system.
    pub fn concat(&self, other: &DesignSample) -> Result<DesignSample> {
        if self.d != other.d {
            return Err(Error::contract("cannot concatenate samples of different dimension"));
        }
        let mut flat = self.points.clone();
        flat.extend_from_slice(&other.points);
        Ok(Self::from_flat(flat, self.n + other.n, self.d, DesignKind::Fixed))
    }
}
