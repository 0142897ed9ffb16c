//! Symmetric positive-definite banded systems: storage, Cholesky, solve.

use crate::error::{Error, Result};

/// Lower-band storage of a symmetric n x n matrix with half-bandwidth p:
/// entry (i, i-k) lives at band[i * (p+1) + k] for k in 0..=min(i, p).
#[derive(Debug, Clone)]
pub struct BandedSym {
    pub n: usize,
    pub p: usize,
    pub band: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, p: usize) -> Self {
        BandedSym { n, p, band: vec![0.0; n * (p + 1)] }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        debug_assert!(k <= self.p);
        self.band[hi * (self.p + 1) + k] += v;
    }

    #[inline]
    fn get(&self, i: usize, k: usize) -> f64 {
        self.band[i * (self.p + 1) + k]
    }

    /// In-place LL^T factorization. Tiny diagonal boosts guard against
    /// semidefinite corner cases from degenerate constraints.
    pub fn cholesky(mut self) -> Result<BandedChol> {
        let (n, p) = (self.n, self.p);
        let scale = (0..n).map(|i| self.get(i, 0).abs()).fold(0.0f64, f64::max);
        let floor = scale.max(1e-300) * 1e-14;
        for j in 0..n {
            let start = j.saturating_sub(p);
            let mut d = self.get(j, 0);
            for k in start..j {
                let l = self.get(j, j - k);
                d -= l * l;
            }
            if d <= floor {
                d = floor.max(1e-300);
            }
            let dj = d.sqrt();
            self.band[j * (p + 1)] = dj;
            let end = (j + p).min(n - 1);
            for i in j + 1..=end {
                let mut s = if i - j <= p { self.get(i, i - j) } else { 0.0 };
                let lo = i.saturating_sub(p).max(start);
                for k in lo..j {
                    s -= self.get(i, i - k) * self.get(j, j - k);
                }
                self.band[i * (p + 1) + (i - j)] = s / dj;
            }
        }
        Ok(BandedChol { n, p, band: self.band })
    }
}

#[derive(Debug, Clone)]
pub struct BandedChol {
    n: usize,
    p: usize,
    band: Vec<f64>,
}

impl BandedChol {
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let (n, p) = (self.n, self.p);
        if rhs.len() != n {
            return Err(Error::Solver("rhs length mismatch in banded solve".into()));
        }
        let mut x = rhs.to_vec();
        // forward: L y = rhs
        for i in 0..n {
            let start = i.saturating_sub(p);
            let mut s = x[i];
            for k in start..i {
                s -= self.band[i * (p + 1) + (i - k)] * x[k];
            }
            x[i] = s / self.band[i * (p + 1)];
        }
        // backward: L^T x = y
        for i in (0..n).rev() {
            let end = (i + p).min(n - 1);
            let mut s = x[i];
            for j in i + 1..=end {
                s -= self.band[j * (p + 1) + (j - i)] * x[j];
            }
            x[i] = s / self.band[i * (p + 1)];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal() {
        // M = tridiag(-1, 3, -1), n = 5
        let n = 5;
        let mut m = BandedSym::zeros(n, 1);
        for i in 0..n {
            m.add(i, i, 3.0);
            if i + 1 < n {
                m.add(i + 1, i, -1.0);
            }
        }
        let rhs = vec![1.0, 2.0, 3.0, 2.0, 1.0];
        let x = m.clone().cholesky().unwrap().solve(&rhs).unwrap();
        // verify residual
        for i in 0..n {
            let mut r = 3.0 * x[i];
            if i > 0 {
                r -= x[i - 1];
            }
            if i + 1 < n {
                r -= x[i + 1];
            }
            assert!((r - rhs[i]).abs() < 1e-12);
        }
    }
}
