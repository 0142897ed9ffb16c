//! Greedy packing (farthest-point insertion) and the Sudakov minoration
//! check. Greedy insertion yields a maximal separated set, which is all
//! the minoration direction needs.

use crate::classes::FunctionClassSpec;
use crate::core::{DesignSample, FunctionValues, MemberFn, NoiseVector, SeedPolicy};
use crate::error::{Error, Result};

use super::width::empirical_width;

#[derive(Debug, Clone)]
pub struct PackingResult {
    pub epsilon: f64,
    pub size: usize,
    pub representative_indices: Vec<usize>,
}

/// L2 distance of member values on the norming sample.
fn distance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n).sqrt()
}

/// Farthest-point insertion: start from the first member, repeatedly add the
/// member farthest from the selected set while that distance exceeds
/// epsilon. Every selected pair ends up more than epsilon apart and no
/// remaining member can be added.
pub fn greedy_packing(
    members: &[MemberFn],
    epsilon: f64,
    norm_sample: &DesignSample,
) -> Result<PackingResult> {
    if epsilon <= 0.0 {
        return Err(Error::contract("epsilon must be > 0"));
    }
    if members.is_empty() {
        return Ok(PackingResult { epsilon, size: 0, representative_indices: vec![] });
    }
    let values: Vec<Vec<f64>> = members.iter().map(|m| m.eval_on(norm_sample).0).collect();
    let mut selected = vec![0usize];
    let mut min_dist: Vec<f64> = values.iter().map(|v| distance(v, &values[0])).collect();
    loop {
        let mut far = 0usize;
        let mut far_d = -1.0;
        for (i, &d) in min_dist.iter().enumerate() {
            if d > far_d {
                far_d = d;
                far = i;
            }
        }
        if far_d <= epsilon {
            break;
        }
        selected.push(far);
        for (i, d) in min_dist.iter_mut().enumerate() {
            *d = d.min(distance(&values[i], &values[far]));
        }
    }
    Ok(PackingResult { epsilon, size: selected.len(), representative_indices: selected })
}

#[derive(Debug, Clone)]
pub struct SudakovRow {
    pub epsilon: f64,
    pub packing_size: usize,
    /// c1 * eps * sqrt(log M / n)
    pub lhs: f64,
    /// W_hat estimate of the class width
    pub rhs: f64,
    pub rhs_se: f64,
    pub ratio: f64,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct SudakovReport {
    pub c1: f64,
    pub rows: Vec<SudakovRow>,
    pub member_count: usize,
}

impl SudakovReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

pub struct SudakovConfig {
    pub member_samples: usize,
    pub c1: f64,
    pub width_replicates: usize,
}

impl Default for SudakovConfig {
    fn default() -> Self {
        SudakovConfig { member_samples: 200, c1: 0.05, width_replicates: 400 }
    }
}

/// For each epsilon: pack a finite member sample of the class (random LMO
/// outputs), form c1 * eps * sqrt(log M / n), and compare against the
/// estimated width W_hat(F).
pub fn sudakov_check(
    class: &FunctionClassSpec,
    sample: &DesignSample,
    eps_grid: &[f64],
    cfg: &SudakovConfig,
    seeds: &SeedPolicy,
) -> Result<SudakovReport> {
    let n = sample.n();
    let oracle = class.oracle(sample)?;
    let mut members: Vec<MemberFn> = Vec::with_capacity(cfg.member_samples);
    for i in 0..cfg.member_samples {
        let w = NoiseVector::standard(n, seeds.derive("member", i as u64));
        let out = oracle.lmo(&FunctionValues(w.xi))?;
        members.push(out.member);
    }
    let width = empirical_width(class, sample, None, cfg.width_replicates, seeds, "width")?;
    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let pack = greedy_packing(&members, eps, sample)?;
        let lhs = cfg.c1 * eps * ((pack.size as f64).ln() / n as f64).sqrt();
        let rhs = width.mean;
        let holds = lhs <= rhs + 3.0 * width.std_error;
        rows.push(SudakovRow {
            epsilon: eps,
            packing_size: pack.size,
            lhs,
            rhs,
            rhs_se: width.std_error,
            ratio: if rhs > 0.0 { lhs / rhs } else { f64::INFINITY },
            holds,
        });
    }
    Ok(SudakovReport { c1: cfg.c1, rows, member_count: members.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::DesignKind;

    fn sample_n(n: usize) -> DesignSample {
        let pts = (0..n).map(|i| vec![(i as f64 + 0.5) / n as f64]).collect();
        DesignSample::from_points(pts, DesignKind::Fixed).unwrap()
    }

    #[test]
    fn three_far_apart_functions() {
        let s = sample_n(4);
        // constants 0, 1, -1: pairwise distances 1, 1, 2
        let members = vec![
            MemberFn::Zero,
            MemberFn::Constant { value: 1.0 },
            MemberFn::Constant { value: -1.0 },
        ];
        let p = greedy_packing(&members, 0.5, &s).unwrap();
        assert_eq!(p.size, 3);
        let p = greedy_packing(&members, 1.5, &s).unwrap();
        assert_eq!(p.size, 1);
    }

    #[test]
    fn order_replay_matches_farthest_point_rule() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 10;
        let s = sample_n(n);
        let members: Vec<MemberFn> = (0..50)
            .map(|_| {
                let vals: Vec<f64> =
                    (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
                MemberFn::PiecewiseConstant { xs: s.sorted_x(), values: vals }
            })
            .collect();
        let eps = 1.0;
        let got = greedy_packing(&members, eps, &s).unwrap();
        // independent replay of the same insertion rule
        let values: Vec<Vec<f64>> = members.iter().map(|m| m.eval_on(&s).0).collect();
        let dist = |a: &Vec<f64>, b: &Vec<f64>| -> f64 {
            (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n as f64).sqrt()
        };
        let mut chosen = vec![0usize];
        loop {
            let mut best = None;
            let mut best_d = eps;
            for i in 0..values.len() {
                let d = chosen.iter().map(|&j| dist(&values[i], &values[j])).fold(f64::INFINITY, f64::min);
                if d > best_d {
                    best_d = d;
                    best = Some(i);
                }
            }
            match best {
                Some(i) => chosen.push(i),
                None => break,
            }
        }
        assert_eq!(got.size, chosen.len());
        // maximality: every non-representative sits within eps of the pack
        for i in 0..values.len() {
            let d = got
                .representative_indices
                .iter()
                .map(|&j| dist(&values[i], &values[j]))
                .fold(f64::INFINITY, f64::min);
            if !got.representative_indices.contains(&i) {
                assert!(d <= eps + 1e-12);
            }
        }
        // separation of the pack itself
        for (a, &i) in got.representative_indices.iter().enumerate() {
            for &j in &got.representative_indices[a + 1..] {
                assert!(dist(&values[i], &values[j]) > eps);
            }
        }
    }
}
