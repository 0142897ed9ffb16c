//! Conditional-gradient minimization of separable quadratics over a class,
//! driven entirely by the class LMO. Two step rules: classic exact line
//! search, and a fully-corrective variant that re-solves the restricted
//! problem over the atoms collected so far (linear convergence on polytopes,
//! used where no exact least-squares path exists).

use crate::classes::ClassOracle;
use crate::core::{FunctionValues, MemberFn};
use crate::error::Result;
use crate::solvers::simplex_qp::SimplexQp;

/// minimize sum_i q_i f_i^2 - 2 sum_i b_i f_i over the class values.
/// With q = 1/n, b = y/n this is ||f - y||_n^2 - ||y||_n^2.
#[derive(Debug, Clone)]
pub struct QuadObjective {
    pub q: Vec<f64>,
    pub b: Vec<f64>,
}

impl QuadObjective {
    pub fn least_squares(targets: &FunctionValues) -> Self {
        let n = targets.len() as f64;
        QuadObjective {
            q: vec![1.0 / n; targets.len()],
            b: targets.as_slice().iter().map(|y| y / n).collect(),
        }
    }

    /// maximize lin'f - sum quad (f - shift)^2, encoded as a minimization.
    pub fn from_linear_quadratic(lin: &[f64], quad: &[f64], shift: &[f64]) -> Self {
        QuadObjective {
            q: quad.to_vec(),
            b: lin
                .iter()
                .zip(quad)
                .zip(shift)
                .map(|((l, q), s)| 0.5 * l + q * s)
                .collect(),
        }
    }

    pub fn value(&self, f: &[f64]) -> f64 {
        f.iter()
            .zip(&self.q)
            .zip(&self.b)
            .map(|((fi, qi), bi)| qi * fi * fi - 2.0 * bi * fi)
            .sum()
    }

    /// Gradient is 2(q .* f - b); the LMO direction maximizes -gradient.
    fn neg_gradient(&self, f: &[f64]) -> Vec<f64> {
        f.iter()
            .zip(&self.q)
            .zip(&self.b)
            .map(|((fi, qi), bi)| 2.0 * (bi - qi * fi))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FwStrategy {
    /// Classic conditional gradient with exact line search.
    LineSearch,
    /// Fully corrective: re-solve over collected atoms each round.
    FullyCorrective,
}

#[derive(Debug, Clone)]
pub struct FwOutcome {
    pub values: FunctionValues,
    pub member: MemberFn,
    pub objective: f64,
    /// Final Frank-Wolfe duality gap: a certified bound on suboptimality.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Gap trace, one entry per iteration.
    pub trace: Vec<f64>,
    /// Objective trace; with exact line search this never increases.
    pub objective_trace: Vec<f64>,
    /// False when any LMO call along the way was flagged inexact.
    pub oracle_exact: bool,
}

pub struct FwConfig {
    pub max_iterations: usize,
    pub gap_tolerance: f64,
    pub strategy: FwStrategy,
}

impl Default for FwConfig {
    fn default() -> Self {
        FwConfig { max_iterations: 2000, gap_tolerance: 1e-7, strategy: FwStrategy::LineSearch }
    }
}

pub fn frank_wolfe(
    oracle: &ClassOracle,
    objective: &QuadObjective,
    start: Option<(FunctionValues, MemberFn)>,
    cfg: &FwConfig,
) -> Result<FwOutcome> {
    let n = oracle.sample.n();
    let (mut f, mut atoms): (Vec<f64>, Vec<(f64, MemberFn, Vec<f64>)>) = match start {
        Some((v, m)) => (v.0.clone(), vec![(1.0, m, v.0)]),
        None => {
            // start at the LMO of the initial negative gradient
            let w0 = FunctionValues(objective.neg_gradient(&vec![0.0; n]));
            let s = oracle.lmo(&w0)?;
            (s.values.0.clone(), vec![(1.0, s.member, s.values.0)])
        }
    };
    let mut oracle_exact = true;
    let mut gap = f64::INFINITY;
    let mut trace = Vec::new();
    let mut objective_trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    // restricted-problem Gram matrix and linear term, maintained
    // incrementally as atoms arrive (fully-corrective mode only)
    let mut gram: Vec<f64> = Vec::new();
    let mut lin: Vec<f64> = Vec::new();
    if cfg.strategy == FwStrategy::FullyCorrective {
        let k0 = atoms.len();
        gram = vec![0.0; k0 * k0];
        lin = vec![0.0; k0];
        for i in 0..k0 {
            for j in 0..k0 {
                let mut dot = 0.0;
                for t in 0..n {
                    dot += objective.q[t] * atoms[i].2[t] * atoms[j].2[t];
                }
                gram[i * k0 + j] = 2.0 * dot;
            }
            lin[i] =
                -2.0 * objective.b.iter().zip(&atoms[i].2).map(|(b, v)| b * v).sum::<f64>();
        }
    }

    for it in 0..cfg.max_iterations {
        iterations = it + 1;
        let g = objective.neg_gradient(&f);
        let s = oracle.lmo(&FunctionValues(g.clone()))?;
        oracle_exact &= s.exact;
        // gap = <-grad, s - f>
        gap = g
            .iter()
            .zip(s.values.as_slice())
            .zip(&f)
            .map(|((gi, si), fi)| gi * (si - fi))
            .sum::<f64>()
            + s.gap;
        trace.push(gap);
        objective_trace.push(objective.value(&f));
        if gap <= cfg.gap_tolerance {
            converged = true;
            break;
        }
        match cfg.strategy {
            FwStrategy::LineSearch => {
                // exact step on the quadratic along s - f
                let d: Vec<f64> = s.values.as_slice().iter().zip(&f).map(|(a, b)| a - b).collect();
                let num: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() / 2.0;
                let den: f64 = d.iter().zip(&objective.q).map(|(di, qi)| qi * di * di).sum();
                let gamma = if den > 0.0 { (num / den).clamp(0.0, 1.0) } else { 1.0 };
                for (fi, di) in f.iter_mut().zip(&d) {
                    *fi += gamma * di;
                }
                for (w, _, _) in atoms.iter_mut() {
                    *w *= 1.0 - gamma;
                }
                atoms.push((gamma, s.member, s.values.0));
                atoms.retain(|(w, _, _)| *w > 1e-15);
            }
            FwStrategy::FullyCorrective => {
                // dedup against existing atoms by value vector
                let is_new = atoms.iter().all(|(_, _, v)| {
                    v.iter().zip(s.values.as_slice()).any(|(a, b)| (a - b).abs() > 1e-13)
                });
                if is_new {
                    // grow the Gram matrix incrementally: one row per atom
                    let k_old = atoms.len();
                    let mut grown = vec![0.0; (k_old + 1) * (k_old + 1)];
                    for i in 0..k_old {
                        for j in 0..k_old {
                            grown[i * (k_old + 1) + j] = gram[i * k_old + j];
                        }
                    }
                    for (i, atom) in atoms.iter().enumerate() {
                        let mut dot = 0.0;
                        for t in 0..n {
                            dot += objective.q[t] * atom.2[t] * s.values[t];
                        }
                        grown[i * (k_old + 1) + k_old] = 2.0 * dot;
                        grown[k_old * (k_old + 1) + i] = 2.0 * dot;
                    }
                    let mut dot = 0.0;
                    for t in 0..n {
                        dot += objective.q[t] * s.values[t] * s.values[t];
                    }
                    grown[k_old * (k_old + 1) + k_old] = 2.0 * dot;
                    gram = grown;
                    lin.push(
                        -2.0 * objective.b.iter().zip(s.values.as_slice()).map(|(b, v)| b * v).sum::<f64>(),
                    );
                    atoms.push((0.0, s.member, s.values.0));
                }
                let k = atoms.len();
                let prev: Vec<f64> = atoms.iter().map(|a| a.0).collect();
                let w = SimplexQp::new(&gram, &lin, k).solve_warm(Some(&prev))?;
                for (wi, atom) in w.iter().zip(atoms.iter_mut()) {
                    atom.0 = *wi;
                }
                f = vec![0.0; n];
                for (wi, _, v) in &atoms {
                    for t in 0..n {
                        f[t] += wi * v[t];
                    }
                }
                // prune dead atoms once they pile up; the Gram matrix is
                // rebuilt over the (small) surviving support
                if atoms.len() > 40 {
                    let keep: Vec<usize> = (0..atoms.len())
                        .filter(|&i| atoms[i].0 > 1e-13)
                        .collect();
                    if keep.len() < atoms.len() {
                        let kk = keep.len();
                        let mut g2 = vec![0.0; kk * kk];
                        for (a, &i) in keep.iter().enumerate() {
                            for (b, &j) in keep.iter().enumerate() {
                                g2[a * kk + b] = gram[i * k + j];
                            }
                        }
                        lin = keep.iter().map(|&i| lin[i]).collect();
                        gram = g2;
                        let mut kept = Vec::with_capacity(kk);
                        for (pos, atom) in atoms.drain(..).enumerate() {
                            if keep.contains(&pos) {
                                kept.push(atom);
                            }
                        }
                        atoms = kept;
                    }
                }
                if !is_new && gap > cfg.gap_tolerance {
                    // correction cannot improve further on this atom set and
                    // the oracle repeats itself: stop to avoid cycling
                    break;
                }
            }
        }
    }

    let member = MemberFn::mixture(
        atoms.iter().map(|(w, m, _)| (*w, m.clone())).collect(),
    );
    Ok(FwOutcome {
        objective: objective.value(&f),
        values: FunctionValues(f),
        member,
        gap,
        iterations,
        converged,
        trace,
        objective_trace,
        oracle_exact,
    })
}
