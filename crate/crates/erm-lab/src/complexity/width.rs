//! Monte-Carlo Gaussian width estimators. The unconstrained width is one LMO
//! call per noise draw. Ball-localized widths solve the penalized problem
//!
//!     sup_f  <xi, f - f0>_n  -  lambda (||f - f0||_ball^2 - r^2)
//!
//! exactly per class where possible and by warm-started fully-corrective
//! conditional gradient otherwise. A geometric lambda sweep per draw traces
//! the whole (radius, value) frontier at once, so radius grids share noise
//! (common random numbers) and every reported value is feasible (a certified
//! lower bound) with the Lagrangian dual recorded as the upper bound.

use rayon::prelude::*;

use crate::classes::{ClassOracle, FunctionClassSpec};
use crate::core::{
    mean_and_se, DesignSample, DistributionId, FunctionValues, MemberFn, NoiseVector, SeedPolicy,
};
use crate::erm::{frank_wolfe, FwConfig, FwStrategy, QuadObjective};
use crate::error::{Error, Result};

use super::{BallNorm, BallSpec, WidthEstimate};

/// Penalized-solve context: class oracle over the (possibly merged) sample,
/// with the training block first.
pub struct PenalizedCtx<'a> {
    pub oracle: ClassOracle<'a>,
    pub n_train: usize,
    pub n_ball: usize,
    /// index offset of the ball-norm block inside the merged sample
    ball_offset: usize,
    f0_merged: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PenalizedPoint {
    /// <xi, f - f0>_n on the training block
    pub value: f64,
    /// ||f - f0|| in the ball norm
    pub norm: f64,
    pub member: MemberFn,
    pub values_merged: Vec<f64>,
}

impl<'a> PenalizedCtx<'a> {
    /// maximize <xi, f - f0>_train/n - lambda ||f - f0||_ball^2. `gap_tol`
    /// bounds the conditional-gradient fallback's certified suboptimality in
    /// objective units; exact per-class solvers ignore it.
    pub fn penalized(
        &self,
        xi: &[f64],
        lambda: f64,
        warm: Option<&PenalizedPoint>,
        gap_tol: f64,
    ) -> Result<PenalizedPoint> {
        let nm = self.f0_merged.len();
        let n = self.n_train as f64;
        let m = self.n_ball as f64;
        let mut lin = vec![0.0; nm];
        let mut quad = vec![0.0; nm];
        for i in 0..self.n_train {
            lin[i] = xi[i] / n;
        }
        for j in 0..self.n_ball {
            quad[self.ball_offset + j] += lambda / m;
        }
        let shift = self.f0_merged.clone();
        let out = match self.oracle.maximize_lq_exact(&lin, &quad, &shift)? {
            Some(o) => o,
            None => {
                let obj = QuadObjective::from_linear_quadratic(&lin, &quad, &shift);
                let cfg = FwConfig {
                    max_iterations: 150,
                    gap_tolerance: gap_tol.max(1e-12),
                    strategy: FwStrategy::FullyCorrective,
                };
                let start = warm.map(|p| {
                    (FunctionValues(p.values_merged.clone()), p.member.clone())
                });
                let fw = frank_wolfe(&self.oracle, &obj, start, &cfg)?;
                crate::classes::QuadOutcome {
                    values: fw.values,
                    member: fw.member,
                    objective: -fw.objective,
                    gap: fw.gap,
                    exact: fw.converged,
                }
            }
        };
        let vals = out.values.0;
        let mut value = 0.0;
        for i in 0..self.n_train {
            value += xi[i] * (vals[i] - self.f0_merged[i]);
        }
        value /= n;
        let mut norm2 = 0.0;
        for j in 0..self.n_ball {
            let k = self.ball_offset + j;
            let d = vals[k] - self.f0_merged[k];
            norm2 += d * d;
        }
        let norm = (norm2 / m).sqrt();
        Ok(PenalizedPoint { value, norm, member: out.member, values_merged: vals })
    }

    /// Unconstrained sup of <xi, f - f0>_n.
    pub fn unconstrained(&self, xi: &[f64]) -> Result<PenalizedPoint> {
        // a linear objective: the conditional-gradient fallback terminates
        // after one oracle call no matter the tolerance
        self.penalized(xi, 0.0, None, 1e-12)
    }

    /// Monte-Carlo-appropriate certified gap: a small fraction of the
    /// unconstrained value (the scale every width shares).
    fn sweep_gap_tol(base_value: f64) -> f64 {
        2e-4 * base_value.abs() + 1e-12
    }

    /// Per-draw frontier: (norm, value, lambda) triples from the sweep,
    /// sorted by norm, deduplicated, always containing (0, 0, +inf).
    pub fn frontier(&self, xi: &[f64], lambda_points: usize) -> Result<Frontier> {
        let base = self.unconstrained(xi)?;
        let gap_tol = Self::sweep_gap_tol(base.value);
        let scale = if base.norm > 1e-12 {
            (base.value.abs().max(1e-12)) / (base.norm * base.norm)
        } else {
            1.0
        };
        let mut pts: Vec<(f64, f64, f64)> = vec![(base.norm, base.value, 0.0)];
        let k = lambda_points.max(2);
        let lo = scale * 1e-2;
        let hi = scale * 3e4;
        let ratio = (hi / lo).powf(1.0 / (k as f64 - 1.0));
        let mut warm = Some(base);
        let mut lam = lo;
        for _ in 0..k {
            let p = self.penalized(xi, lam, warm.as_ref(), gap_tol)?;
            pts.push((p.norm, p.value, lam));
            warm = Some(p);
            lam *= ratio;
        }
        pts.push((0.0, 0.0, f64::INFINITY));
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        // keep the concave upper envelope per norm
        let mut dedup: Vec<(f64, f64, f64)> = Vec::with_capacity(pts.len());
        for p in pts {
            match dedup.last_mut() {
                Some(last) if (p.0 - last.0).abs() < 1e-13 => {
                    if p.1 > last.1 {
                        *last = p;
                    }
                }
                _ => dedup.push(p),
            }
        }
        Ok(Frontier { pts: dedup })
    }
}

/// One draw's Pareto frontier of (achieved ball norm, objective value).
#[derive(Debug, Clone)]
pub struct Frontier {
    /// (norm, value, lambda), sorted by norm; lambda = inf marks the center.
    pub pts: Vec<(f64, f64, f64)>,
}

impl Frontier {
    /// Certified feasible value at radius r (chord interpolation between
    /// frontier members, a convex mixture of feasible points).
    pub fn feasible_at(&self, r: f64) -> f64 {
        let pts = &self.pts;
        if pts.is_empty() {
            return 0.0;
        }
        let last = pts[pts.len() - 1];
        if r >= last.0 {
            return last.1;
        }
        let mut i = pts.partition_point(|p| p.0 <= r);
        if i == 0 {
            return 0.0;
        }
        if i >= pts.len() {
            i = pts.len() - 1;
        }
        let (t0, v0, _) = pts[i - 1];
        let (t1, v1, _) = pts[i];
        if t1 - t0 < 1e-300 {
            return v0.max(v1);
        }
        v0 + (v1 - v0) * (r - t0) / (t1 - t0)
    }

    /// Lagrangian dual upper bound at radius r.
    pub fn dual_at(&self, r: f64) -> f64 {
        let mut best = f64::INFINITY;
        for &(norm, value, lambda) in &self.pts {
            if lambda.is_finite() {
                best = best.min(value + lambda * (r * r - norm * norm));
            }
        }
        best
    }

    pub fn max_norm(&self) -> f64 {
        self.pts.last().map(|p| p.0).unwrap_or(0.0)
    }
}

/// Build the penalized context and run `f` with it. The ball norm defaults
/// to the training sample itself (empirical ball); a population ball couples
/// the training block with the reference block in one constraint system.
pub fn with_ball_context<R>(
    class: &FunctionClassSpec,
    train: &DesignSample,
    ball_sample: Option<&DesignSample>,
    f0: &MemberFn,
    run: impl FnOnce(&PenalizedCtx) -> Result<R>,
) -> Result<R> {
    match ball_sample {
        None => {
            let oracle = class.oracle(train)?;
            let f0_merged = f0.eval_on(train).0;
            let ctx = PenalizedCtx {
                oracle,
                n_train: train.n(),
                n_ball: train.n(),
                ball_offset: 0,
                f0_merged,
            };
            run(&ctx)
        }
        Some(reference) => {
            let merged = train.concat(reference)?;
            let oracle = class.oracle(&merged)?;
            let f0_merged = f0.eval_on(&merged).0;
            let ctx = PenalizedCtx {
                oracle,
                n_train: train.n(),
                n_ball: reference.n(),
                ball_offset: train.n(),
                f0_merged,
            };
            run(&ctx)
        }
    }
}

/// Gaussian width of the class (or a localized ball) on a fixed sample.
pub fn empirical_width(
    class: &FunctionClassSpec,
    sample: &DesignSample,
    ball: Option<&BallSpec>,
    replicates: usize,
    seeds: &SeedPolicy,
    tag: &str,
) -> Result<WidthEstimate> {
    if replicates < 2 {
        return Err(Error::contract("width estimation needs at least 2 replicates"));
    }
    let n = sample.n();
    match ball {
        None => {
            let oracle = class.oracle(sample)?;
            let outs: Result<Vec<(f64, bool)>> = (0..replicates)
                .into_par_iter()
                .map(|i| {
                    let xi = NoiseVector::standard(n, seeds.derive(tag, i as u64));
                    let out = oracle.lmo(&xi.as_values())?;
                    Ok((out.objective, out.exact))
                })
                .collect();
            let outs = outs?;
            let vals: Vec<f64> = outs.iter().map(|o| o.0).collect();
            let flagged = outs.iter().any(|o| !o.1);
            let (mean, se) = mean_and_se(&vals);
            Ok(WidthEstimate {
                mean,
                std_error: se,
                replicates,
                seed: seeds.derive(tag, 0),
                target: format!("{}:global", class.class_id()),
                dual_mean: None,
                flagged,
            })
        }
        Some(ball) => {
            if ball.radius < 0.0 {
                return Err(Error::contract("ball radius must be >= 0"));
            }
            let ball_sample = match ball.norm {
                BallNorm::Empirical => None,
                BallNorm::Population(r) => Some(r),
            };
            with_ball_context(class, sample, ball_sample, ball.center, |ctx| {
                let outs: Result<Vec<(f64, f64, bool)>> = (0..replicates)
                    .into_par_iter()
                    .map(|i| {
                        let xi = NoiseVector::standard(n, seeds.derive(tag, i as u64));
                        ball_width_one_draw(ctx, &xi.xi, ball.radius)
                    })
                    .collect();
                let outs = outs?;
                let vals: Vec<f64> = outs.iter().map(|o| o.0).collect();
                let duals: Vec<f64> = outs.iter().map(|o| o.1).collect();
                let flagged = outs.iter().any(|o| o.2);
                let (mean, se) = mean_and_se(&vals);
                let (dual_mean, _) = mean_and_se(&duals);
                Ok(WidthEstimate {
                    mean,
                    std_error: se,
                    replicates,
                    seed: seeds.derive(tag, 0),
                    target: format!(
                        "{}:ball(r={},norm={})",
                        class.class_id(),
                        ball.radius,
                        match ball.norm {
                            BallNorm::Empirical => "empirical",
                            BallNorm::Population(_) => "population",
                        }
                    ),
                    dual_mean: Some(dual_mean),
                    flagged,
                })
            })
        }
    }
}

/// One draw of the ball-constrained sup via bisection on lambda: increase
/// lambda until the iterate is feasible, stop once the constraint is active
/// within 1% of r (or slack at lambda = 0). Returns (feasible value, dual
/// upper bound, bracket-failure flag).
fn ball_width_one_draw(ctx: &PenalizedCtx, xi: &[f64], r: f64) -> Result<(f64, f64, bool)> {
    let base = ctx.unconstrained(xi)?;
    if base.norm <= r {
        return Ok((base.value, base.value, false));
    }
    if r <= 0.0 {
        return Ok((0.0, 0.0, false));
    }
    let gap_tol = PenalizedCtx::sweep_gap_tol(base.value);
    let scale = base.value.abs().max(1e-12) / (base.norm * base.norm);
    let mut lo = 0.0f64;
    let mut hi = scale;
    let mut hi_point = ctx.penalized(xi, hi, Some(&base), gap_tol)?;
    let mut grow = 0;
    while hi_point.norm > r && grow < 60 {
        lo = hi;
        hi *= 4.0;
        hi_point = ctx.penalized(xi, hi, Some(&hi_point), gap_tol)?;
        grow += 1;
    }
    if hi_point.norm > r {
        // bracket failure: fall back to the unconstrained solution, flagged
        return Ok((base.value, base.value, true));
    }
    let mut best_feasible = hi_point.clone();
    let mut dual = hi_point.value + hi * (r * r - hi_point.norm * hi_point.norm);
    let mut warm = hi_point;
    for _ in 0..40 {
        if best_feasible.norm >= 0.99 * r {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let p = ctx.penalized(xi, mid, Some(&warm), gap_tol)?;
        dual = dual.min(p.value + mid * (r * r - p.norm * p.norm));
        if p.norm <= r {
            hi = mid;
            best_feasible = p.clone();
        } else {
            lo = mid;
        }
        warm = p;
    }
    // mix with the center if the iterate still overshoots precision-wise
    let value = best_feasible.value;
    Ok((value, dual.max(value), false))
}

/// Averaged localized-width curve over a shared radius grid with common
/// noise draws. Returns per-radius feasible means, their standard errors,
/// and dual means, plus the averaged unconstrained width.
pub struct WidthCurve {
    pub radii: Vec<f64>,
    pub feasible: Vec<f64>,
    pub feasible_se: Vec<f64>,
    pub dual: Vec<f64>,
    pub unconstrained: f64,
    pub unconstrained_se: f64,
}

/// Per-draw frontiers with shared seed bank (common random numbers across
/// any radius the caller later evaluates).
pub fn localized_frontiers(
    ctx: &PenalizedCtx,
    replicates: usize,
    lambda_points: usize,
    seeds: &SeedPolicy,
    tag: &str,
) -> Result<Vec<Frontier>> {
    let n = ctx.n_train;
    (0..replicates)
        .into_par_iter()
        .map(|i| {
            let xi = NoiseVector::standard(n, seeds.derive(tag, i as u64));
            ctx.frontier(&xi.xi, lambda_points)
        })
        .collect()
}

/// Mean feasible localized width at radius r over a frontier bank.
pub fn mean_feasible_at(frontiers: &[Frontier], r: f64) -> f64 {
    let vals: Vec<f64> = frontiers.iter().map(|f| f.feasible_at(r)).collect();
    mean_and_se(&vals).0
}

pub fn curve_from_frontiers(frontiers: &[Frontier], radii: &[f64]) -> WidthCurve {
    let mut feasible = Vec::with_capacity(radii.len());
    let mut feasible_se = Vec::with_capacity(radii.len());
    let mut dual = Vec::with_capacity(radii.len());
    for &r in radii {
        let vals: Vec<f64> = frontiers.iter().map(|f| f.feasible_at(r)).collect();
        let (m, se) = mean_and_se(&vals);
        feasible.push(m);
        feasible_se.push(se);
        let dvals: Vec<f64> = frontiers.iter().map(|f| f.dual_at(r)).collect();
        dual.push(mean_and_se(&dvals).0);
    }
    let tops: Vec<f64> =
        frontiers.iter().map(|f| f.pts.last().map(|p| p.1).unwrap_or(0.0)).collect();
    let (unconstrained, unconstrained_se) = mean_and_se(&tops);
    WidthCurve {
        radii: radii.to_vec(),
        feasible,
        feasible_se,
        dual,
        unconstrained,
        unconstrained_se,
    }
}

pub fn localized_curve(
    ctx: &PenalizedCtx,
    radii: &[f64],
    replicates: usize,
    lambda_points: usize,
    seeds: &SeedPolicy,
    tag: &str,
) -> Result<WidthCurve> {
    let frontiers = localized_frontiers(ctx, replicates, lambda_points, seeds, tag)?;
    Ok(curve_from_frontiers(&frontiers, radii))
}

impl WidthCurve {
    /// Piecewise-linear interpolation of the averaged feasible curve.
    pub fn value_at(&self, r: f64) -> f64 {
        let i = self.radii.partition_point(|&t| t <= r);
        if i == 0 {
            let t0 = self.radii[0];
            if t0 <= 0.0 || r <= 0.0 {
                return if r >= t0 { self.feasible[0] } else { 0.0 };
            }
            return self.feasible[0] * (r / t0).min(1.0);
        }
        if i >= self.radii.len() {
            return *self.feasible.last().unwrap();
        }
        let (t0, t1) = (self.radii[i - 1], self.radii[i]);
        let (v0, v1) = (self.feasible[i - 1], self.feasible[i]);
        if t1 - t0 < 1e-300 {
            return v0.max(v1);
        }
        v0 + (v1 - v0) * (r - t0) / (t1 - t0)
    }

    pub fn se_at(&self, r: f64) -> f64 {
        let i = self.radii.partition_point(|&t| t <= r).min(self.radii.len() - 1);
        self.feasible_se[i]
    }
}

/// Expected width: redraw the design per outer replicate and average the
/// empirical width; the reported standard error combines both levels through
/// the across-design scatter of inner means.
pub fn expected_width(
    class: &FunctionClassSpec,
    distribution: &DistributionId,
    n: usize,
    ball: Option<&BallSpec>,
    outer: usize,
    inner: usize,
    seeds: &SeedPolicy,
    tag: &str,
) -> Result<WidthEstimate> {
    if outer < 2 {
        return Err(Error::contract("expected width needs at least 2 outer replicates"));
    }
    let ests: Result<Vec<_>> = (0..outer)
        .map(|k| {
            let design = DesignSample::draw(
                distribution.clone(),
                n,
                seeds.derive(&format!("{tag}/design"), k as u64),
            )?;
            let inner_seeds = seeds.derive_policy(&format!("{tag}/noise"), k as u64);
            empirical_width(class, &design, ball, inner, &inner_seeds, "inner")
        })
        .collect();
    let ests = ests?;
    let means: Vec<f64> = ests.iter().map(|e| e.mean).collect();
    let flagged = ests.iter().any(|e| e.flagged);
    let dual_acc: Vec<f64> = ests.iter().filter_map(|e| e.dual_mean).collect();
    let (mean, se) = mean_and_se(&means);
    let dual_mean = if dual_acc.is_empty() {
        None
    } else {
        Some(mean_and_se(&dual_acc).0)
    };
    Ok(WidthEstimate {
        mean,
        std_error: se,
        replicates: outer * inner,
        seed: seeds.derive(tag, 0),
        target: format!("{}:expected", class.class_id()),
        dual_mean,
        flagged,
    })
}
