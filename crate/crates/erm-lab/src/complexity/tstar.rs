//! The localized-richness radius: the largest population-ball radius around
//! f0 whose expected width stays below an l_xi fraction of the expected width
//! of the unit empirical ball. Population balls use the reference-sample
//! surrogate norm; the averaged localized-width curve is verified to be
//! nondecreasing (up to Monte-Carlo noise) before the bisection runs.

use crate::classes::FunctionClassSpec;
use crate::core::{DesignSample, DistributionId, MemberFn, SeedPolicy};
use crate::error::{Error, Result};

use super::width::{localized_frontiers, with_ball_context, Frontier};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TStarRhs {
    /// Threshold = l_xi * W(B_n(f0, 1)), the definition's reading.
    UnitEmpiricalBall,
    /// Threshold = l_xi * W(F), the bounded-class replacement.
    GlobalWidth,
}

pub struct TStarConfig {
    pub outer_designs: usize,
    pub noise_replicates: usize,
    pub lambda_points: usize,
    pub bisection_tolerance: f64,
    /// search cap: the class diameter bound
    pub cap: f64,
    pub rhs: TStarRhs,
    /// reference-sample size for the population norm
    pub reference_size: usize,
    pub grid_points: usize,
}

impl Default for TStarConfig {
    fn default() -> Self {
        TStarConfig {
            outer_designs: 10,
            noise_replicates: 40,
            lambda_points: 20,
            bisection_tolerance: 1e-3,
            cap: 2.0,
            rhs: TStarRhs::UnitEmpiricalBall,
            reference_size: 0, // 0: use 20 * n
            grid_points: 48,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TStarResult {
    pub t_star: f64,
    pub l_xi: f64,
    /// the right-hand threshold l_xi * W(B_n(f0,1)) (or l_xi * W(F))
    pub reference_width: f64,
    pub cap: f64,
    pub bisection_iterations: usize,
    /// averaged population-ball width curve (radius, mean, se)
    pub curve: Vec<(f64, f64, f64)>,
    pub flagged: bool,
}

/// Compute t-star for one l_xi.
pub fn t_star(
    class: &FunctionClassSpec,
    f0: &MemberFn,
    n: usize,
    l_xi: f64,
    distribution: &DistributionId,
    cfg: &TStarConfig,
    seeds: &SeedPolicy,
) -> Result<TStarResult> {
    let mut out = t_star_multi(class, f0, n, &[l_xi], distribution, cfg, seeds)?;
    Ok(out.pop().unwrap())
}

/// Compute t-star for several l_xi values from one shared curve (the curve
/// is l_xi-independent; only the threshold moves).
pub fn t_star_multi(
    class: &FunctionClassSpec,
    f0: &MemberFn,
    n: usize,
    l_xi_list: &[f64],
    distribution: &DistributionId,
    cfg: &TStarConfig,
    seeds: &SeedPolicy,
) -> Result<Vec<TStarResult>> {
    for &l in l_xi_list {
        if !(0.0..1.0).contains(&l) || l <= 0.0 {
            return Err(Error::contract("l_xi must lie in (0,1)"));
        }
    }
    let m_ref = if cfg.reference_size == 0 { 20 * n } else { cfg.reference_size };
    let reference = DesignSample::draw(distribution.clone(), m_ref, seeds.derive("reference", 0))?;

    // radius grid: geometric plus zero, up to the cap
    let k = cfg.grid_points.max(8);
    let mut radii = vec![0.0];
    let lo = (cfg.cap * 1e-4).max(1e-6);
    let ratio = (cfg.cap / lo).powf(1.0 / (k as f64 - 1.0));
    let mut r = lo;
    for _ in 0..k {
        radii.push(r.min(cfg.cap));
        r *= ratio;
    }

    // frontier banks over outer design draws: the population-ball curve and
    // the unit-empirical-ball threshold share the same noise banks
    let mut banks: Vec<Frontier> = Vec::new();
    let mut rhs_acc: Vec<f64> = Vec::new();
    for kk in 0..cfg.outer_designs {
        let design =
            DesignSample::draw(distribution.clone(), n, seeds.derive("design", kk as u64))?;
        let inner = seeds.derive_policy("noise", kk as u64);
        let mut bank = with_ball_context(class, &design, Some(&reference), f0, |ctx| {
            localized_frontiers(ctx, cfg.noise_replicates, cfg.lambda_points, &inner, "pop")
        })?;
        banks.append(&mut bank);
        let rhs_k = match cfg.rhs {
            TStarRhs::UnitEmpiricalBall => {
                with_ball_context(class, &design, None, f0, |ctx| {
                    let fr = localized_frontiers(
                        ctx,
                        cfg.noise_replicates,
                        cfg.lambda_points,
                        &inner,
                        "unit",
                    )?;
                    let vals: Vec<f64> = fr.iter().map(|f| f.feasible_at(1.0)).collect();
                    Ok(crate::core::mean_and_se(&vals).0)
                })?
            }
            TStarRhs::GlobalWidth => with_ball_context(class, &design, None, f0, |ctx| {
                let mut acc = Vec::new();
                for i in 0..cfg.noise_replicates {
                    let xi =
                        crate::core::NoiseVector::standard(n, inner.derive("global", i as u64));
                    acc.push(ctx.unconstrained(&xi.xi)?.value);
                }
                Ok(crate::core::mean_and_se(&acc).0)
            })?,
        };
        rhs_acc.push(rhs_k);
    }
    let mut curve_rows = Vec::with_capacity(radii.len());
    for &r in &radii {
        let vals: Vec<f64> = banks.iter().map(|f| f.feasible_at(r)).collect();
        let (m, se) = crate::core::mean_and_se(&vals);
        curve_rows.push((r, m, se));
    }
    let (rhs_mean, _) = crate::core::mean_and_se(&rhs_acc);

    // well-posedness: the localized width must be nondecreasing in t up to
    // 3 SE on the coarse grid
    let coarse: Vec<usize> =
        (0..6).map(|i| (i * (curve_rows.len() - 1)) / 5).collect();
    let mut run_max = f64::NEG_INFINITY;
    for &j in &coarse {
        let (_, m, se) = curve_rows[j];
        if m < run_max - 3.0 * se.max(1e-12) {
            return Err(Error::Diagnostic(
                "localized width decreased beyond Monte-Carlo noise on the coarse grid".into(),
            ));
        }
        run_max = run_max.max(m);
    }

    // bisection probes evaluate the exact averaged frontier bank
    let value_at = |t: f64| -> f64 {
        let vals: Vec<f64> = banks.iter().map(|f| f.feasible_at(t)).collect();
        crate::core::mean_and_se(&vals).0
    };

    let max_iters =
        ((cfg.cap / cfg.bisection_tolerance).log2().ceil() as usize).max(1);
    let mut results = Vec::with_capacity(l_xi_list.len());
    for &l_xi in l_xi_list {
        let threshold = l_xi * rhs_mean;
        let (t_val, iters) = if value_at(cfg.cap) <= threshold {
            (cfg.cap, 0)
        } else {
            let mut lo = 0.0f64;
            let mut hi = cfg.cap;
            let mut iters = 0;
            while hi - lo > cfg.bisection_tolerance && iters < max_iters {
                let mid = 0.5 * (lo + hi);
                if value_at(mid) <= threshold {
                    lo = mid;
                } else {
                    hi = mid;
                }
                iters += 1;
            }
            (lo, iters)
        };
        results.push(TStarResult {
            t_star: t_val,
            l_xi,
            reference_width: rhs_mean,
            cap: cfg.cap,
            bisection_iterations: iters,
            curve: curve_rows.clone(),
            flagged: false,
        });
    }
    Ok(results)
}
