//! The critical radius: argmax over r of W_hat(B_n(f0, r)) - r^2/2. The
//! radius grid shares noise draws (common random numbers) through the
//! lambda-sweep frontier, and the grid argmax is polished by golden-section
//! search on the interpolated objective.

use crate::classes::FunctionClassSpec;
use crate::core::{DesignSample, MemberFn, SeedPolicy};
use crate::error::Result;

use super::width::{
    curve_from_frontiers, localized_frontiers, mean_feasible_at, with_ball_context, Frontier,
    WidthCurve,
};

#[derive(Debug, Clone)]
pub struct CriticalRadius {
    pub r_star: f64,
    pub objective_at_max: f64,
    /// (radius, width mean, width se, objective) per grid point
    pub grid: Vec<(f64, f64, f64, f64)>,
    /// grid objective failed the 3-SE unimodality proxy
    pub non_unimodal: bool,
    /// argmax landed on the last grid point: the grid was too small
    pub at_boundary: bool,
}

pub struct RadiusConfig {
    pub grid_points: usize,
    pub replicates: usize,
    pub lambda_points: usize,
}

impl Default for RadiusConfig {
    fn default() -> Self {
        RadiusConfig { grid_points: 25, replicates: 400, lambda_points: 24 }
    }
}

pub fn critical_radius(
    class: &FunctionClassSpec,
    sample: &DesignSample,
    f0: &MemberFn,
    radius_grid: Option<&[f64]>,
    cfg: &RadiusConfig,
    seeds: &SeedPolicy,
) -> Result<CriticalRadius> {
    with_ball_context(class, sample, None, f0, |ctx| {
        // the argmax lies below 2 sqrt(W_hat(F)), so that is the default grid
        let mut probe_vals = Vec::new();
        for i in 0..cfg.replicates.min(64) {
            let xi = crate::core::NoiseVector::standard(sample.n(), seeds.derive("probe", i as u64));
            probe_vals.push(ctx.unconstrained(&xi.xi)?.value);
        }
        let w_hat = crate::core::mean_and_se(&probe_vals).0.max(0.0);
        let grid: Vec<f64> = match radius_grid {
            Some(g) => g.to_vec(),
            None => {
                let top = (2.0 * w_hat.sqrt()).max(1e-6);
                (0..cfg.grid_points)
                    .map(|i| top * i as f64 / (cfg.grid_points - 1) as f64)
                    .collect()
            }
        };
        let frontiers =
            localized_frontiers(ctx, cfg.replicates, cfg.lambda_points, seeds, "radius")?;
        let curve = curve_from_frontiers(&frontiers, &grid);
        Ok(summarize(&grid, &curve, &frontiers))
    })
}

fn summarize(grid: &[f64], curve: &WidthCurve, frontiers: &[Frontier]) -> CriticalRadius {
    // golden refinement evaluates the exact averaged frontier, not the
    // grid-chord interpolant, so kinks between grid points are found
    let objective = |r: f64| -> f64 { mean_feasible_at(frontiers, r) - 0.5 * r * r };
    let mut rows = Vec::with_capacity(grid.len());
    let mut best = 0usize;
    for (j, &r) in grid.iter().enumerate() {
        let obj = curve.feasible[j] - 0.5 * r * r;
        rows.push((r, curve.feasible[j], curve.feasible_se[j], obj));
        if obj > rows[best].3 {
            best = j;
        }
    }
    // unimodality proxy: once the objective has dropped 3 SE below the
    // running max it must not rise 3 SE above that trough again
    let mut non_unimodal = false;
    let mut run_max = f64::NEG_INFINITY;
    let mut dropped = false;
    let mut trough = f64::INFINITY;
    for &(_, _, se, obj) in &rows {
        let tol = 3.0 * se.max(1e-12);
        if obj > run_max {
            run_max = obj;
        }
        if dropped && obj > trough + tol {
            non_unimodal = true;
        }
        if obj < run_max - tol {
            dropped = true;
        }
        if dropped {
            trough = trough.min(obj);
        }
    }
    // golden-section polish between the grid neighbors of the argmax
    let lo = if best == 0 { grid[0] } else { grid[best - 1] };
    let hi = if best + 1 >= grid.len() { grid[grid.len() - 1] } else { grid[best + 1] };
    let (mut a, mut b) = (lo, hi);
    let phi = 0.618_033_988_749_894_9;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..40 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = objective(d);
        }
    }
    let r_star = 0.5 * (a + b);
    CriticalRadius {
        r_star,
        objective_at_max: objective(r_star).max(0.0),
        grid: rows,
        non_unimodal,
        at_boundary: best + 1 == grid.len() && grid.len() > 1,
    }
}
