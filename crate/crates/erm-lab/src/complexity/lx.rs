//! The second fixed-design lower-bound term: the maximum over a finite
//! (g, t) grid of
//!
//!     ( W_hat(B_n(g,t)) - W_hat(B_n(f0, r(f0))) - C/n ) / ( ||g - f0||_n + t )
//!
//! clamped below at zero. The finite-grid relaxation makes this a certified
//! lower bound on the full supremum.

use crate::classes::FunctionClassSpec;
use crate::core::{
    empirical_norm, DesignSample, FunctionValues, MemberFn, SeedPolicy,
};
use crate::error::{Error, Result};

use super::radius::{critical_radius, RadiusConfig};
use super::width::{localized_curve, with_ball_context};

pub struct LxConfig {
    pub replicates: usize,
    pub lambda_points: usize,
    pub c_fixed: f64,
    pub radius: RadiusConfig,
}

impl Default for LxConfig {
    fn default() -> Self {
        LxConfig {
            replicates: 200,
            lambda_points: 20,
            c_fixed: 1.0,
            radius: RadiusConfig::default(),
        }
    }
}

pub fn l_x_complexity(
    class: &FunctionClassSpec,
    sample: &DesignSample,
    f0: &MemberFn,
    g_grid: &[MemberFn],
    t_grid: &[f64],
    cfg: &LxConfig,
    seeds: &SeedPolicy,
) -> Result<f64> {
    if cfg.c_fixed < 0.0 {
        return Err(Error::contract("C must be >= 0"));
    }
    let n = sample.n() as f64;
    let f0_vals = f0.eval_on(sample);
    // W_hat(B_n(f0, r(f0)))
    let rad = critical_radius(class, sample, f0, None, &cfg.radius, &seeds.derive_policy("radius", 0))?;
    let w_center = with_ball_context(class, sample, None, f0, |ctx| {
        let c = localized_curve(
            ctx,
            &[rad.r_star],
            cfg.replicates,
            cfg.lambda_points,
            &seeds.derive_policy("center", 0),
            "w",
        )?;
        Ok(c.feasible[0])
    })?;

    let mut best = 0.0f64;
    for (gi, g) in g_grid.iter().enumerate() {
        let g_vals = g.eval_on(sample);
        let diff = FunctionValues(
            g_vals.as_slice().iter().zip(f0_vals.as_slice()).map(|(a, b)| a - b).collect(),
        );
        let dist = empirical_norm(&diff, sample)?;
        if dist > 1.0 + 1e-9 {
            return Err(Error::contract(format!(
                "g-grid member {gi} lies outside the unit empirical ball around f0"
            )));
        }
        let curve = with_ball_context(class, sample, None, g, |ctx| {
            localized_curve(
                ctx,
                t_grid,
                cfg.replicates,
                cfg.lambda_points,
                &seeds.derive_policy("g", gi as u64),
                "w",
            )
        })?;
        for (j, &t) in t_grid.iter().enumerate() {
            let num = curve.feasible[j] - w_center - cfg.c_fixed / n;
            let den = dist + t;
            if den > 0.0 {
                best = best.max(num / den);
            }
        }
    }
    Ok(best)
}
