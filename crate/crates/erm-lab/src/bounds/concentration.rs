//! Empirical check of the concentration of ||fhat - f0||_n around the
//! critical radius, and of <fhat - f0, xi>_n around the localized width at
//! that radius: exceedance frequencies are compared against the
//! sub-Gaussian/sub-quartic tail values plus binomial noise.

use rayon::prelude::*;

use crate::classes::FunctionClassSpec;
use crate::complexity::radius::{critical_radius, RadiusConfig};
use crate::complexity::width::{localized_curve, with_ball_context};
use crate::core::{
    empirical_inner, empirical_norm, DesignSample, FunctionValues, MemberFn, NoiseVector,
    SeedPolicy,
};
use crate::erm::{erm_fit_oracle, ErmConfig};
use crate::error::{Error, Result};

/// Tail value: 3 exp(-n t^2 / 64) for t >= r0, 3 exp(-n t^4 / (64 r0^2))
/// below the radius.
pub fn tail_bound(t: f64, r0: f64, n: usize) -> f64 {
    let n = n as f64;
    if t >= r0 {
        3.0 * (-n * t * t / 64.0).exp()
    } else if r0 > 0.0 {
        3.0 * (-n * t.powi(4) / (64.0 * r0 * r0)).exp()
    } else {
        3.0
    }
}

#[derive(Debug, Clone)]
pub struct ConcentrationRow {
    pub t: f64,
    pub bound: f64,
    /// frequency of |  ||fhat-f0||_n - r_hat | >= t
    pub norm_frequency: f64,
    /// frequency of | <fhat-f0, xi>_n - W_hat(B(f0, r_hat)) | >= t * r_hat
    pub width_frequency: f64,
    pub norm_holds: bool,
    pub width_holds: bool,
}

#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    pub r_hat: f64,
    pub w_at_r_hat: f64,
    pub replicates: usize,
    pub rows: Vec<ConcentrationRow>,
    pub median_norm_deviation: f64,
    /// median of ||fhat - f0||_n itself
    pub median_norm: f64,
    pub all_hold: bool,
}

pub struct ConcentrationConfig {
    pub replicates: usize,
    /// multiples of r_hat at which tails are checked
    pub t_multiples: Vec<f64>,
    pub radius: RadiusConfig,
    pub erm: ErmConfig,
}

impl Default for ConcentrationConfig {
    fn default() -> Self {
        ConcentrationConfig {
            replicates: 500,
            t_multiples: vec![1.0, 1.5, 2.0],
            radius: RadiusConfig::default(),
            erm: ErmConfig::default(),
        }
    }
}

pub fn concentration_check(
    class: &FunctionClassSpec,
    sample: &DesignSample,
    f0: &MemberFn,
    cfg: &ConcentrationConfig,
    seeds: &SeedPolicy,
) -> Result<ConcentrationReport> {
    if cfg.replicates < 200 {
        return Err(Error::contract("concentration check needs >= 200 replicates"));
    }
    let n = sample.n();
    let rad = critical_radius(
        class,
        sample,
        f0,
        None,
        &cfg.radius,
        &seeds.derive_policy("radius", 0),
    )?;
    let r_hat = rad.r_star;
    let w_at_r_hat = with_ball_context(class, sample, None, f0, |ctx| {
        let c = localized_curve(
            ctx,
            &[r_hat],
            cfg.radius.replicates,
            cfg.radius.lambda_points,
            &seeds.derive_policy("width", 0),
            "w",
        )?;
        Ok(c.feasible[0])
    })?;

    let f0_vals = f0.eval_on(sample);
    let oracle = class.oracle(sample)?;
    let stats: Result<Vec<(f64, f64)>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|i| {
            let xi = NoiseVector::standard(n, seeds.derive("noise", i as u64));
            let y = xi.targets(&f0_vals);
            let fit = erm_fit_oracle(&oracle, &y, &cfg.erm)?;
            let diff = FunctionValues(
                fit.values
                    .as_slice()
                    .iter()
                    .zip(f0_vals.as_slice())
                    .map(|(a, b)| a - b)
                    .collect(),
            );
            let nrm = empirical_norm(&diff, sample)?;
            let inner = empirical_inner(&diff, &xi.as_values(), sample)?;
            Ok((nrm, inner))
        })
        .collect();
    let stats = stats?;
    let norms: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let norm_dev: Vec<f64> = stats.iter().map(|s| (s.0 - r_hat).abs()).collect();
    let width_dev: Vec<f64> = stats.iter().map(|s| (s.1 - w_at_r_hat).abs()).collect();

    let r = cfg.replicates as f64;
    let mut rows = Vec::with_capacity(cfg.t_multiples.len());
    for &mult in &cfg.t_multiples {
        let t = mult * r_hat;
        let bound = tail_bound(t, r_hat, n);
        let p = bound.min(1.0);
        let sigma = (p * (1.0 - p) / r).sqrt();
        let nf = norm_dev.iter().filter(|&&d| d >= t).count() as f64 / r;
        let wf = width_dev.iter().filter(|&&d| d >= t * r_hat.max(1e-12)).count() as f64 / r;
        rows.push(ConcentrationRow {
            t,
            bound,
            norm_frequency: nf,
            width_frequency: wf,
            norm_holds: nf <= bound + 3.0 * sigma,
            width_holds: wf <= bound + 3.0 * sigma,
        });
    }
    let median = |v: &mut Vec<f64>| -> f64 {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    let all_hold = rows.iter().all(|r| r.norm_holds && r.width_holds);
    Ok(ConcentrationReport {
        r_hat,
        w_at_r_hat,
        replicates: cfg.replicates,
        rows,
        median_norm_deviation: median(&mut norm_dev.clone()),
        median_norm: median(&mut norms.clone()),
        all_hold,
    })
}
