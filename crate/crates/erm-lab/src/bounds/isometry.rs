//! Norm isometry gap: probe-approximated sup over member pairs of
//! | ||f-g||_n^2 - ||f-g||_P^2 |, compared per design replicate against the
//! 10 W(F) threshold. The probe maximum is a lower bound on the true sup.

use crate::classes::FunctionClassSpec;
use crate::complexity::width::expected_width;
use crate::core::{
    DesignSample, DistributionId, FunctionValues, MemberFn, NoiseVector, SeedPolicy,
};
use crate::error::Result;

pub struct IsometryConfig {
    pub replicates: usize,
    pub probe_pairs: usize,
    pub reference_size: usize,
    pub width_outer: usize,
    pub width_inner: usize,
}

impl Default for IsometryConfig {
    fn default() -> Self {
        IsometryConfig {
            replicates: 200,
            probe_pairs: 200,
            reference_size: 50_000,
            width_outer: 10,
            width_inner: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IsometryReport {
    pub w_global: f64,
    pub threshold: f64,
    pub mean_max_gap: f64,
    pub exceedance_fraction: f64,
    pub replicates: usize,
    pub probe_pairs: usize,
}

pub fn isometry_gap(
    class: &FunctionClassSpec,
    n: usize,
    distribution: &DistributionId,
    cfg: &IsometryConfig,
    seeds: &SeedPolicy,
) -> Result<IsometryReport> {
    // probe members: random LMO outputs on a dedicated base design
    let base = DesignSample::draw(distribution.clone(), n, seeds.derive("base", 0))?;
    let oracle = class.oracle(&base)?;
    let mut members: Vec<MemberFn> = Vec::with_capacity(2 * cfg.probe_pairs);
    for i in 0..2 * cfg.probe_pairs {
        let w = NoiseVector::standard(n, seeds.derive("probe", i as u64));
        members.push(oracle.lmo(&FunctionValues(w.xi))?.member);
    }
    // population norms of the probe differences, fixed once on a reference
    let reference =
        DesignSample::draw(distribution.clone(), cfg.reference_size, seeds.derive("reference", 0))?;
    let ref_vals: Vec<Vec<f64>> = members.iter().map(|m| m.eval_on(&reference).0).collect();
    let mut pop_norm2 = Vec::with_capacity(cfg.probe_pairs);
    for p in 0..cfg.probe_pairs {
        let (a, b) = (&ref_vals[2 * p], &ref_vals[2 * p + 1]);
        let m = reference.n() as f64;
        pop_norm2.push(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / m);
    }

    let west = expected_width(
        class,
        distribution,
        n,
        None,
        cfg.width_outer,
        cfg.width_inner,
        &seeds.derive_policy("width", 0),
        "w",
    )?;
    let threshold = 10.0 * west.mean;

    let mut exceed = 0usize;
    let mut gaps = Vec::with_capacity(cfg.replicates);
    for k in 0..cfg.replicates {
        let design = DesignSample::draw(distribution.clone(), n, seeds.derive("design", k as u64))?;
        let dn = design.n() as f64;
        let design_vals: Vec<Vec<f64>> =
            members.iter().map(|m| m.eval_on(&design).0).collect();
        let mut max_gap = 0.0f64;
        for p in 0..cfg.probe_pairs {
            let (a, b) = (&design_vals[2 * p], &design_vals[2 * p + 1]);
            let emp2 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / dn;
            max_gap = max_gap.max((emp2 - pop_norm2[p]).abs());
        }
        gaps.push(max_gap);
        if max_gap > threshold {
            exceed += 1;
        }
    }
    Ok(IsometryReport {
        w_global: west.mean,
        threshold,
        mean_max_gap: crate::core::mean_and_se(&gaps).0,
        exceedance_fraction: exceed as f64 / cfg.replicates as f64,
        replicates: cfg.replicates,
        probe_pairs: cfg.probe_pairs,
    })
}
