//! The reproduction engine: expands a config into (f0, n) cells, computes
//! the per-cell complexity quantities once with their own seed bank, runs
//! error replicates in parallel with per-replicate derived seeds, and
//! appends rows incrementally so partial runs stay usable.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::bounds::{fixed_design_bound, random_design_bound};
use crate::classes::FunctionClassSpec;
use crate::complexity::radius::RadiusConfig;
use crate::complexity::{critical_radius, empirical_width, expected_width, t_star_multi, TStarConfig, TStarRhs};
use crate::core::{
    DesignKind, DesignSample, FunctionValues, MemberFn, NoiseVector, SeedPolicy,
};
use crate::erm::{erm_fit_oracle, ErmConfig, Selector};
use crate::error::{Error, Result};

use super::config::{f0_label, ExperimentConfig};
use super::results::{completed_keys, ResultRow, ResultWriter};

#[derive(Debug, Clone)]
pub struct CellQuantities {
    pub w_hat: f64,
    pub w: f64,
    pub r_star: f64,
    pub t_star: f64,
    pub bound_fixed: f64,
    pub bound_random: f64,
    /// t* at the sensitivity l_xi values (shares the main estimate's curve)
    pub t_star_sensitivity: Vec<(f64, f64)>,
}

pub fn erm_config(cfg: &ExperimentConfig) -> ErmConfig {
    ErmConfig {
        max_iterations: cfg.estimators.erm_max_iter,
        gap_tolerance: cfg.estimators.erm_gap_tol,
        selector: Selector::MinEmpiricalNorm,
    }
}

fn load_point_file(path: &str, n: usize, d: usize) -> Result<DesignSample> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read point file {path}: {e}")))?;
    let mut pts = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let coords = coords.map_err(|e| Error::config(format!("point file: {e}")))?;
        if coords.len() != d {
            return Err(Error::config(format!(
                "point file row has {} coords, class needs {d}",
                coords.len()
            )));
        }
        pts.push(coords);
    }
    if pts.len() < n {
        return Err(Error::config(format!(
            "point file has {} points, cell needs {n}",
            pts.len()
        )));
    }
    pts.truncate(n);
    DesignSample::from_points(pts, DesignKind::Fixed)
}

/// The design every fixed-design quantity of a cell is measured on.
pub fn cell_design(
    cfg: &ExperimentConfig,
    n: usize,
    cell_seeds: &SeedPolicy,
) -> Result<DesignSample> {
    match cfg.experiment.design.as_str() {
        "fixed" | "random" => {
            DesignSample::draw(cfg.distribution()?, n, cell_seeds.derive("canonical-design", 0))
        }
        other => {
            let path = other.trim_start_matches("file:");
            load_point_file(path, n, cfg.class_dim())
        }
    }
}

/// Complexity quantities for one (class, f0, n) cell, computed once with the
/// cell's own seed bank and shared across error replicates.
pub fn cell_quantities(
    cfg: &ExperimentConfig,
    class: &FunctionClassSpec,
    canonical: &DesignSample,
    n: usize,
    cell_seeds: &SeedPolicy,
) -> Result<CellQuantities> {
    let k = &cfg.estimators;
    let w_hat = empirical_width(
        class,
        canonical,
        None,
        k.width_replicates,
        &cell_seeds.derive_policy("width-hat", 0),
        "w",
    )?;
    let w = expected_width(
        class,
        &cfg.distribution()?,
        n,
        None,
        k.outer_designs,
        k.inner_replicates,
        &cell_seeds.derive_policy("width-expected", 0),
        "w",
    )?;
    let rad = critical_radius(
        class,
        canonical,
        &class.f0,
        None,
        &RadiusConfig {
            grid_points: k.radius_grid,
            replicates: k.radius_replicates,
            lambda_points: k.lambda_points,
        },
        &cell_seeds.derive_policy("radius", 0),
    )?;
    // one curve serves the configured l_xi and the sensitivity panel
    let mut l_list = vec![k.l_xi];
    for &l in &[0.02, 0.05, 0.1] {
        if !l_list.contains(&l) {
            l_list.push(l);
        }
    }
    let ts_all = t_star_multi(
        class,
        &class.f0,
        n,
        &l_list,
        &cfg.distribution()?,
        &TStarConfig {
            outer_designs: k.tstar_outer,
            noise_replicates: k.tstar_noise,
            lambda_points: k.lambda_points,
            bisection_tolerance: k.tstar_tolerance,
            cap: 2.0,
            rhs: if k.tstar_rhs == "global-width" {
                TStarRhs::GlobalWidth
            } else {
                TStarRhs::UnitEmpiricalBall
            },
            reference_size: cfg.width_reference_size(n),
            grid_points: k.tstar_grid,
        },
        &cell_seeds.derive_policy("tstar", 0),
    )?;
    let ts = ts_all[0].t_star;
    Ok(CellQuantities {
        w_hat: w_hat.mean,
        w: w.mean,
        r_star: rad.r_star,
        t_star: ts,
        bound_fixed: fixed_design_bound(w_hat.mean, n, k.c_fixed),
        bound_random: random_design_bound(w.mean, ts, k.c_random),
        t_star_sensitivity: ts_all.iter().map(|o| (o.l_xi, o.t_star)).collect(),
    })
}

pub fn run_experiment(cfg: &ExperimentConfig, out: &Path, resume: bool) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    if !resume && out.exists() && std::fs::metadata(out)?.len() > 0 {
        return Err(Error::config(format!(
            "output {} already exists; pass --resume to continue it",
            out.display()
        )));
    }
    let done = if resume { completed_keys(out)? } else { Default::default() };
    let mut writer = ResultWriter::open(out)?;
    let master = SeedPolicy::new(cfg.master_seed);
    let mut all_rows = Vec::new();

    for (f0_idx, f0) in cfg.f0.iter().enumerate() {
        let label = f0_label(f0);
        for &n in &cfg.experiment.n_grid {
            let cell_seeds = master.derive_policy(&format!("cell/{f0_idx}/{n}"), 0);
            let class = cfg.build_class(n, f0_idx)?;
            let canonical = cell_design(cfg, n, &cell_seeds)?;
            let pending: Vec<usize> = (0..cfg.experiment.replicates)
                .filter(|r| !done.contains(&(label.clone(), n, *r)))
                .collect();
            if pending.is_empty() {
                continue;
            }
            let quantities = cell_quantities(cfg, &class, &canonical, n, &cell_seeds)?;
            let mut rows =
                run_cell_replicates(cfg, &class, &canonical, n, &label, &quantities, &pending, &cell_seeds)?;
            rows.sort_by_key(|r| r.replicate);
            writer.append(&rows)?;
            all_rows.extend(rows);
        }
    }
    Ok(all_rows)
}

#[allow(clippy::too_many_arguments)]
pub fn run_cell_replicates(
    cfg: &ExperimentConfig,
    class: &FunctionClassSpec,
    canonical: &DesignSample,
    n: usize,
    f0_id: &str,
    quantities: &CellQuantities,
    replicates: &[usize],
    cell_seeds: &SeedPolicy,
) -> Result<Vec<ResultRow>> {
    let reference = DesignSample::draw(
        cfg.distribution()?,
        cfg.reference_size(n),
        cell_seeds.derive("risk-reference", 0),
    )?;
    let f0_on_reference = class.f0.eval_on(&reference);
    let random_design = cfg.experiment.design.as_str() == "random";
    let erm_cfg = erm_config(cfg);
    // the canonical oracle is shared when the design is fixed
    let shared_oracle = if random_design { None } else { Some(class.oracle(canonical)?) };

    let rows: Result<Vec<ResultRow>> = replicates
        .par_iter()
        .map(|&rep| {
            let t0 = Instant::now();
            let rep_seeds = cell_seeds.derive_policy("replicate", rep as u64);
            let design_owned;
            let design: &DesignSample = if random_design {
                design_owned =
                    DesignSample::draw(cfg.distribution()?, n, rep_seeds.derive("design", 0))?;
                &design_owned
            } else {
                canonical
            };
            let f0_vals = class.f0.eval_on(design);
            let y = if cfg.experiment.zero_noise {
                f0_vals.clone()
            } else {
                NoiseVector::standard(n, rep_seeds.derive("noise", 0)).targets(&f0_vals)
            };
            let fit = match &shared_oracle {
                Some(oracle) => erm_fit_oracle(oracle, &y, &erm_cfg)?,
                None => {
                    let oracle = class.oracle(design)?;
                    erm_fit_oracle(&oracle, &y, &erm_cfg)?
                }
            };
            let err_fixed = mean_sq_diff(fit.values.as_slice(), f0_vals.as_slice());
            let fit_on_reference = fit.member.eval_on(&reference);
            let err_random =
                mean_sq_diff(fit_on_reference.as_slice(), f0_on_reference.as_slice());
            Ok(ResultRow {
                class_id: class.class_id().to_string(),
                f0_id: f0_id.to_string(),
                n,
                design: cfg.experiment.design.clone(),
                replicate: rep,
                seed: rep_seeds.master,
                err_fixed,
                err_random,
                w_hat: quantities.w_hat,
                w: quantities.w,
                r_star: quantities.r_star,
                t_star: quantities.t_star,
                bound_fixed: quantities.bound_fixed,
                bound_random: quantities.bound_random,
                converged: fit.converged,
                wall_ms: t0.elapsed().as_millis() as u64,
            })
        })
        .collect();
    rows
}

fn mean_sq_diff(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    crate::core::inner_mean(&diff, &diff)
}

/// Convenience: evaluate a fitted member's population error on a reference.
pub fn population_error(fit: &MemberFn, f0: &MemberFn, reference: &DesignSample) -> f64 {
    let a: FunctionValues = fit.eval_on(reference);
    let b = f0.eval_on(reference);
    mean_sq_diff(a.as_slice(), b.as_slice())
}
