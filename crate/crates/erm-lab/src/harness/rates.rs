//! Risk aggregation and log-log rate fitting.

use std::collections::BTreeMap;

use crate::core::mean_and_se;
use crate::error::{Error, Result};

use super::results::ResultRow;

#[derive(Debug, Clone)]
pub struct RiskEstimate {
    pub n: usize,
    pub mean_fixed: f64,
    pub se_fixed: f64,
    pub mean_random: f64,
    pub se_random: f64,
    pub replicates: usize,
}

/// Sample means and standard errors for one (f0, n) cell.
pub fn risk_estimate(rows: &[&ResultRow]) -> Result<RiskEstimate> {
    if rows.len() < 2 {
        return Err(Error::contract("risk estimation needs >= 2 replicates"));
    }
    let fixed: Vec<f64> = rows.iter().map(|r| r.err_fixed).collect();
    let random: Vec<f64> = rows.iter().map(|r| r.err_random).collect();
    let (mf, sf) = mean_and_se(&fixed);
    let (mr, sr) = mean_and_se(&random);
    Ok(RiskEstimate {
        n: rows[0].n,
        mean_fixed: mf,
        se_fixed: sf,
        mean_random: mr,
        se_random: sr,
        replicates: rows.len(),
    })
}

#[derive(Debug, Clone)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub r2: f64,
    pub n_range: (usize, usize),
    pub points_used: usize,
    pub points_excluded: usize,
}

/// Ordinary least squares on (ln n, ln error). Nonpositive errors are
/// excluded with a flag; fewer than 4 usable points aborts.
pub fn fit_rate(points: &[(usize, f64)]) -> Result<RateFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(n, e)| ((*n as f64).ln(), e.ln()))
        .collect();
    let excluded = points.len() - usable.len();
    if usable.len() < 4 {
        return Err(Error::contract(format!(
            "rate fit needs >= 4 positive points, have {}",
            usable.len()
        )));
    }
    let k = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / k;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = usable.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::contract("rate fit needs at least two distinct n"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let dof = (k - 2.0).max(1.0);
    let resid2: f64 = usable
        .iter()
        .map(|p| {
            let e = p.1 - (intercept + slope * p.0);
            e * e
        })
        .sum();
    let slope_se = (resid2 / dof / sxx).sqrt();
    let r2 = if syy > 0.0 { 1.0 - resid2 / syy } else { 1.0 };
    let ns: Vec<usize> = points.iter().filter(|(_, e)| *e > 0.0).map(|(n, _)| *n).collect();
    Ok(RateFit {
        slope,
        intercept,
        slope_se,
        r2,
        n_range: (*ns.iter().min().unwrap(), *ns.iter().max().unwrap()),
        points_used: usable.len(),
        points_excluded: excluded,
    })
}

/// Group rows by (class, f0) and produce per-n risk estimates.
pub fn group_cells(rows: &[ResultRow]) -> BTreeMap<(String, String), Vec<RiskEstimate>> {
    let mut groups: BTreeMap<(String, String), BTreeMap<usize, Vec<&ResultRow>>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.class_id.clone(), r.f0_id.clone()))
            .or_default()
            .entry(r.n)
            .or_default()
            .push(r);
    }
    let mut out = BTreeMap::new();
    for (key, by_n) in groups {
        let mut ests = Vec::new();
        for (_, cell_rows) in by_n {
            if let Ok(e) = risk_estimate(&cell_rows) {
                ests.push(e);
            }
        }
        out.insert(key, ests);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered() {
        let pts: Vec<(usize, f64)> =
            [64usize, 128, 256, 512, 1024].iter().map(|&n| (n, (n as f64).powf(-2.0 / 3.0))).collect();
        let fit = fit_rate(&pts).unwrap();
        assert!((fit.slope + 2.0 / 3.0).abs() < 1e-9, "{}", fit.slope);
        assert!(fit.slope_se < 1e-9);
        assert!((fit.r2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_errors_have_zero_slope() {
        let pts: Vec<(usize, f64)> = [16usize, 32, 64, 128].iter().map(|&n| (n, 0.7)).collect();
        let fit = fit_rate(&pts).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn noisy_power_law_within_two_se() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut ok = 0;
        let trials = 40;
        for _ in 0..trials {
            let pts: Vec<(usize, f64)> = [64usize, 128, 256, 512, 1024, 2048]
                .iter()
                .map(|&n| {
                    let noise = 1.0 + 0.1 * (rng.random::<f64>() * 2.0 - 1.0);
                    (n, (n as f64).powf(-0.8) * noise)
                })
                .collect();
            let fit = fit_rate(&pts).unwrap();
            if (fit.slope + 0.8).abs() <= 2.0 * fit.slope_se {
                ok += 1;
            }
        }
        // 2-SE coverage should hold for the overwhelming majority
        assert!(ok >= trials * 8 / 10, "coverage {ok}/{trials}");
    }

    #[test]
    fn nonpositive_errors_excluded_and_few_points_abort() {
        let pts = vec![(16usize, 0.5), (32, 0.0), (64, 0.25), (128, 0.2), (256, 0.12)];
        let fit = fit_rate(&pts).unwrap();
        assert_eq!(fit.points_excluded, 1);
        assert_eq!(fit.points_used, 4);
        let too_few = vec![(16usize, 0.5), (32, 0.4), (64, -0.1), (128, 0.0)];
        assert!(fit_rate(&too_few).is_err());
    }
}
