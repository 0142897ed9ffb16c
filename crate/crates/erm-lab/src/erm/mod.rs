//! Least-squares ERM for any class: exact solvers where the class has one,
//! conditional gradient over the LMO otherwise, plus the minimal-norm
//! selection rule for tie-breaking among near-minimizers.

pub mod frank_wolfe;

pub use frank_wolfe::{frank_wolfe, FwConfig, FwOutcome, FwStrategy, QuadObjective};

use crate::classes::{ClassOracle, FunctionClassSpec, OracleImpl};
use crate::core::{DesignSample, FittedFunction, FunctionValues};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    /// Psi: prefer the minimal empirical norm among near-minimizers,
    /// approximated by a second conditional-gradient pass with a vanishing
    /// ridge on ||f||_n^2.
    MinEmpiricalNorm,
}

#[derive(Debug, Clone, Copy)]
pub struct ErmConfig {
    pub max_iterations: usize,
    /// Duality-gap tolerance in squared-norm units.
    pub gap_tolerance: f64,
    pub selector: Selector,
}

impl Default for ErmConfig {
    fn default() -> Self {
        ErmConfig {
            max_iterations: 2000,
            gap_tolerance: 1e-7,
            selector: Selector::MinEmpiricalNorm,
        }
    }
}

impl ErmConfig {
    fn fw(&self, strategy: FwStrategy) -> FwConfig {
        FwConfig {
            max_iterations: self.max_iterations,
            gap_tolerance: self.gap_tolerance,
            strategy,
        }
    }
}

/// Empirical squared loss ||y - f||_n^2.
pub fn empirical_loss(f: &FunctionValues, y: &FunctionValues) -> f64 {
    let n = f.len() as f64;
    f.as_slice()
        .iter()
        .zip(y.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n
}

pub fn erm_fit(
    class: &FunctionClassSpec,
    sample: &DesignSample,
    targets: &FunctionValues,
    cfg: &ErmConfig,
) -> Result<FittedFunction> {
    let oracle = class.oracle(sample)?;
    erm_fit_oracle(&oracle, targets, cfg)
}

pub fn erm_fit_oracle(
    oracle: &ClassOracle,
    targets: &FunctionValues,
    cfg: &ErmConfig,
) -> Result<FittedFunction> {
    // exact paths first: their minimizer is unique, so Psi is a no-op
    if let Some(fit) = oracle.exact_erm(targets)? {
        return Ok(fit);
    }
    if let OracleImpl::Cvx(cvx) = &oracle.inner {
        let (values, member, gap, _ipm_converged) = cvx.erm_qp(targets, 1e-9)?;
        return Ok(FittedFunction {
            values,
            member,
            class_id: oracle.spec.class_id().to_string(),
            gap,
            // the certified gap is the convergence criterion
            converged: gap <= cfg.gap_tolerance,
        });
    }
    // conditional gradient, fully corrective, then the Psi tie-break pass:
    // re-minimize loss + mu ||f||_n^2 with mu at the gap tolerance, warm
    // started, which selects the minimal-norm face up to the certified gap.
    let obj = QuadObjective::least_squares(targets);
    let first = frank_wolfe(oracle, &obj, None, &cfg.fw(FwStrategy::FullyCorrective))?;
    let out = match cfg.selector {
        Selector::MinEmpiricalNorm => {
            let n = targets.len() as f64;
            let mu = cfg.gap_tolerance;
            let ridged = QuadObjective {
                q: obj.q.iter().map(|qi| qi + mu / n).collect(),
                b: obj.b.clone(),
            };
            let warm = (first.values.clone(), first.member.clone());
            let second =
                frank_wolfe(oracle, &ridged, Some(warm), &cfg.fw(FwStrategy::FullyCorrective))?;
            if second.converged || second.gap <= first.gap {
                second
            } else {
                first
            }
        }
    };
    Ok(FittedFunction {
        values: out.values,
        member: out.member,
        class_id: oracle.spec.class_id().to_string(),
        gap: out.gap,
        converged: out.converged,
    })
}
