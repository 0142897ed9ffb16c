//! Evaluators for the lower-bound formulas and concentration claims: they
//! turn measured complexities and errors into pass/fail/margin reports.

pub mod concentration;
pub mod formulas;
pub mod isometry;

pub use concentration::{concentration_check, ConcentrationConfig, ConcentrationReport};
pub use formulas::{
    fixed_design_bound, general_fixed_bound, predicted_exponents, random_design_bound,
    ExponentReport, Regime,
};
pub use isometry::{isometry_gap, IsometryConfig, IsometryReport};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

/// One inequality instance: measured left side vs bound value, with the
/// Monte-Carlo uncertainty folded into the verdict. The verdict is total:
/// overlapping 3-SE intervals are inconclusive; otherwise the combined-SE
/// comparison decides holds/violated.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub bound_id: String,
    pub left: f64,
    pub left_se: f64,
    pub right: f64,
    pub right_se: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub inputs: String,
}

impl BoundReport {
    pub fn new(
        bound_id: impl Into<String>,
        left: f64,
        left_se: f64,
        right: f64,
        right_se: f64,
        inputs: impl Into<String>,
    ) -> Self {
        let combined = (left_se * left_se + right_se * right_se).sqrt();
        let overlap =
            left - 3.0 * left_se <= right + 3.0 * right_se
                && right - 3.0 * right_se <= left + 3.0 * left_se;
        let verdict = if overlap {
            Verdict::Inconclusive
        } else if left >= right - 3.0 * combined {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        BoundReport {
            bound_id: bound_id.into(),
            left,
            left_se,
            right,
            right_se,
            margin: if right != 0.0 { left / right } else { f64::INFINITY },
            verdict,
            inputs: inputs.into(),
        }
    }

    pub fn acceptable(&self) -> bool {
        matches!(self.verdict, Verdict::Holds | Verdict::Inconclusive)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Holds => write!(f, "holds"),
            Verdict::Violated => write!(f, "violated"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}
