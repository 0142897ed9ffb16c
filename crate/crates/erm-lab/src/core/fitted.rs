//! Fitted functions: values on the training sample plus the extension rule
//! used for out-of-sample evaluation.

use crate::core::member::MemberFn;
use crate::core::sample::DesignSample;
use crate::core::values::FunctionValues;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct FittedFunction {
    pub values: FunctionValues,
    /// Extension rule: a concrete class member whose restriction to the
    /// training sample reproduces `values` (within solver tolerance).
    pub member: MemberFn,
    pub class_id: String,
    /// Certified optimality gap of the solver that produced the fit
    /// (0 for exact solvers).
    pub gap: f64,
    pub converged: bool,
}

impl FittedFunction {
    /// Largest |extension(x_i) - values_i| over the training sample.
    pub fn extension_defect(&self, sample: &DesignSample) -> f64 {
        let ext = self.member.eval_on(sample);
        self.values
            .0
            .iter()
            .zip(&ext.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluate a fit's extension rule at new points.
pub fn extend(fit: &FittedFunction, _sample: &DesignSample, query: &[Vec<f64>]) -> Result<Vec<f64>> {
    fit.member.eval_at(query)
}
