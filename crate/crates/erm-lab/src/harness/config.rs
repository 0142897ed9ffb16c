//! Experiment configuration: a flat, human-editable TOML schema. Parsing is
//! strict (unknown keys rejected) and the parse -> serialize -> parse round
//! trip is the identity on every field.

use serde::{Deserialize, Serialize};

use crate::classes::{default_m_grid, ClassKind, CoefNorm, FunctionClassSpec};
use crate::core::{DistributionId, MemberFn};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    #[serde(default)]
    pub out: Option<String>,
    pub class: ClassConfig,
    /// the f0 panel: every member is a designated true function
    pub f0: Vec<MemberFn>,
    pub experiment: ExperimentBlock,
    #[serde(default)]
    pub estimators: EstimatorKnobs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    /// finite-dictionary | coef-ball-linear | bounded-isotonic |
    /// convex-lipschitz-1d | spiky-separated
    pub id: String,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub norm: Option<CoefNorm>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub hull: Option<bool>,
    #[serde(default)]
    pub generators: Option<Vec<MemberFn>>,
    /// spiky m-grid; omitted: powers of two up to n
    #[serde(default)]
    pub m_grid: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    /// "random": fresh design per replicate; "fixed": one design per cell;
    /// "file:<path>": fixed design points loaded from a text file
    #[serde(default = "default_design")]
    pub design: String,
    #[serde(default = "default_distribution")]
    pub distribution: String,
    /// diagnostic mode: zero noise, every fit should reach loss ~ 0
    #[serde(default)]
    pub zero_noise: bool,
}

fn default_design() -> String {
    "random".into()
}
fn default_distribution() -> String {
    "uniform".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorKnobs {
    /// noise draws per width estimate
    pub width_replicates: usize,
    /// design draws for expected widths
    pub outer_designs: usize,
    /// noise draws per design inside expected widths
    pub inner_replicates: usize,
    pub l_xi: f64,
    /// C in the fixed-design formulas
    pub c_fixed: f64,
    /// c in the random-design formula
    pub c_random: f64,
    pub erm_gap_tol: f64,
    pub erm_max_iter: usize,
    /// reference-sample multiplier for population risks
    pub reference_multiplier: usize,
    /// reference-sample multiplier for population-ball widths
    pub width_reference_multiplier: usize,
    pub reference_cap: usize,
    pub lambda_points: usize,
    pub radius_grid: usize,
    pub radius_replicates: usize,
    pub tstar_tolerance: f64,
    /// "unit-ball" (definition) or "global-width" (bounded-class remark)
    pub tstar_rhs: String,
    pub tstar_outer: usize,
    pub tstar_noise: usize,
    pub tstar_grid: usize,
}

impl Default for EstimatorKnobs {
    fn default() -> Self {
        EstimatorKnobs {
            width_replicates: 400,
            outer_designs: 20,
            inner_replicates: 400,
            l_xi: 0.05,
            c_fixed: 1.0,
            c_random: 0.01,
            erm_gap_tol: 1e-7,
            erm_max_iter: 2000,
            reference_multiplier: 50,
            width_reference_multiplier: 20,
            reference_cap: 1_000_000,
            lambda_points: 24,
            radius_grid: 25,
            radius_replicates: 400,
            tstar_tolerance: 1e-3,
            tstar_rhs: "unit-ball".into(),
            tstar_outer: 10,
            tstar_noise: 40,
            tstar_grid: 48,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::config(format!("config serialize: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.f0.is_empty() {
            return Err(Error::config("f0 panel must not be empty"));
        }
        if self.experiment.n_grid.is_empty() {
            return Err(Error::config("n_grid must not be empty"));
        }
        for w in self.experiment.n_grid.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::config("n_grid must be strictly increasing"));
            }
        }
        if self.experiment.replicates < 2 {
            return Err(Error::config("replicates must be >= 2"));
        }
        let k = &self.estimators;
        if !(k.l_xi > 0.0 && k.l_xi < 1.0) {
            return Err(Error::config("l_xi must lie in (0,1)"));
        }
        if k.c_fixed < 0.0 {
            return Err(Error::config("c_fixed must be >= 0"));
        }
        if !(k.c_random > 0.0 && k.c_random < 1.0) {
            return Err(Error::config("c_random must lie in (0,1)"));
        }
        if k.width_replicates < 2 || k.outer_designs < 2 {
            return Err(Error::config("width replicate knobs must be >= 2"));
        }
        if k.erm_gap_tol <= 0.0 || k.erm_max_iter == 0 {
            return Err(Error::config("erm knobs out of range"));
        }
        if k.tstar_rhs != "unit-ball" && k.tstar_rhs != "global-width" {
            return Err(Error::config("tstar_rhs must be unit-ball or global-width"));
        }
        if !matches!(self.experiment.design.as_str(), "random" | "fixed")
            && !self.experiment.design.starts_with("file:")
        {
            return Err(Error::config("design must be random, fixed, or file:<path>"));
        }
        if self.experiment.distribution != "uniform" {
            return Err(Error::config("only the uniform distribution is implemented"));
        }
        // class-specific parameter checks, and f0 structural checks
        let _ = self.build_class(*self.experiment.n_grid.last().unwrap(), 0)?;
        Ok(())
    }

    pub fn distribution(&self) -> Result<DistributionId> {
        let d = self.class_dim();
        Ok(DistributionId::Uniform { d })
    }

    pub fn class_dim(&self) -> usize {
        match self.class.id.as_str() {
            "coef-ball-linear" => self.class.dim.unwrap_or(1),
            _ => 1,
        }
    }

    /// Instantiate the class for sample size n with panel member f0_idx.
    pub fn build_class(&self, n: usize, f0_idx: usize) -> Result<FunctionClassSpec> {
        let f0 = self
            .f0
            .get(f0_idx)
            .ok_or_else(|| Error::config(format!("f0 index {f0_idx} out of range")))?
            .clone();
        let kind = match self.class.id.as_str() {
            "bounded-isotonic" => ClassKind::BoundedIsotonic,
            "convex-lipschitz-1d" => ClassKind::ConvexLipschitz1d,
            "coef-ball-linear" => ClassKind::CoefBallLinear {
                dim: self
                    .class
                    .dim
                    .ok_or_else(|| Error::config("coef-ball-linear requires dim"))?,
                norm: self.class.norm.unwrap_or(CoefNorm::L2),
                radius: self
                    .class
                    .radius
                    .ok_or_else(|| Error::config("coef-ball-linear requires radius"))?,
            },
            "finite-dictionary" => ClassKind::FiniteDictionary {
                generators: self
                    .class
                    .generators
                    .clone()
                    .ok_or_else(|| Error::config("finite-dictionary requires generators"))?,
                hull: self.class.hull.unwrap_or(true),
            },
            "spiky-separated" => ClassKind::SpikySeparated {
                m_grid: self.class.m_grid.clone().unwrap_or_else(|| default_m_grid(n)),
            },
            other => return Err(Error::config(format!("unknown class id {other}"))),
        };
        let mut spec = FunctionClassSpec::new(kind, f0);
        if let Some(a) = self.class.alpha {
            spec.alpha = Some(a);
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Reference-sample size for population risks at sample size n.
    pub fn reference_size(&self, n: usize) -> usize {
        (self.estimators.reference_multiplier * n).min(self.estimators.reference_cap).max(n)
    }

    pub fn width_reference_size(&self, n: usize) -> usize {
        (self.estimators.width_reference_multiplier * n)
            .min(self.estimators.reference_cap)
            .max(n)
    }
}

/// Stable short label for a panel member, used in result rows.
pub fn f0_label(f: &MemberFn) -> String {
    match f {
        MemberFn::Zero => "zero".into(),
        MemberFn::Constant { value } => format!("const{value}"),
        MemberFn::Affine { intercept, slope } => format!("affine{intercept}+{slope}x"),
        MemberFn::Linear { theta } => format!("linear-d{}", theta.len()),
        MemberFn::PiecewiseConstant { xs, .. } => format!("step-k{}", xs.len()),
        MemberFn::ConvexPwl { xs, .. } => format!("cvxpwl-k{}", xs.len()),
        MemberFn::MaxAffine { lines } => format!("maxaffine-k{}", lines.len()),
        MemberFn::Quadratic { a, b, c } => format!("quad{a}@{b}{c:+}"),
        MemberFn::Spiky(s) => format!("spiky-m{}w{}", s.m, s.weight),
        MemberFn::Mixture { parts } => format!("mixture-k{}", parts.len()),
    }
    .replace(' ', "")
    .replace(',', ";")
}
