//! Concrete convex function classes. Each class exposes one nontrivial
//! optimizer — a linear maximization oracle over its design values — plus an
//! exact least-squares solver where one exists, a feasibility test, and an
//! out-of-sample extension rule. The same oracle serves width estimation
//! (weights = Gaussian noise) and conditional-gradient fitting (weights =
//! residuals).

pub mod coef_ball;
pub mod convex_lip;
pub mod dictionary;
pub mod isotonic;
pub mod spiky;

use serde::{Deserialize, Serialize};

use crate::core::{DesignSample, FittedFunction, FunctionValues, MemberFn};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefNorm {
    L1,
    L2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassKind {
    FiniteDictionary { generators: Vec<MemberFn>, hull: bool },
    CoefBallLinear { dim: usize, norm: CoefNorm, radius: f64 },
    BoundedIsotonic,
    ConvexLipschitz1d,
    /// conv{0, union over the m-grid of signed-indicator families}; the grid
    /// is a finite surrogate for the all-m union.
    SpikySeparated { m_grid: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionClassSpec {
    pub kind: ClassKind,
    pub f0: MemberFn,
    /// Entropy exponent label, supplied from literature per class.
    pub alpha: Option<f64>,
}

/// Default m-grid: powers of two up to n.
pub fn default_m_grid(n: usize) -> Vec<usize> {
    let mut g = Vec::new();
    let mut m = 1usize;
    while m <= n {
        g.push(m);
        m *= 2;
    }
    g
}

impl FunctionClassSpec {
    pub fn new(kind: ClassKind, f0: MemberFn) -> Self {
        let alpha = match &kind {
            ClassKind::BoundedIsotonic => Some(1.0),
            ClassKind::ConvexLipschitz1d => Some(0.5),
            _ => None,
        };
        FunctionClassSpec { kind, f0, alpha }
    }

    pub fn class_id(&self) -> &'static str {
        match &self.kind {
            ClassKind::FiniteDictionary { .. } => "finite-dictionary",
            ClassKind::CoefBallLinear { .. } => "coef-ball-linear",
            ClassKind::BoundedIsotonic => "bounded-isotonic",
            ClassKind::ConvexLipschitz1d => "convex-lipschitz-1d",
            ClassKind::SpikySeparated { .. } => "spiky-separated",
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            ClassKind::FiniteDictionary { .. } => 1,
            ClassKind::CoefBallLinear { dim, .. } => *dim,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ClassKind::FiniteDictionary { generators, .. } => {
                if generators.is_empty() {
                    return Err(Error::config("dictionary needs at least one generator"));
                }
            }
            ClassKind::CoefBallLinear { dim, radius, .. } => {
                if *dim == 0 || *radius <= 0.0 {
                    return Err(Error::config("coef ball needs dim >= 1 and radius > 0"));
                }
            }
            ClassKind::SpikySeparated { m_grid } => {
                if m_grid.is_empty() {
                    return Err(Error::config("spiky m-grid must not be empty"));
                }
                if m_grid.iter().any(|&m| m == 0) {
                    return Err(Error::config("spiky m values must be >= 1"));
                }
            }
            _ => {}
        }
        if let MemberFn::Spiky(s) = &self.f0 {
            s.validate()?;
        }
        Ok(())
    }

    pub fn oracle<'a>(&'a self, sample: &'a DesignSample) -> Result<ClassOracle<'a>> {
        self.validate()?;
        if sample.dim() != self.dim() && !matches!(self.kind, ClassKind::CoefBallLinear { .. }) {
            return Err(Error::contract(format!(
                "class {} needs d = {}, sample has d = {}",
                self.class_id(),
                self.dim(),
                sample.dim()
            )));
        }
        let inner = match &self.kind {
            ClassKind::FiniteDictionary { generators, hull } => OracleImpl::Dict(
                dictionary::DictOracle::new(generators, *hull, sample),
            ),
            ClassKind::CoefBallLinear { dim, norm, radius } => {
                if sample.dim() != *dim {
                    return Err(Error::contract(format!(
                        "coef ball dim {} vs sample dim {}",
                        dim,
                        sample.dim()
                    )));
                }
                OracleImpl::Coef(coef_ball::CoefOracle::new(*dim, *norm, *radius, sample))
            }
            ClassKind::BoundedIsotonic => OracleImpl::Iso(isotonic::IsoOracle::new(sample)),
            ClassKind::ConvexLipschitz1d => {
                OracleImpl::Cvx(convex_lip::CvxOracle::new(sample))
            }
            ClassKind::SpikySeparated { m_grid } => {
                OracleImpl::Spiky(spiky::SpikyOracle::new(m_grid.clone(), sample))
            }
        };
        Ok(ClassOracle { spec: self, sample, inner })
    }
}

/// Result of a linear maximization: a feasible member, its design values,
/// and the achieved objective <w, f>_n. `exact` is false when the value is a
/// certified feasible lower bound rather than the supremum (flagged runs);
/// `gap` carries the certified duality gap of LP-backed oracles.
#[derive(Debug, Clone)]
pub struct LmoOutcome {
    pub values: FunctionValues,
    pub member: MemberFn,
    pub objective: f64,
    pub exact: bool,
    pub gap: f64,
}

/// Outcome of maximizing a separable linear-quadratic objective over the
/// class (used by localized-width estimation).
#[derive(Debug, Clone)]
pub struct QuadOutcome {
    pub values: FunctionValues,
    pub member: MemberFn,
    pub objective: f64,
    pub gap: f64,
    pub exact: bool,
}

pub enum OracleImpl<'a> {
    Dict(dictionary::DictOracle<'a>),
    Coef(coef_ball::CoefOracle<'a>),
    Iso(isotonic::IsoOracle<'a>),
    Cvx(convex_lip::CvxOracle<'a>),
    Spiky(spiky::SpikyOracle<'a>),
}

/// A class bound to a sample, with per-sample structure (sorted orders,
/// generator value tables, design matrices) prepared once.
pub struct ClassOracle<'a> {
    pub spec: &'a FunctionClassSpec,
    pub sample: &'a DesignSample,
    pub inner: OracleImpl<'a>,
}

impl<'a> ClassOracle<'a> {
    fn check_len(&self, v: &FunctionValues) -> Result<()> {
        if v.len() != self.sample.n() {
            return Err(Error::LengthMismatch { expected: self.sample.n(), got: v.len() });
        }
        Ok(())
    }

    /// Member maximizing <w, f>_n over the class.
    pub fn lmo(&self, w: &FunctionValues) -> Result<LmoOutcome> {
        self.check_len(w)?;
        match &self.inner {
            OracleImpl::Dict(o) => o.lmo(w),
            OracleImpl::Coef(o) => o.lmo(w),
            OracleImpl::Iso(o) => o.lmo(w),
            OracleImpl::Cvx(o) => o.lmo(w),
            OracleImpl::Spiky(o) => o.lmo(w),
        }
    }

    /// Closed-form / combinatorial least squares where the class has one.
    pub fn exact_erm(&self, targets: &FunctionValues) -> Result<Option<FittedFunction>> {
        self.check_len(targets)?;
        let fit = match &self.inner {
            OracleImpl::Dict(o) => Some(o.exact_erm(targets)?),
            OracleImpl::Coef(o) => Some(o.exact_erm(targets)?),
            OracleImpl::Iso(o) => Some(o.exact_erm(targets)),
            OracleImpl::Cvx(_) | OracleImpl::Spiky(_) => None,
        };
        Ok(fit.map(|(values, member)| FittedFunction {
            values,
            member,
            class_id: self.spec.class_id().to_string(),
            gap: 0.0,
            converged: true,
        }))
    }

    /// Maximize sum_i lin_i f(p_i) - sum_i quad_i (f(p_i) - shift_i)^2 over
    /// the class, exactly, for classes that support it. Returns Ok(None)
    /// when the class needs the conditional-gradient fallback.
    pub fn maximize_lq_exact(
        &self,
        lin: &[f64],
        quad: &[f64],
        shift: &[f64],
    ) -> Result<Option<QuadOutcome>> {
        let n = self.sample.n();
        if lin.len() != n || quad.len() != n || shift.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: lin.len() });
        }
        match &self.inner {
            OracleImpl::Iso(o) => Ok(Some(o.maximize_lq(lin, quad, shift))),
            OracleImpl::Cvx(o) => Ok(Some(o.maximize_lq(lin, quad, shift)?)),
            OracleImpl::Dict(o) => Ok(Some(o.maximize_lq(lin, quad, shift)?)),
            OracleImpl::Coef(o) => o.maximize_lq(lin, quad, shift),
            OracleImpl::Spiky(_) => Ok(None),
        }
    }

    /// Feasibility of a value vector on this sample, within tolerance.
    /// Spiky membership of raw values has no direct test; callers use the
    /// structural member check instead.
    pub fn feasible_values(&self, v: &FunctionValues, tol: f64) -> Result<bool> {
        self.check_len(v)?;
        match &self.inner {
            OracleImpl::Dict(o) => o.feasible_values(v, tol),
            OracleImpl::Coef(o) => o.feasible_values(v, tol),
            OracleImpl::Iso(o) => Ok(o.feasible_values(v, tol)),
            OracleImpl::Cvx(o) => Ok(o.feasible_values(v, tol)),
            OracleImpl::Spiky(_) => Err(Error::contract(
                "spiky feasibility is structural; check members, not raw values",
            )),
        }
    }

    /// Structural feasibility of a member representation.
    pub fn feasible_member(&self, f: &MemberFn, tol: f64) -> Result<bool> {
        match (&self.inner, f) {
            (_, MemberFn::Zero) => Ok(true),
            (OracleImpl::Spiky(o), m) => Ok(o.feasible_member(m, tol)),
            (OracleImpl::Iso(_), MemberFn::Mixture { parts }) => {
                let mut ok = true;
                for (_, p) in parts {
                    ok &= self.feasible_member(p, tol)?;
                }
                Ok(ok)
            }
            _ => {
                let vals = f.eval_on(self.sample);
                self.feasible_values(&vals, tol)
            }
        }
    }

    /// f0 values on the bound sample.
    pub fn f0_values(&self) -> FunctionValues {
        self.spec.f0.eval_on(self.sample)
    }
}

/// Spec-level convenience wrappers (one-shot; they rebuild the per-sample
/// oracle each call).
pub fn lmo(class: &FunctionClassSpec, sample: &DesignSample, w: &FunctionValues) -> Result<LmoOutcome> {
    class.oracle(sample)?.lmo(w)
}

pub fn exact_erm(
    class: &FunctionClassSpec,
    sample: &DesignSample,
    targets: &FunctionValues,
) -> Result<Option<FittedFunction>> {
    class.oracle(sample)?.exact_erm(targets)
}
