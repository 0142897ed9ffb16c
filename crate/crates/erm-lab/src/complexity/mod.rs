//! Monte-Carlo estimators of the complexity functionals: global and
//! localized Gaussian widths, the critical radius, the localized-richness
//! radius, the second fixed-design term, and greedy packing numbers with a
//! Sudakov minoration check. Replicates are independent jobs keyed by
//! derived seeds; reductions are order-independent compensated sums, so any
//! parallel schedule produces identical numbers.

pub mod lx;
pub mod packing;
pub mod radius;
pub mod tstar;
pub mod width;

pub use lx::l_x_complexity;
pub use packing::{greedy_packing, sudakov_check, PackingResult, SudakovReport};
pub use radius::{critical_radius, CriticalRadius};
pub use tstar::{t_star, t_star_multi, TStarConfig, TStarResult, TStarRhs};
pub use width::{
    empirical_width, expected_width, localized_curve, with_ball_context, PenalizedCtx,
    WidthCurve,
};

use crate::core::{DesignSample, MemberFn};

/// Which norm a localized ball uses: the training sample's own empirical
/// norm, or the population surrogate on an explicit reference sample.
pub enum BallNorm<'a> {
    Empirical,
    Population(&'a DesignSample),
}

pub struct BallSpec<'a> {
    pub center: &'a MemberFn,
    pub radius: f64,
    pub norm: BallNorm<'a>,
}

/// A Monte-Carlo width estimate with replicate count, standard error, and
/// seed provenance. For ball-constrained targets the mean is the certified
/// feasible value and `dual_mean` the recorded Lagrangian upper bound.
#[derive(Debug, Clone)]
pub struct WidthEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub replicates: usize,
    pub seed: u64,
    pub target: String,
    pub dual_mean: Option<f64>,
    /// Set when any inner solve was inexact (non-separated spiky greedy,
    /// bracket failure in the Lagrangian bisection).
    pub flagged: bool,
}

impl WidthEstimate {
    /// Classes containing the ball center have nonnegative width; allow
    /// three standard errors of Monte-Carlo slack.
    pub fn sane(&self) -> bool {
        self.mean >= -3.0 * self.std_error
    }
}
