//! erm-lab: a desk-scale laboratory for measuring the error floors of
//! least-squares empirical risk minimization over convex function classes.
//!
//! The crate is organized around one solver primitive per class (a linear
//! maximization oracle), Monte-Carlo estimators of Gaussian complexities and
//! their localized variants, evaluators for the lower-bound formulas those
//! complexities enter, and an experiment harness that ties them into
//! reproducible rate studies.

pub mod bounds;
pub mod classes;
pub mod complexity;
pub mod core;
pub mod erm;
pub mod error;
pub mod harness;
pub mod solvers;

pub use error::{Error, Result};
