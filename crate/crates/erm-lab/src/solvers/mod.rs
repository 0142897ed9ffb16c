//! In-repo optimization machinery shared by the class oracles.

pub mod banded;
pub mod dense;
pub mod ipm;
pub mod lsq;
pub mod pava;
pub mod simplex_qp;
