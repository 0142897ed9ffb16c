//! Experiment configuration, execution, persistence, and rate fitting.

pub mod config;
pub mod rates;
pub mod results;
pub mod runner;

pub use config::{f0_label, ClassConfig, EstimatorKnobs, ExperimentBlock, ExperimentConfig};
pub use rates::{fit_rate, group_cells, risk_estimate, RateFit, RiskEstimate};
pub use results::{
    canonical_sort, completed_keys, read_rows, ResultRow, ResultWriter, COLUMNS,
};
pub use runner::{cell_design, cell_quantities, run_experiment, CellQuantities};
