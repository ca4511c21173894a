//! Quasi-Newton minimization and finite-difference gradient checks.

mod finite_diff;
mod lbfgs;
mod line_search;

pub use finite_diff::finite_diff_grad;
pub use lbfgs::{lbfgs_minimize, LbfgsOptions, LbfgsResult, LbfgsStatus};
pub use line_search::{strong_wolfe, LineSearchFailure, LineSearchPoint};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("non-finite {what} at point {point:?}")]
    NonFinite { what: &'static str, point: Vec<f64> },
    #[error("invalid optimizer option: {0}")]
    Options(String),
    #[error("finite-difference step must be positive, got {0}")]
    Step(f64),
}
