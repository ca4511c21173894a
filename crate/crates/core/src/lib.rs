//! Surrogate-assisted evolutionary optimization of a noisy agent-based drug-delivery simulator.
//!
//! The numerical core (linear algebra, L-BFGS, GP and MLP surrogates) is generic over the
//! scalar type through [`Real`]; the aliases below fix it to `f64`.

pub mod archive;
pub mod benchmark;
pub mod evolution;
pub mod linalg;
pub mod numopt;
pub mod param_space;
pub mod scalar;
pub mod simulator;
pub mod stats;
pub mod surrogate;

pub use scalar::Real;

pub type Matrix = linalg::Matrix<f64>;
pub type Cholesky = linalg::Cholesky<f64>;
pub type GpModel = surrogate::GpModel<f64>;
pub type MlpModel = surrogate::MlpModel<f64>;
pub type Surrogate = surrogate::Surrogate<f64>;
pub type TrainingSet = surrogate::TrainingSet<f64>;
pub type GpHyperparameters = surrogate::GpHyperparameters<f64>;
