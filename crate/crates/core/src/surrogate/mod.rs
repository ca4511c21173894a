//! Regression surrogates over the archive and the acquisition functions that rate offspring.
//!
//! Both models train on standardized targets; the GP rates candidates by expected improvement
//! over the best archived mean fitness and the MLP by its negated prediction, so that in both
//! cases a higher utility means a more promising candidate under minimization.

mod acquisition;
mod gp;
mod kernel;
mod mlp;

pub use acquisition::{expected_improvement, normal_cdf, normal_pdf};
pub use gp::{gp_log_marginal_likelihood, GpHyperparameters, GpModel, GpOptions};
pub use kernel::rbf_kernel;
pub use mlp::{mlp_loss_and_gradient, MlpModel, MlpOptions};

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::archive::Archive;
use crate::linalg::{LinalgError, Matrix};
use crate::numopt::NumericError;
use crate::scalar::Real;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SurrogateError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("cannot fit a surrogate on an empty training set")]
    EmptyTrainingSet,
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("all {restarts} restarts failed; last error: {last}")]
    Fit { restarts: usize, last: String },
}

/// Affine map of targets to zero mean and unit variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standardizer<T> {
    pub mean: T,
    pub std: T,
}

impl<T: Real> Standardizer<T> {
    /// Fits to `targets`; a zero spread falls back to unit scale.
    pub fn fit(targets: &[T]) -> Self {
        let n = T::from_count(targets.len().max(1));
        let mean = targets.iter().copied().sum::<T>() / n;
        let var = targets.iter().map(|&y| (y - mean) * (y - mean)).sum::<T>() / n;
        let std = var.sqrt();
        let scale = mean.abs().max(T::one());
        let std = if std > T::lit(1e-12) * scale { std } else { T::one() };
        Self { mean, std }
    }

    pub fn is_degenerate(targets: &[T]) -> bool {
        targets.windows(2).all(|w| w[0] == w[1])
    }

    pub fn forward(&self, y: T) -> T {
        (y - self.mean) / self.std
    }

    pub fn inverse(&self, z: T) -> T {
        z * self.std + self.mean
    }
}

/// Inputs and raw targets for model fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet<T> {
    pub inputs: Matrix<T>,
    pub targets: Vec<T>,
}

impl<T: Real> TrainingSet<T> {
    pub fn new(inputs: &[Vec<T>], targets: &[T]) -> Result<Self, SurrogateError> {
        if inputs.is_empty() {
            return Err(SurrogateError::EmptyTrainingSet);
        }
        if inputs.len() != targets.len() {
            return Err(SurrogateError::Dimension { expected: inputs.len(), got: targets.len() });
        }
        Ok(Self { inputs: Matrix::from_rows(inputs)?, targets: targets.to_vec() })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.cols()
    }
}

impl TrainingSet<f64> {
    /// One row per archived candidate: normalized genotype and mean fitness.
    pub fn from_archive(archive: &Archive) -> Result<Self, SurrogateError> {
        let (x, y) = archive.training_data();
        Self::new(&x, &y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Gp,
    Mlp,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Gp => "gp",
            ModelKind::Mlp => "mlp",
        })
    }
}

impl FromStr for ModelKind {
    type Err = SurrogateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gp" => Ok(Self::Gp),
            "mlp" => Ok(Self::Mlp),
            other => Err(SurrogateError::Parameter(format!("unknown model kind `{other}`"))),
        }
    }
}

/// Settings for both model families; only the one matching the requested kind is used.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateOptions<T> {
    pub gp: GpOptions<T>,
    pub mlp: MlpOptions<T>,
}

impl<T: Real> Default for SurrogateOptions<T> {
    fn default() -> Self {
        Self { gp: GpOptions::default(), mlp: MlpOptions::default() }
    }
}

/// A fitted regression model.
#[derive(Debug, Clone, PartialEq)]
pub enum Surrogate<T> {
    Gp(GpModel<T>),
    Mlp(MlpModel<T>),
}

impl<T: Real> Surrogate<T> {
    pub fn fit<R: Rng + ?Sized>(
        kind: ModelKind,
        data: &TrainingSet<T>,
        opts: &SurrogateOptions<T>,
        rng: &mut R,
    ) -> Result<Self, SurrogateError> {
        Ok(match kind {
            ModelKind::Gp => Surrogate::Gp(GpModel::fit(data, &opts.gp, rng)?),
            ModelKind::Mlp => Surrogate::Mlp(MlpModel::fit(data, &opts.mlp, rng)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Surrogate::Gp(_) => ModelKind::Gp,
            Surrogate::Mlp(_) => ModelKind::Mlp,
        }
    }

    /// Fitted hyperparameters / training loss as key-value pairs for run summaries.
    pub fn describe(&self) -> Vec<(String, f64)> {
        match self {
            Surrogate::Gp(m) => {
                let h = m.hyperparameters();
                vec![
                    ("lengthscale".into(), h.log_lengthscale.exp().as_f64()),
                    ("signal_std".into(), h.log_signal_std.exp().as_f64()),
                    ("noise_std".into(), h.log_noise_std.exp().as_f64()),
                    ("jitter".into(), m.jitter().as_f64()),
                    ("log_marginal_likelihood".into(), m.log_marginal_likelihood().as_f64()),
                ]
            }
            Surrogate::Mlp(m) => vec![
                ("hidden_units".into(), m.hidden_units() as f64),
                ("training_loss".into(), m.training_loss().as_f64()),
            ],
        }
    }
}

/// Utility of evaluating `x`; higher is more promising for both model kinds.
pub fn rate_candidate<T: Real>(model: &Surrogate<T>, x: &[T], best_archive_fitness: T) -> T {
    match model {
        Surrogate::Gp(gp) => {
            let (mean, std) = gp.predict(x);
            expected_improvement(mean, std, best_archive_fitness).unwrap_or(T::zero())
        }
        Surrogate::Mlp(mlp) => -mlp.predict(x),
    }
}
