//! Steady-state GA and its surrogate-assisted variant with pre-selection and static resampling.
//!
//! Every candidate is evaluated `k` times on the real objective and assigned the mean; selection
//! and replacement only ever look at those real means. The surrogate, when present, only decides
//! which one of `M` generated offspring is sent for real evaluation.

mod config;
mod objective;
mod operators;
mod run;

pub use config::EvolutionConfig;
pub use objective::{derive_seed, evaluate_candidate, CountingObjective, FnObjective, Objective, ObjectiveError, SeedStream};
pub use operators::{make_offspring, mutate, perturb, preselect, tournament_select, uniform_crossover, TournamentMode};
pub use run::{initial_population, run_ga, run_saga, Algorithm, ModelFitRecord, RunOptions, RunResult, RunSeeds};

use crate::param_space::Genotype;

#[derive(Debug, thiserror::Error)]
pub enum EvolutionError {
    #[error("invalid evolution setting: {0}")]
    Config(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("objective failed at evaluation {evaluation_index}, replicate {replicate}: {source}")]
    Objective {
        evaluation_index: usize,
        replicate: usize,
        #[source]
        source: ObjectiveError,
    },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Population member with its real, replicate-averaged fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genotype: Genotype,
    pub mean_fitness: f64,
    pub samples: Vec<f64>,
}

impl Individual {
    pub fn new(genotype: Genotype, samples: Vec<f64>) -> Self {
        let mean_fitness = crate::archive::mean(&samples);
        Self { genotype, mean_fitness, samples }
    }
}
