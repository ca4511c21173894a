use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use rayon::ThreadPool;

use super::{EvolutionError, Individual};
use crate::param_space::Genotype;

pub type ObjectiveError = Box<dyn std::error::Error + Send + Sync>;

/// Expensive, possibly noisy, minimized objective. The seed fully determines the replicate.
pub trait Objective: Sync {
    fn evaluate(&self, genotype: &Genotype, replicate_seed: u64) -> Result<f64, ObjectiveError>;
}

/// Adapts a closure into an [`Objective`].
pub struct FnObjective<F>(pub F);

impl<F> Objective for FnObjective<F>
where
    F: Fn(&Genotype, u64) -> Result<f64, ObjectiveError> + Sync,
{
    fn evaluate(&self, genotype: &Genotype, replicate_seed: u64) -> Result<f64, ObjectiveError> {
        (self.0)(genotype, replicate_seed)
    }
}

/// Wraps an objective and counts invocations.
pub struct CountingObjective<O> {
    inner: O,
    calls: AtomicUsize,
}

impl<O: Objective> CountingObjective<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<O: Objective> Objective for CountingObjective<O> {
    fn evaluate(&self, genotype: &Genotype, replicate_seed: u64) -> Result<f64, ObjectiveError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.evaluate(genotype, replicate_seed)
    }
}

/// Independent random streams derived from one run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum SeedStream {
    InitialPopulation = 1,
    Variation = 2,
    Replicate = 3,
    ModelFit = 4,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic seed for `(run_seed, stream, a, b)`; e.g. a replicate seed uses
/// `a = evaluation_index`, `b = replicate_index`.
pub fn derive_seed(run_seed: u64, stream: SeedStream, a: u64, b: u64) -> u64 {
    let mut h = splitmix64(run_seed);
    for v in [stream as u64, a, b] {
        h = splitmix64(h ^ v);
    }
    h
}

/// Evaluates `genotype` `k` times with replicate seeds derived from `(run_seed, evaluation_index)`.
/// Replicates run on `pool` when given; results are combined in replicate order either way.
pub fn evaluate_candidate<O: Objective + ?Sized>(
    objective: &O,
    genotype: &Genotype,
    replicates: usize,
    run_seed: u64,
    evaluation_index: usize,
    pool: Option<&ThreadPool>,
) -> Result<Individual, EvolutionError> {
    if replicates == 0 {
        return Err(EvolutionError::Config("replicates must be positive".into()));
    }
    let one = |r: usize| {
        let seed = derive_seed(run_seed, SeedStream::Replicate, evaluation_index as u64, r as u64);
        objective.evaluate(genotype, seed).map_err(|source| EvolutionError::Objective {
            evaluation_index,
            replicate: r,
            source,
        })
    };
    let samples: Result<Vec<f64>, EvolutionError> = match pool {
        Some(pool) if replicates > 1 => pool.install(|| (0..replicates).into_par_iter().map(one).collect()),
        _ => (0..replicates).map(one).collect(),
    };
    Ok(Individual::new(genotype.clone(), samples?))
}
