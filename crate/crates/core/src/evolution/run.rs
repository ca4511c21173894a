use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::ThreadPool;

use super::objective::{derive_seed, evaluate_candidate, Objective, SeedStream};
use super::operators::{make_offspring, preselect, tournament_select, TournamentMode};
use super::{EvolutionConfig, EvolutionError, Individual};
use crate::archive::{Archive, ArchiveRecord};
use crate::param_space::Genotype;
use crate::surrogate::{rate_candidate, ModelKind, Surrogate, SurrogateOptions, TrainingSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ga,
    SagaGp,
    SagaMlp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Ga, Algorithm::SagaGp, Algorithm::SagaMlp];

    pub fn model_kind(self) -> Option<ModelKind> {
        match self {
            Algorithm::Ga => None,
            Algorithm::SagaGp => Some(ModelKind::Gp),
            Algorithm::SagaMlp => Some(ModelKind::Mlp),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Ga => "ga",
            Algorithm::SagaGp => "saga-gp",
            Algorithm::SagaMlp => "saga-mlp",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ga" => Ok(Algorithm::Ga),
            "saga-gp" | "gp" => Ok(Algorithm::SagaGp),
            "saga-mlp" | "mlp" => Ok(Algorithm::SagaMlp),
            other => Err(format!("unknown algorithm `{other}` (expected ga, saga-gp or saga-mlp)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub run_seed: u64,
    /// Maximum number of replicate evaluations executed concurrently.
    pub parallel_replicates: usize,
    pub surrogate: SurrogateOptions<f64>,
}

impl RunOptions {
    pub fn new(run_seed: u64) -> Self {
        Self { run_seed, parallel_replicates: 1, surrogate: SurrogateOptions::default() }
    }
}

/// Seeds of every random stream used by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSeeds {
    pub run_seed: u64,
    pub initial_population: u64,
    pub variation: u64,
}

impl RunSeeds {
    pub fn derive(run_seed: u64) -> Self {
        Self {
            run_seed,
            initial_population: derive_seed(run_seed, SeedStream::InitialPopulation, 0, 0),
            variation: derive_seed(run_seed, SeedStream::Variation, 0, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFitRecord {
    /// Index the pre-selected offspring received.
    pub evaluation_index: usize,
    pub training_size: usize,
    /// Seed of the restart sampler.
    pub seed: u64,
    pub summary: Vec<(String, f64)>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub config: EvolutionConfig,
    pub archive: Archive,
    pub best_trace: Vec<(usize, f64)>,
    pub final_population: Vec<Individual>,
    pub seeds: RunSeeds,
    pub wall_time: f64,
    pub warnings: Vec<String>,
    pub model_fits: Vec<ModelFitRecord>,
}

impl RunResult {
    pub fn best(&self) -> Option<&ArchiveRecord> {
        self.archive.best()
    }
}

/// Random initial population; depends on `run_seed` only so every algorithm can share it.
pub fn initial_population(cfg: &EvolutionConfig, run_seed: u64) -> Vec<Genotype> {
    let mut rng = ChaCha8Rng::seed_from_u64(RunSeeds::derive(run_seed).initial_population);
    (0..cfg.population_size).map(|_| Genotype::random(cfg.dimension, &mut rng)).collect()
}

/// Steady-state GA without a surrogate: one offspring per iteration.
pub fn run_ga<O: Objective + ?Sized>(
    cfg: &EvolutionConfig,
    objective: &O,
    opts: &RunOptions,
    initial: Option<&[Genotype]>,
) -> Result<RunResult, EvolutionError> {
    run(cfg, objective, opts, initial, None)
}

/// Surrogate-assisted GA: the model rates `M` offspring per iteration and only the best is evaluated.
pub fn run_saga<O: Objective + ?Sized>(
    cfg: &EvolutionConfig,
    objective: &O,
    kind: ModelKind,
    opts: &RunOptions,
    initial: Option<&[Genotype]>,
) -> Result<RunResult, EvolutionError> {
    run(cfg, objective, opts, initial, Some(kind))
}

fn build_pool(width: usize) -> Result<Option<ThreadPool>, EvolutionError> {
    if width <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(width)
        .build()
        .map(Some)
        .map_err(|e| EvolutionError::ThreadPool(e.to_string()))
}

fn run<O: Objective + ?Sized>(
    cfg: &EvolutionConfig,
    objective: &O,
    opts: &RunOptions,
    initial: Option<&[Genotype]>,
    kind: Option<ModelKind>,
) -> Result<RunResult, EvolutionError> {
    cfg.validate()?;
    let start = Instant::now();
    let seeds = RunSeeds::derive(opts.run_seed);
    let pool = build_pool(opts.parallel_replicates)?;
    let genotypes = match initial {
        Some(g) => {
            if g.len() != cfg.population_size {
                return Err(EvolutionError::Config(format!(
                    "initial population has {} members, expected {}",
                    g.len(),
                    cfg.population_size
                )));
            }
            if let Some(bad) = g.iter().find(|g| g.len() != cfg.dimension) {
                return Err(EvolutionError::Dimension { expected: cfg.dimension, got: bad.len() });
            }
            g.to_vec()
        }
        None => initial_population(cfg, opts.run_seed),
    };

    let mut archive = Archive::new();
    let mut best_trace = Vec::with_capacity(cfg.evaluation_budget);
    let mut population = Vec::with_capacity(cfg.population_size);
    let evaluate = |g: &Genotype, index: usize| {
        evaluate_candidate(objective, g, cfg.replicates, opts.run_seed, index, pool.as_ref())
    };
    let record = |ind: &Individual, archive: &mut Archive, trace: &mut Vec<(usize, f64)>| {
        let index = archive.len();
        archive.push(ArchiveRecord::new(ind.genotype.clone(), ind.samples.clone(), index));
        trace.push((index, archive.best_fitness().expect("non-empty archive")));
    };
    for g in &genotypes {
        let ind = evaluate(g, archive.len())?;
        record(&ind, &mut archive, &mut best_trace);
        population.push(ind);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seeds.variation);
    let mut warnings = Vec::new();
    let mut model_fits = Vec::new();
    while archive.len() < cfg.evaluation_budget {
        let index = archive.len();
        let p1 = tournament_select(&population, cfg.tournament_size, &mut rng, TournamentMode::Best)?;
        let p2 = tournament_select(&population, cfg.tournament_size, &mut rng, TournamentMode::Best)?;
        let (p1, p2) = (&population[p1].genotype, &population[p2].genotype);
        let child = match kind {
            None => make_offspring(p1, p2, cfg, &mut rng)?,
            Some(kind) => {
                let fit_start = Instant::now();
                let fit_seed = derive_seed(opts.run_seed, SeedStream::ModelFit, index as u64, 0);
                let mut fit_rng = ChaCha8Rng::seed_from_u64(fit_seed);
                let fitted = TrainingSet::from_archive(&archive)
                    .and_then(|data| Surrogate::fit(kind, &data, &opts.surrogate, &mut fit_rng));
                match fitted {
                    Ok(model) => {
                        model_fits.push(ModelFitRecord {
                            evaluation_index: index,
                            training_size: archive.len(),
                            seed: fit_seed,
                            summary: model.describe(),
                            seconds: fit_start.elapsed().as_secs_f64(),
                        });
                        let best = archive.best_fitness().expect("non-empty archive");
                        preselect(p1, p2, |g| rate_candidate(&model, g.values(), best), cfg, &mut rng)?
                    }
                    Err(e) => {
                        warnings.push(format!("evaluation {index}: {kind} fit failed ({e}); using a random offspring"));
                        Genotype::random(cfg.dimension, &mut rng)
                    }
                }
            }
        };
        let ind = evaluate(&child, index)?;
        record(&ind, &mut archive, &mut best_trace);
        let victim = tournament_select(&population, cfg.tournament_size, &mut rng, TournamentMode::Worst)?;
        population[victim] = ind;
    }

    Ok(RunResult {
        algorithm: match kind {
            None => Algorithm::Ga,
            Some(ModelKind::Gp) => Algorithm::SagaGp,
            Some(ModelKind::Mlp) => Algorithm::SagaMlp,
        },
        config: cfg.clone(),
        archive,
        best_trace,
        final_population: population,
        seeds,
        wall_time: start.elapsed().as_secs_f64(),
        warnings,
        model_fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{CountingObjective, FnObjective};

    fn sphere() -> impl Objective {
        FnObjective(|g: &Genotype, seed: u64| Ok(g.values().iter().map(|v| (v - 0.3).powi(2)).sum::<f64>() + (seed % 7) as f64 * 1e-3))
    }

    fn small_cfg(budget: usize) -> EvolutionConfig {
        EvolutionConfig {
            population_size: 8,
            replicates: 3,
            preselection_pool: 50,
            evaluation_budget: budget,
            ..EvolutionConfig::with_dimension(3)
        }
    }

    #[test]
    fn ga_bookkeeping() {
        let cfg = small_cfg(40);
        let obj = CountingObjective::new(sphere());
        let r = run_ga(&cfg, &obj, &RunOptions::new(3), None).unwrap();
        assert_eq!(r.archive.len(), 40);
        assert_eq!(obj.calls(), 120);
        assert_eq!(r.final_population.len(), 8);
        assert!(r.best_trace.windows(2).all(|w| w[1].1 <= w[0].1));
        for (i, rec) in r.archive.records().iter().enumerate() {
            assert_eq!(rec.evaluation_index, i);
            assert!(rec.genotype.values().iter().all(|v| (-1.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn budget_below_population_rejected() {
        let cfg = small_cfg(5);
        assert!(matches!(run_ga(&cfg, &sphere(), &RunOptions::new(1), None), Err(EvolutionError::Config(_))));
    }

    #[test]
    fn budget_equal_population_never_fits() {
        let cfg = small_cfg(8);
        let r = run_saga(&cfg, &sphere(), ModelKind::Gp, &RunOptions::new(4), None).unwrap();
        assert!(r.model_fits.is_empty());
        let pop = initial_population(&cfg, 4);
        for (rec, g) in r.archive.records().iter().zip(&pop) {
            assert_eq!(&rec.genotype, g);
        }
    }

    #[test]
    fn shared_prefix_across_algorithms() {
        let cfg = small_cfg(14);
        let opts = RunOptions::new(11);
        let pop = initial_population(&cfg, 11);
        let a = run_saga(&cfg, &sphere(), ModelKind::Gp, &opts, Some(&pop)).unwrap();
        let b = run_saga(&cfg, &sphere(), ModelKind::Mlp, &opts, Some(&pop)).unwrap();
        let c = run_ga(&cfg, &sphere(), &opts, None).unwrap();
        for i in 0..8 {
            assert_eq!(a.archive.records()[i], b.archive.records()[i]);
            assert_eq!(a.archive.records()[i], c.archive.records()[i]);
        }
        assert_eq!(a.model_fits.len(), 6);
        assert!(a.archive.records()[8..] != b.archive.records()[8..]);
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = small_cfg(16);
        let a = run_saga(&cfg, &sphere(), ModelKind::Mlp, &RunOptions::new(8), None).unwrap();
        let b = run_saga(&cfg, &sphere(), ModelKind::Mlp, &RunOptions::new(8), None).unwrap();
        assert_eq!(a.archive, b.archive);
        assert_eq!(a.final_population, b.final_population);
    }

    #[test]
    fn fit_failure_falls_back_to_random_offspring() {
        let cfg = small_cfg(10);
        let nan = FnObjective(|_: &Genotype, _| Ok(f64::NAN));
        let r = run_saga(&cfg, &nan, ModelKind::Gp, &RunOptions::new(2), None).unwrap();
        assert_eq!(r.archive.len(), 10);
        assert_eq!(r.warnings.len(), 2);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
        assert!("sa".parse::<Algorithm>().is_err());
    }
}
