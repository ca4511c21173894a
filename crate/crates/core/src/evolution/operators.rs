//! Selection and variation operators on normalized genotypes.

use rand::seq::index;
use rand::Rng;

use super::{EvolutionConfig, EvolutionError, Individual};
use crate::param_space::Genotype;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TournamentMode {
    /// Lowest mean fitness wins (parent selection).
    Best,
    /// Highest mean fitness wins (replacement victim).
    Worst,
}

/// Draws `size` distinct individuals uniformly and returns the index of the winner.
/// Ties go to the lowest population index.
pub fn tournament_select<R: Rng + ?Sized>(
    population: &[Individual],
    size: usize,
    rng: &mut R,
    mode: TournamentMode,
) -> Result<usize, EvolutionError> {
    if size == 0 || size > population.len() {
        return Err(EvolutionError::Config(format!(
            "tournament size {size} invalid for population of {}",
            population.len()
        )));
    }
    let mut drawn = index::sample(rng, population.len(), size).into_vec();
    drawn.sort_unstable();
    let better = |a: f64, b: f64| match mode {
        TournamentMode::Best => a < b,
        TournamentMode::Worst => a > b,
    };
    let mut winner = drawn[0];
    for &i in &drawn[1..] {
        if better(population[i].mean_fitness, population[winner].mean_fitness) {
            winner = i;
        }
    }
    Ok(winner)
}

/// Child taking each allele from `p1` or `p2` with probability ½.
pub fn uniform_crossover<R: Rng + ?Sized>(p1: &Genotype, p2: &Genotype, rng: &mut R) -> Result<Genotype, EvolutionError> {
    if p1.len() != p2.len() {
        return Err(EvolutionError::Dimension { expected: p1.len(), got: p2.len() });
    }
    let values = p1
        .values()
        .iter()
        .zip(p2.values())
        .map(|(&a, &b)| if rng.random_bool(0.5) { b } else { a })
        .collect();
    Ok(Genotype::new(values))
}

/// Adds `step` to allele `i`, clamping to `[-1, 1]`.
pub fn perturb(g: &mut Genotype, i: usize, step: f64) {
    let v = g.values()[i] + step;
    g.set(i, v);
}

/// Perturbs each allele with probability `rate` by a uniform draw from `[-step, step]`.
pub fn mutate<R: Rng + ?Sized>(g: &Genotype, rate: f64, step: f64, rng: &mut R) -> Genotype {
    let mut child = g.clone();
    for i in 0..child.len() {
        if rng.random::<f64>() < rate {
            perturb(&mut child, i, rng.random_range(-step..=step));
        }
    }
    child
}

/// Clone of `p1`, crossed with `p2` with the configured probability, then mutated.
pub fn make_offspring<R: Rng + ?Sized>(
    p1: &Genotype,
    p2: &Genotype,
    cfg: &EvolutionConfig,
    rng: &mut R,
) -> Result<Genotype, EvolutionError> {
    let mut child = p1.clone();
    if rng.random::<f64>() < cfg.crossover_prob {
        child = uniform_crossover(&child, p2, rng)?;
    }
    Ok(mutate(&child, cfg.mutation_rate, cfg.mutation_step, rng))
}

/// Generates `cfg.preselection_pool` offspring, rates each, and returns the highest-utility one
/// (earliest on ties).
pub fn preselect<R: Rng + ?Sized>(
    p1: &Genotype,
    p2: &Genotype,
    mut rate: impl FnMut(&Genotype) -> f64,
    cfg: &EvolutionConfig,
    rng: &mut R,
) -> Result<Genotype, EvolutionError> {
    let mut best: Option<(f64, Genotype)> = None;
    for _ in 0..cfg.preselection_pool.max(1) {
        let child = make_offspring(p1, p2, cfg, rng)?;
        let utility = rate(&child);
        if best.as_ref().is_none_or(|(u, _)| utility > *u || (u.is_nan() && !utility.is_nan())) {
            best = Some((utility, child));
        }
    }
    Ok(best.expect("at least one offspring").1)
}
