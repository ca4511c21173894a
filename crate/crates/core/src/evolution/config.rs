use super::EvolutionError;

/// Steady-state GA settings; defaults follow the reference experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    /// Genotype length.
    pub dimension: usize,
    pub population_size: usize,
    pub tournament_size: usize,
    pub crossover_prob: f64,
    /// Per-allele mutation probability.
    pub mutation_rate: f64,
    /// Half-width of the uniform mutation step, in normalized units.
    pub mutation_step: f64,
    /// Objective replicates per candidate.
    pub replicates: usize,
    /// Offspring rated by the surrogate per iteration.
    pub preselection_pool: usize,
    /// Total candidate evaluations, including the initial population.
    pub evaluation_budget: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self::with_dimension(crate::param_space::THERAPY_DIM)
    }
}

impl EvolutionConfig {
    pub fn with_dimension(dimension: usize) -> Self {
        Self {
            dimension,
            population_size: 20,
            tournament_size: 3,
            crossover_prob: 0.8,
            mutation_rate: 1.0 / dimension.max(1) as f64,
            mutation_step: 0.1,
            replicates: 10,
            preselection_pool: 1000,
            evaluation_budget: 200,
        }
    }

    pub fn validate(&self) -> Result<(), EvolutionError> {
        let fail = |m: String| Err(EvolutionError::Config(m));
        if self.dimension == 0 {
            return fail("dimension must be positive".into());
        }
        for (name, v) in [
            ("population_size", self.population_size),
            ("tournament_size", self.tournament_size),
            ("replicates", self.replicates),
            ("preselection_pool", self.preselection_pool),
            ("evaluation_budget", self.evaluation_budget),
        ] {
            if v == 0 {
                return fail(format!("{name} must be positive"));
            }
        }
        if self.tournament_size > self.population_size {
            return fail(format!(
                "tournament_size {} exceeds population_size {}",
                self.tournament_size, self.population_size
            ));
        }
        for (name, p) in [("crossover_prob", self.crossover_prob), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if !(self.mutation_step > 0.0) {
            return fail(format!("mutation_step must be positive, got {}", self.mutation_step));
        }
        if self.evaluation_budget < self.population_size {
            return fail(format!(
                "evaluation_budget {} is smaller than population_size {}",
                self.evaluation_budget, self.population_size
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = EvolutionConfig::default();
        assert_eq!(
            (c.dimension, c.population_size, c.replicates, c.preselection_pool, c.tournament_size),
            (6, 20, 10, 1000, 3)
        );
        assert_eq!(c.crossover_prob, 0.8);
        assert_eq!(c.mutation_rate, 1.0 / 6.0);
        assert_eq!(c.mutation_step, 0.1);
        assert_eq!(c.evaluation_budget, 200);
        c.validate().unwrap();
    }

    #[test]
    fn invalid() {
        let c = EvolutionConfig { tournament_size: 25, ..Default::default() };
        assert!(c.validate().is_err());
        let c = EvolutionConfig { evaluation_budget: 10, ..Default::default() };
        assert!(c.validate().is_err());
        let c = EvolutionConfig { crossover_prob: 1.5, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
