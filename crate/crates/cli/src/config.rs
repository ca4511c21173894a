use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use saga_core::evolution::{Algorithm, EvolutionConfig};
use saga_core::param_space::THERAPY_DIM;
use saga_core::simulator::SimConfig;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Simulator,
    Synthetic,
}

impl ObjectiveKind {
    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::Simulator => "simulator",
            ObjectiveKind::Synthetic => "synthetic",
        }
    }

    fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "simulator" => Ok(ObjectiveKind::Simulator),
            "synthetic" => Ok(ObjectiveKind::Synthetic),
            _ => Err(invalid("objective", format!("expected `simulator` or `synthetic`, got `{s}`"))),
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub evolution: EvolutionConfig,
    pub simulator: SimConfig,
    pub objective: ObjectiveKind,
    /// Noise SD of the synthetic objective as a fraction of its range.
    pub noise_fraction: f64,
    pub run_seed: u64,
    pub output_dir: PathBuf,
    pub parallel_replicates: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvolutionFile {
    population_size: Option<usize>,
    tournament_size: Option<usize>,
    crossover_prob: Option<f64>,
    mutation_rate: Option<f64>,
    mutation_step: Option<f64>,
    replicates: Option<usize>,
    preselection_pool: Option<usize>,
    evaluation_budget: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    algorithm: Option<String>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    parallel: Option<usize>,
    objective: Option<String>,
    noise_fraction: Option<f64>,
    #[serde(default)]
    evolution: EvolutionFile,
    #[serde(default)]
    simulator: BTreeMap<String, toml::Value>,
}

/// Command-line values; each one set here wins over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub algorithm: Option<String>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub replicates: Option<usize>,
    pub population: Option<usize>,
    pub pool: Option<usize>,
    pub output: Option<PathBuf>,
    pub parallel: Option<usize>,
    pub objective: Option<String>,
    /// Parent directory for runs without an explicit output path.
    pub output_root: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, ConfigError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|source| ConfigError::Io { path: p.to_path_buf(), source })?,
            None => String::new(),
        };
        Self::from_toml(&text, overrides)
    }

    pub fn from_toml(text: &str, overrides: &Overrides) -> Result<Self, ConfigError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;

        let algorithm_name = overrides.algorithm.clone().or(file.algorithm).unwrap_or_else(|| "ga".into());
        let algorithm: Algorithm = algorithm_name.parse().map_err(|e: String| invalid("algorithm", e))?;

        let mut evolution = EvolutionConfig::with_dimension(THERAPY_DIM);
        let e = file.evolution;
        let set = |slot: &mut usize, v: Option<usize>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut evolution.population_size, overrides.population.or(e.population_size));
        set(&mut evolution.tournament_size, e.tournament_size);
        set(&mut evolution.replicates, overrides.replicates.or(e.replicates));
        set(&mut evolution.preselection_pool, overrides.pool.or(e.preselection_pool));
        set(&mut evolution.evaluation_budget, overrides.budget.or(e.evaluation_budget));
        evolution.crossover_prob = e.crossover_prob.unwrap_or(evolution.crossover_prob);
        evolution.mutation_rate = e.mutation_rate.unwrap_or(evolution.mutation_rate);
        evolution.mutation_step = e.mutation_step.unwrap_or(evolution.mutation_step);
        evolution.validate().map_err(|err| invalid("evolution", err.to_string()))?;

        let mut simulator = SimConfig::default();
        for (key, value) in &file.simulator {
            let v = match value {
                toml::Value::Integer(i) => *i as f64,
                toml::Value::Float(f) => *f,
                toml::Value::Boolean(b) => f64::from(u8::from(*b)),
                other => return Err(invalid(&format!("simulator.{key}"), format!("expected a number, got {other}"))),
            };
            simulator.set(key, v).map_err(|err| invalid(&format!("simulator.{key}"), err.to_string()))?;
        }
        simulator.validate().map_err(|err| invalid("simulator", err.to_string()))?;

        let objective = ObjectiveKind::parse(overrides.objective.as_deref().or(file.objective.as_deref()).unwrap_or("simulator"))?;
        let noise_fraction = file.noise_fraction.unwrap_or(0.05);
        if !(noise_fraction >= 0.0 && noise_fraction.is_finite()) {
            return Err(invalid("noise_fraction", format!("must be finite and non-negative, got {noise_fraction}")));
        }
        let parallel_replicates = overrides.parallel.or(file.parallel).unwrap_or(1);
        if parallel_replicates == 0 {
            return Err(invalid("parallel", "must be at least 1"));
        }
        let run_seed = overrides.seed.or(file.seed).unwrap_or(0);
        let output_dir = overrides.output.clone().or(file.output).unwrap_or_else(|| {
            let root = overrides.output_root.clone().unwrap_or_else(|| PathBuf::from("runs"));
            root.join(format!("{algorithm}-seed{run_seed}"))
        });

        Ok(Self { algorithm, evolution, simulator, objective, noise_fraction, run_seed, output_dir, parallel_replicates })
    }

    /// Every setting, defaults included, as `key = value` lines.
    pub fn echo(&self) -> String {
        let e = &self.evolution;
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        line("algorithm", self.algorithm.to_string());
        line("objective", self.objective.name().into());
        line("noise_fraction", self.noise_fraction.to_string());
        line("run_seed", self.run_seed.to_string());
        line("parallel_replicates", self.parallel_replicates.to_string());
        line("evolution.dimension", e.dimension.to_string());
        line("evolution.population_size", e.population_size.to_string());
        line("evolution.tournament_size", e.tournament_size.to_string());
        line("evolution.crossover_prob", e.crossover_prob.to_string());
        line("evolution.mutation_rate", e.mutation_rate.to_string());
        line("evolution.mutation_step", e.mutation_step.to_string());
        line("evolution.replicates", e.replicates.to_string());
        line("evolution.preselection_pool", e.preselection_pool.to_string());
        line("evolution.evaluation_budget", e.evaluation_budget.to_string());
        for (k, v) in self.simulator.entries() {
            line(&format!("simulator.{k}"), v.to_string());
        }
        if let Some(s) = self.simulator.snapshot_interval {
            line("simulator.snapshot_interval", s.to_string());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let c = ExperimentConfig::from_toml("", &Overrides::default()).unwrap();
        assert_eq!(c.evolution, EvolutionConfig::default());
        assert_eq!((c.evolution.population_size, c.evolution.replicates, c.evolution.preselection_pool), (20, 10, 1000));
        assert_eq!((c.evolution.crossover_prob, c.evolution.tournament_size), (0.8, 3));
        assert_eq!(c.algorithm, Algorithm::Ga);
        assert_eq!(c.output_dir, PathBuf::from("runs/ga-seed0"));
    }

    #[test]
    fn flags_beat_file() {
        let text = "seed = 4\n[evolution]\nreplicates = 7\n";
        let o = Overrides { replicates: Some(3), ..Default::default() };
        let c = ExperimentConfig::from_toml(text, &o).unwrap();
        assert_eq!(c.evolution.replicates, 3);
        assert_eq!(c.run_seed, 4);
        assert!(c.echo().contains("evolution.replicates = 3\n"));
    }

    #[test]
    fn errors_name_the_key() {
        let err = ExperimentConfig::from_toml("[evolution]\ntournament_size = 25\n", &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("tournament_size"), "{err}");
        let err = ExperimentConfig::from_toml("bogus = 1\n", &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err = ExperimentConfig::from_toml("[simulator]\ndxx = 1\n", &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("simulator.dxx"), "{err}");
    }

    #[test]
    fn simulator_overrides_apply() {
        let c = ExperimentConfig::from_toml("[simulator]\ndx = 10\ncount_all_cells = true\n", &Overrides::default()).unwrap();
        assert_eq!(c.simulator.dx, 10.0);
        assert!(c.simulator.count_all_cells);
    }
}
