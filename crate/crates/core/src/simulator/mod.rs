//! Desk-scale 2-D agent-based tumour therapy simulator: oxygen and chemoattractant transport,
//! tumour growth, worker/cargo delivery agents and drug-induced tumour death.

mod config;
mod dynamics;
mod field;
mod state;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{SimConfig, TherapyParams};
pub use dynamics::{cell_sources, step_biology, step_mechanics, step_microenvironment, step_motility_and_adhesion};
pub use field::{Boundary, Field, FieldSpec, Grid, Microenvironment, C1, C2, DRUG, OXYGEN};
pub use state::{hex_disc, init_state, inject_therapy, Cell, CellKind, SimState};

use crate::evolution::{Objective, ObjectiveError};
use crate::param_space::Genotype;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid simulator setting: {0}")]
    Parameter(String),
    #[error("field `{field}` became invalid ({value}) at diffusion step {step}")]
    Numeric { field: &'static str, step: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellCounts {
    pub tumour: usize,
    pub worker: usize,
    pub cargo: usize,
}

impl CellCounts {
    pub fn of(state: &SimState) -> Self {
        Self {
            tumour: state.count(CellKind::Tumour),
            worker: state.count(CellKind::Worker),
            cargo: state.count(CellKind::Cargo),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub cell_id: usize,
    pub kind: CellKind,
    pub position: [f64; 2],
    pub alive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub tumour_cell_count: usize,
    /// Alive cells of every kind at termination.
    pub total_cell_count: usize,
    /// `(time, counts)` after every biology step, starting at time 0.
    pub counts: Vec<(f64, CellCounts)>,
    pub snapshots: Vec<Snapshot>,
    pub seed: u64,
    pub wall_time: f64,
}

impl SimOutcome {
    /// Fitness to minimize under the given configuration.
    pub fn fitness(&self, cfg: &SimConfig) -> f64 {
        if cfg.count_all_cells {
            self.total_cell_count as f64
        } else {
            self.tumour_cell_count as f64
        }
    }
}

struct Runner<'a> {
    params: &'a TherapyParams,
    rng: ChaCha8Rng,
    diffusion_steps: usize,
    counts: Vec<(f64, CellCounts)>,
    snapshots: Vec<Snapshot>,
    next_snapshot: Option<f64>,
}

impl Runner<'_> {
    fn snapshot(&mut self, state: &SimState) {
        let Some(due) = self.next_snapshot else { return };
        if state.time + 1e-9 < due {
            return;
        }
        for c in &state.cells {
            self.snapshots.push(Snapshot { time: state.time, cell_id: c.id, kind: c.kind, position: c.position, alive: c.alive });
        }
        self.next_snapshot = state.config.snapshot_interval.map(|s| due + s);
    }

    fn advance(&mut self, state: &mut SimState, biology_steps: usize) -> Result<(), SimError> {
        let cfg = state.config.clone();
        let (mech_steps, diff_steps) = (cfg.mechanics_substeps(), cfg.diffusion_substeps());
        let dt_diff = cfg.dt_diffusion;
        for _ in 0..biology_steps {
            for _ in 0..mech_steps {
                step_microenvironment(state, dt_diff, diff_steps)?;
                self.diffusion_steps += diff_steps;
                state.micro.check(self.diffusion_steps)?;
                let motility = step_motility_and_adhesion(state, self.params, cfg.dt_mechanics, &mut self.rng);
                step_mechanics(state, self.params, &motility, cfg.dt_mechanics);
            }
            step_biology(state, cfg.dt_biology, &mut self.rng);
            state.time += cfg.dt_biology;
            self.counts.push((state.time, CellCounts::of(state)));
            self.snapshot(state);
        }
        Ok(())
    }
}

/// Grows the tumour, injects the therapy, treats, and reports the surviving cells.
pub fn run_simulation(cfg: &SimConfig, params: &TherapyParams, seed: u64) -> Result<SimOutcome, SimError> {
    let start = Instant::now();
    params.validate()?;
    let mut state = init_state(cfg)?;
    let mut runner = Runner {
        params,
        rng: ChaCha8Rng::seed_from_u64(seed),
        diffusion_steps: 0,
        counts: vec![(0.0, CellCounts::of(&state))],
        snapshots: Vec::new(),
        next_snapshot: cfg.snapshot_interval.map(|_| 0.0),
    };
    runner.snapshot(&state);
    runner.advance(&mut state, cfg.biology_steps(cfg.growth_duration))?;
    inject_therapy(&mut state, cfg.injected_cells, cfg.worker_fraction, params, &mut runner.rng);
    runner.advance(&mut state, cfg.biology_steps(cfg.treatment_duration))?;

    let final_counts = CellCounts::of(&state);
    Ok(SimOutcome {
        tumour_cell_count: final_counts.tumour,
        total_cell_count: final_counts.tumour + final_counts.worker + final_counts.cargo,
        counts: runner.counts,
        snapshots: runner.snapshots,
        seed,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// The simulator as an optimization objective over normalized therapy genotypes.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatorObjective {
    pub config: SimConfig,
}

impl SimulatorObjective {
    pub fn new(config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        Ok(Self { config })
    }
}

impl Objective for SimulatorObjective {
    fn evaluate(&self, genotype: &Genotype, replicate_seed: u64) -> Result<f64, ObjectiveError> {
        let params = TherapyParams::from_genotype(genotype)?;
        let outcome = run_simulation(&self.config, &params, replicate_seed)?;
        Ok(outcome.fitness(&self.config))
    }
}

/// Objective closure equivalent to [`SimulatorObjective`].
pub fn objective_adapter(cfg: SimConfig) -> impl Fn(&Genotype, u64) -> Result<f64, ObjectiveError> + Sync {
    move |g, seed| SimulatorObjective { config: cfg.clone() }.evaluate(g, seed)
}
