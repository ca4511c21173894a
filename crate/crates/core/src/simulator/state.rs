use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::field::{Boundary, Field, FieldSpec, Grid, Microenvironment};
use super::{SimConfig, SimError, TherapyParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Tumour,
    Worker,
    Cargo,
}

impl CellKind {
    pub fn name(self) -> &'static str {
        match self {
            CellKind::Tumour => "tumour",
            CellKind::Worker => "worker",
            CellKind::Cargo => "cargo",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub id: usize,
    pub kind: CellKind,
    pub position: [f64; 2],
    pub radius: f64,
    pub motility_direction: [f64; 2],
    pub time_to_repolarize: f64,
    /// Index of the worker/cargo partner in [`SimState::cells`].
    pub attached_to: Option<usize>,
    pub damage: f64,
    pub releasing_drug: bool,
    pub alive: bool,
    /// Continuous time spent below the hypoxic death threshold, minutes.
    pub hypoxic_time: f64,
}

impl Cell {
    pub fn new(id: usize, kind: CellKind, position: [f64; 2], radius: f64) -> Self {
        Self {
            id,
            kind,
            position,
            radius,
            motility_direction: [0.0, 0.0],
            time_to_repolarize: 0.0,
            attached_to: None,
            damage: 0.0,
            releasing_drug: false,
            alive: true,
            hypoxic_time: 0.0,
        }
    }
}

/// Mutable world: substrate fields, agents and the simulated clock.
#[derive(Debug, Clone)]
pub struct SimState {
    pub config: SimConfig,
    pub micro: Microenvironment,
    pub cells: Vec<Cell>,
    pub time: f64,
}

impl SimState {
    pub fn grid(&self) -> &Grid {
        &self.micro.grid
    }

    pub fn count(&self, kind: CellKind) -> usize {
        self.cells.iter().filter(|c| c.alive && c.kind == kind).count()
    }

    pub fn push_cell(&mut self, kind: CellKind, position: [f64; 2]) -> usize {
        let id = self.cells.len();
        let p = self.clamp(position);
        self.cells.push(Cell::new(id, kind, p, self.config.cell_radius));
        id
    }

    pub fn clamp(&self, p: [f64; 2]) -> [f64; 2] {
        let h = self.config.domain_half_width;
        [p[0].clamp(-h, h), p[1].clamp(-h, h)]
    }

    /// Local field value at a cell's voxel.
    pub fn sample(&self, field: usize, position: [f64; 2]) -> f64 {
        self.micro.fields[field].values[self.micro.grid.voxel_of(position)]
    }

    pub fn detach(&mut self, i: usize) {
        if let Some(j) = self.cells[i].attached_to.take() {
            self.cells[j].attached_to = None;
        }
    }

    pub fn attach(&mut self, i: usize, j: usize) {
        self.cells[i].attached_to = Some(j);
        self.cells[j].attached_to = Some(i);
    }
}

/// Points of the hexagonal lattice with spacing `spacing` (one point at the origin) inside the
/// closed disc of radius `radius`.
pub fn hex_disc(radius: f64, spacing: f64) -> Vec<[f64; 2]> {
    let row_h = spacing * 3f64.sqrt() / 2.0;
    let rows = (radius / row_h).floor() as i64;
    let cols = (radius / spacing).ceil() as i64 + 1;
    let tol = 1e-9 * radius.max(1.0);
    let mut pts = Vec::new();
    for j in -rows..=rows {
        let y = j as f64 * row_h;
        let shift = if j.rem_euclid(2) == 1 { spacing / 2.0 } else { 0.0 };
        for i in -cols..=cols {
            let x = i as f64 * spacing + shift;
            if x * x + y * y <= radius * radius + tol {
                pts.push([x, y]);
            }
        }
    }
    pts
}

pub(crate) fn build_microenvironment(cfg: &SimConfig) -> Result<Microenvironment, SimError> {
    let grid = Grid::new(cfg.domain_half_width, cfg.dx);
    let chem = |name| FieldSpec { name, diffusion: cfg.chemical_diffusion, decay: cfg.chemical_decay, boundary: Boundary::Neumann };
    let oxygen = FieldSpec {
        name: "oxygen",
        diffusion: cfg.oxygen_diffusion,
        decay: cfg.oxygen_decay,
        boundary: Boundary::Dirichlet(cfg.oxygen_far_field),
    };
    let fields = vec![
        Field::new(oxygen, &grid, cfg.oxygen_far_field, cfg.dt_diffusion)?,
        Field::new(chem("c1"), &grid, 0.0, cfg.dt_diffusion)?,
        Field::new(chem("c2"), &grid, 0.0, cfg.dt_diffusion)?,
        Field::new(chem("drug"), &grid, 0.0, cfg.dt_diffusion)?,
    ];
    Ok(Microenvironment::new(grid, fields))
}

/// Hex-packed tumour disc centred at the origin, oxygen at its far-field value, other fields zero.
pub fn init_state(cfg: &SimConfig) -> Result<SimState, SimError> {
    cfg.validate()?;
    let micro = build_microenvironment(cfg)?;
    let mut state = SimState { config: cfg.clone(), micro, cells: Vec::new(), time: 0.0 };
    let spacing = 2.0 * cfg.cell_radius * cfg.packing_factor;
    for p in hex_disc(cfg.tumour_radius, spacing) {
        state.push_cell(CellKind::Tumour, p);
    }
    Ok(state)
}

pub(crate) fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> [f64; 2] {
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    [theta.cos(), theta.sin()]
}

/// Time until the next repolarization: exponential with the given mean (zero mean repolarizes
/// every step).
pub(crate) fn repolarization_clock<R: Rng + ?Sized>(persistence: f64, rng: &mut R) -> f64 {
    if persistence > 0.0 {
        Exp::new(1.0 / persistence).expect("positive rate").sample(rng)
    } else {
        0.0
    }
}

/// Adds `round(n·worker_fraction)` workers and the remaining cargo cells uniformly in the annulus
/// around the tumour.
pub fn inject_therapy<R: Rng + ?Sized>(
    state: &mut SimState,
    n: usize,
    worker_fraction: f64,
    params: &TherapyParams,
    rng: &mut R,
) {
    let workers = ((n as f64) * worker_fraction.clamp(0.0, 1.0)).round() as usize;
    let r_in = state.config.tumour_radius + state.config.injection_inner_gap;
    let r_out = state.config.tumour_radius + state.config.injection_outer_gap;
    for k in 0..n {
        let r = (r_in * r_in + rng.random::<f64>() * (r_out * r_out - r_in * r_in)).sqrt();
        let u = random_unit(rng);
        let kind = if k < workers { CellKind::Worker } else { CellKind::Cargo };
        let idx = state.push_cell(kind, [r * u[0], r * u[1]]);
        if kind == CellKind::Worker {
            let cell = &mut state.cells[idx];
            cell.motility_direction = random_unit(rng);
            cell.time_to_repolarize = repolarization_clock(params.persistence_time, rng);
        }
    }
}

/// Alive-cell indices bucketed by grid voxel.
pub(crate) struct Bins {
    pub n: usize,
    pub bins: Vec<Vec<usize>>,
}

impl Bins {
    pub fn build(state: &SimState) -> Self {
        let grid = state.grid();
        let mut bins = vec![Vec::new(); grid.len()];
        for (i, c) in state.cells.iter().enumerate() {
            if c.alive {
                bins[grid.voxel_of(c.position)].push(i);
            }
        }
        Self { n: grid.n, bins }
    }

    /// Alive cells in the 3×3 voxel block around `(col, row)`, expanded by `reach` voxels.
    pub fn around(&self, (col, row): (usize, usize), reach: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.n;
        let (c0, c1) = (col.saturating_sub(reach), (col + reach).min(n - 1));
        let (r0, r1) = (row.saturating_sub(reach), (row + reach).min(n - 1));
        (r0..=r1).flat_map(move |r| (c0..=c1).flat_map(move |c| self.bins[r * n + c].iter().copied()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tiny_disc_has_one_cell() {
        let cfg = SimConfig { tumour_radius: 10.0, ..Default::default() };
        let s = init_state(&cfg).unwrap();
        assert_eq!(s.cells.len(), 1);
        assert_eq!(s.cells[0].position, [0.0, 0.0]);
    }

    #[test]
    fn cells_inside_disc() {
        let s = init_state(&SimConfig::default()).unwrap();
        assert!(s.cells.len() > 30);
        assert!(s.cells.iter().all(|c| c.position[0].hypot(c.position[1]) <= 50.0 + 1e-9));
    }

    #[test]
    fn oversized_tumour_rejected() {
        assert!(init_state(&SimConfig { tumour_radius: 301.0, ..Default::default() }).is_err());
    }

    #[test]
    fn injection_counts_and_annulus() {
        let mut s = init_state(&SimConfig::default()).unwrap();
        let before = s.cells.len();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        inject_therapy(&mut s, 100, 0.1, &TherapyParams::default(), &mut rng);
        assert_eq!(s.count(CellKind::Worker), 10);
        assert_eq!(s.count(CellKind::Cargo), 90);
        for c in &s.cells[before..] {
            let r = c.position[0].hypot(c.position[1]);
            assert!((70.0 - 1e-9..=150.0 + 1e-9).contains(&r));
        }
        let mut t = init_state(&SimConfig::default()).unwrap();
        inject_therapy(&mut t, 0, 0.1, &TherapyParams::default(), &mut rng);
        assert_eq!(t.cells.len(), before);
    }

    #[test]
    fn injection_of_five_hundred() {
        let mut s = init_state(&SimConfig::default()).unwrap();
        inject_therapy(&mut s, 500, 0.1, &TherapyParams::default(), &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!((s.count(CellKind::Worker), s.count(CellKind::Cargo)), (50, 450));
    }
}
