//! Per-step cell updates: substrate exchange, mechanics, worker behaviour and biology.

use rand::Rng;

use super::field::{C1, C2, DRUG, OXYGEN};
use super::state::{random_unit, repolarization_clock, Bins, CellKind, SimState};
use super::{SimError, TherapyParams};

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn normalized(v: [f64; 2]) -> Option<[f64; 2]> {
    let n = norm(v);
    (n > 0.0 && n.is_finite()).then(|| [v[0] / n, v[1] / n])
}

/// Per-voxel `(num, den)` source arrays for every field from the current cells.
pub fn cell_sources(state: &SimState) -> Vec<(Vec<f64>, Vec<f64>)> {
    let cfg = &state.config;
    let grid = state.grid();
    let len = grid.len();
    let mut out: Vec<(Vec<f64>, Vec<f64>)> = (0..state.micro.fields.len()).map(|_| (vec![0.0; len], vec![0.0; len])).collect();
    let target = cfg.secretion_target;
    for c in state.cells.iter().filter(|c| c.alive) {
        let v = grid.voxel_of(c.position);
        let w = std::f64::consts::PI * c.radius * c.radius / (grid.dx * grid.dx);
        let mut add = |field: usize, secretion: f64, uptake: f64| {
            out[field].0[v] += w * secretion * target;
            out[field].1[v] += w * (secretion + uptake);
        };
        match c.kind {
            CellKind::Tumour => {
                add(OXYGEN, 0.0, cfg.tumour_o2_uptake);
                add(C1, cfg.tumour_c1_secretion, 0.0);
            }
            CellKind::Worker => add(OXYGEN, 0.0, cfg.worker_o2_uptake),
            CellKind::Cargo => {
                add(OXYGEN, 0.0, cfg.cargo_o2_uptake);
                if c.releasing_drug {
                    add(DRUG, cfg.cargo_drug_secretion, 0.0);
                } else if c.attached_to.is_none() {
                    add(C2, cfg.cargo_c2_secretion, 0.0);
                }
            }
        }
    }
    out
}

/// Advances the fields by `substeps` diffusion steps with the sources of the current cells.
pub fn step_microenvironment(state: &mut SimState, dt: f64, substeps: usize) -> Result<(), SimError> {
    let sources = cell_sources(state);
    for _ in 0..substeps {
        state.micro.step(&sources, dt)?;
    }
    Ok(())
}

fn relative_adhesion(state: &SimState, kind: CellKind, params: &TherapyParams) -> f64 {
    match kind {
        CellKind::Tumour => state.config.tumour_relative_adhesion,
        CellKind::Worker => params.worker_adhesion,
        CellKind::Cargo => state.config.cargo_relative_adhesion,
    }
}

fn relative_repulsion(state: &SimState, kind: CellKind, params: &TherapyParams) -> f64 {
    match kind {
        CellKind::Tumour => state.config.tumour_relative_repulsion,
        CellKind::Worker => params.worker_repulsion,
        CellKind::Cargo => state.config.cargo_relative_repulsion,
    }
}

/// Overdamped forward-Euler update from pairwise repulsion/adhesion, worker–cargo springs and
/// the given per-cell active velocities.
pub fn step_mechanics(state: &mut SimState, params: &TherapyParams, motility: &[[f64; 2]], dt: f64) {
    let cfg = state.config.clone();
    let n = state.cells.len();
    let mut velocity = vec![[0.0; 2]; n];
    let bins = Bins::build(state);
    let reach_dist = 2.0 * cfg.cell_radius * cfg.max_relative_adhesion_distance.max(1.0);
    let reach = (reach_dist / state.grid().dx).ceil() as usize;

    for i in 0..n {
        let ci = &state.cells[i];
        if !ci.alive {
            continue;
        }
        let (rep_i, adh_i) = (relative_repulsion(state, ci.kind, params), relative_adhesion(state, ci.kind, params));
        for j in bins.around(state.grid().cell_of(ci.position), reach) {
            if j <= i {
                continue;
            }
            let cj = &state.cells[j];
            let delta = [ci.position[0] - cj.position[0], ci.position[1] - cj.position[1]];
            let d = norm(delta);
            let contact = ci.radius + cj.radius;
            let adhesion_range = cfg.max_relative_adhesion_distance * contact;
            if d >= contact.max(adhesion_range) {
                continue;
            }
            let u = if d > 0.0 { [delta[0] / d, delta[1] / d] } else { [1.0, 0.0] };
            let mut f = 0.0;
            if d < contact {
                let rep = rep_i * relative_repulsion(state, cj.kind, params);
                f += cfg.repulsion_strength * rep.sqrt() * (1.0 - d / contact).powi(2);
            }
            if d < adhesion_range {
                let adh = adh_i * relative_adhesion(state, cj.kind, params);
                f -= cfg.adhesion_strength * adh.sqrt() * (1.0 - d / adhesion_range).powi(2);
            }
            for k in 0..2 {
                velocity[i][k] += f * u[k];
                velocity[j][k] -= f * u[k];
            }
        }
    }

    // worker–cargo springs toward the rest length
    for i in 0..n {
        let ci = &state.cells[i];
        let Some(j) = ci.attached_to.filter(|_| ci.alive) else {
            continue;
        };
        let cj = &state.cells[j];
        let delta = [cj.position[0] - ci.position[0], cj.position[1] - ci.position[1]];
        let d = norm(delta);
        if d == 0.0 {
            continue;
        }
        let mut speed = cfg.elastic_coefficient * (d - cfg.min_attach_distance);
        let cap = cfg.max_elastic_displacement / dt;
        speed = speed.clamp(-cap, cap);
        velocity[i][0] += speed * delta[0] / d;
        velocity[i][1] += speed * delta[1] / d;
    }

    for (i, c) in state.cells.iter_mut().enumerate() {
        if !c.alive {
            continue;
        }
        let m = motility.get(i).copied().unwrap_or([0.0; 2]);
        let h = cfg.domain_half_width;
        for k in 0..2 {
            c.position[k] = (c.position[k] + dt * (velocity[i][k] + m[k])).clamp(-h, h);
        }
    }
}

/// Worker repolarization and active velocities, cargo release, then worker–cargo attachment.
/// Returns the active velocity of every cell (zero for non-workers).
pub fn step_motility_and_adhesion<R: Rng + ?Sized>(
    state: &mut SimState,
    params: &TherapyParams,
    dt: f64,
    rng: &mut R,
) -> Vec<[f64; 2]> {
    let cfg = state.config.clone();
    let grid = *state.grid();

    // release: attached cargo in low oxygen detaches and starts secreting the drug
    for i in 0..state.cells.len() {
        let c = &state.cells[i];
        if c.alive
            && c.kind == CellKind::Cargo
            && c.attached_to.is_some()
            && state.sample(OXYGEN, c.position) < params.cargo_release_o2_threshold
        {
            state.detach(i);
            state.cells[i].releasing_drug = true;
        }
    }

    // attachment: each free worker takes the nearest eligible free cargo
    let bins = Bins::build(state);
    let reach = (cfg.max_attach_distance / grid.dx).ceil() as usize;
    for i in 0..state.cells.len() {
        let w = &state.cells[i];
        if !w.alive || w.kind != CellKind::Worker || w.attached_to.is_some() {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for j in bins.around(grid.cell_of(w.position), reach) {
            let c = &state.cells[j];
            if c.kind != CellKind::Cargo || c.attached_to.is_some() || c.releasing_drug || !c.alive {
                continue;
            }
            let d = norm([c.position[0] - w.position[0], c.position[1] - w.position[1]]);
            if d > cfg.max_attach_distance || state.sample(C2, c.position) < cfg.attachment_receptor_threshold {
                continue;
            }
            if best.is_none_or(|(bd, bj)| d < bd || (d == bd && j < bj)) {
                best = Some((d, j));
            }
        }
        if let Some((_, j)) = best {
            state.attach(i, j);
        }
    }

    let mut motility = vec![[0.0; 2]; state.cells.len()];
    for i in 0..state.cells.len() {
        let c = &state.cells[i];
        if !c.alive || c.kind != CellKind::Worker {
            continue;
        }
        let attached = c.attached_to.is_some();
        let voxel = grid.voxel_of(c.position);
        let mut clock = c.time_to_repolarize - dt;
        let mut direction = c.motility_direction;
        if clock <= 0.0 {
            let (field, bias) = if attached { (C1, params.attached_bias) } else { (C2, params.unattached_bias) };
            let g = normalized(state.micro.fields[field].gradient(&grid, voxel)).unwrap_or([0.0; 2]);
            let u = random_unit(rng);
            let blend = [bias * g[0] + (1.0 - bias) * u[0], bias * g[1] + (1.0 - bias) * u[1]];
            direction = normalized(blend).unwrap_or(u);
            clock = repolarization_clock(params.persistence_time, rng);
        }
        let cell = &mut state.cells[i];
        cell.time_to_repolarize = clock;
        cell.motility_direction = direction;
        let shut_down = !attached && state.micro.fields[C1].values[voxel] < cfg.motility_shutdown_threshold;
        if !shut_down {
            motility[i] = [cfg.worker_migration_speed * direction[0], cfg.worker_migration_speed * direction[1]];
        }
    }
    motility
}

fn hazard<R: Rng + ?Sized>(rate: f64, dt: f64, rng: &mut R) -> bool {
    rate > 0.0 && rng.random::<f64>() < 1.0 - (-dt * rate).exp()
}

/// Damage, drug and hypoxic death and oxygen-limited division of tumour cells; cargo apoptosis.
pub fn step_biology<R: Rng + ?Sized>(state: &mut SimState, dt: f64, rng: &mut R) {
    let cfg = state.config.clone();
    let n = state.cells.len();
    for i in 0..n {
        let c = &state.cells[i];
        if !c.alive {
            continue;
        }
        match c.kind {
            CellKind::Tumour => {
                let drug = state.sample(DRUG, c.position);
                let o2 = state.sample(OXYGEN, c.position);
                let cell = &mut state.cells[i];
                cell.damage = (cell.damage + dt * cfg.damage_rate * drug) / (1.0 + dt * cfg.repair_rate);
                cell.hypoxic_time = if o2 < cfg.hypoxic_death_threshold { cell.hypoxic_time + dt } else { 0.0 };
                if hazard(cfg.drug_death_rate * cell.damage, dt, rng) || cell.hypoxic_time > cfg.hypoxic_death_window {
                    cell.alive = false;
                    continue;
                }
                let span = cfg.oxygen_far_field - cfg.proliferation_threshold;
                let drive = if span > 0.0 { ((o2 - cfg.proliferation_threshold) / span).max(0.0) } else { 0.0 };
                if hazard(cfg.base_division_rate * drive, dt, rng) {
                    let u = random_unit(rng);
                    let p = state.cells[i].position;
                    let r = state.cells[i].radius;
                    state.push_cell(CellKind::Tumour, [p[0] + r * u[0], p[1] + r * u[1]]);
                }
            }
            CellKind::Cargo => {
                if hazard(cfg.cargo_apoptosis_rate, dt, rng) {
                    state.detach(i);
                    state.cells[i].alive = false;
                }
            }
            CellKind::Worker => {
                if hazard(cfg.worker_apoptosis_rate, dt, rng) {
                    state.detach(i);
                    state.cells[i].alive = false;
                }
            }
        }
    }
}
