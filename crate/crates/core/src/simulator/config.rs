use super::SimError;
use crate::param_space::{Genotype, ParameterSpace};

/// Fixed simulator constants. The first block mirrors the reference scenario's default table;
/// the rest are desk-scale controls and model constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub max_attach_distance: f64,
    pub min_attach_distance: f64,
    pub worker_apoptosis_rate: f64,
    pub worker_migration_speed: f64,
    pub worker_o2_uptake: f64,
    pub cargo_o2_uptake: f64,
    pub cargo_apoptosis_rate: f64,
    pub cargo_relative_adhesion: f64,
    pub cargo_relative_repulsion: f64,
    pub damage_rate: f64,
    pub repair_rate: f64,
    pub drug_death_rate: f64,
    pub max_relative_adhesion_distance: f64,
    pub elastic_coefficient: f64,
    pub max_elastic_displacement: f64,
    pub motility_shutdown_threshold: f64,
    pub attachment_receptor_threshold: f64,

    /// Half the side length of the square domain, microns.
    pub domain_half_width: f64,
    pub dx: f64,
    pub dt_diffusion: f64,
    pub dt_mechanics: f64,
    pub dt_biology: f64,
    pub growth_duration: f64,
    pub treatment_duration: f64,
    pub tumour_radius: f64,
    pub injected_cells: usize,
    pub worker_fraction: f64,
    pub cell_radius: f64,
    /// Hex lattice spacing as a multiple of the cell diameter.
    pub packing_factor: f64,
    /// Injection annulus, measured outward from the tumour radius.
    pub injection_inner_gap: f64,
    pub injection_outer_gap: f64,

    pub oxygen_far_field: f64,
    pub oxygen_diffusion: f64,
    pub oxygen_decay: f64,
    pub chemical_diffusion: f64,
    pub chemical_decay: f64,
    pub tumour_o2_uptake: f64,
    pub tumour_c1_secretion: f64,
    pub cargo_c2_secretion: f64,
    pub cargo_drug_secretion: f64,
    /// Saturation density every secreted substance approaches.
    pub secretion_target: f64,

    pub repulsion_strength: f64,
    pub adhesion_strength: f64,
    pub tumour_relative_adhesion: f64,
    pub tumour_relative_repulsion: f64,

    pub hypoxic_death_threshold: f64,
    pub hypoxic_death_window: f64,
    pub proliferation_threshold: f64,
    pub base_division_rate: f64,

    /// Count every alive cell in the fitness instead of tumour cells only.
    pub count_all_cells: bool,
    /// Interval between cell snapshots in minutes; `None` disables them.
    pub snapshot_interval: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            max_attach_distance: 18.0,
            min_attach_distance: 14.0,
            worker_apoptosis_rate: 0.0,
            worker_migration_speed: 2.0,
            worker_o2_uptake: 0.1,
            cargo_o2_uptake: 0.1,
            cargo_apoptosis_rate: 4.065e-5,
            cargo_relative_adhesion: 0.0,
            cargo_relative_repulsion: 5.0,
            damage_rate: 0.03333,
            repair_rate: 0.004167,
            drug_death_rate: 0.004167,
            max_relative_adhesion_distance: 1.25,
            elastic_coefficient: 0.05,
            max_elastic_displacement: 50.0,
            motility_shutdown_threshold: 0.001,
            attachment_receptor_threshold: 0.1,

            domain_half_width: 300.0,
            dx: 20.0,
            dt_diffusion: 0.01,
            dt_mechanics: 0.1,
            dt_biology: 6.0,
            growth_duration: 720.0,
            treatment_duration: 360.0,
            tumour_radius: 50.0,
            injected_cells: 100,
            worker_fraction: 0.1,
            cell_radius: 8.0,
            packing_factor: 0.95,
            injection_inner_gap: 20.0,
            injection_outer_gap: 100.0,

            oxygen_far_field: 38.0,
            oxygen_diffusion: 6000.0,
            oxygen_decay: 0.1,
            chemical_diffusion: 1000.0,
            chemical_decay: 0.01,
            tumour_o2_uptake: 5.0,
            tumour_c1_secretion: 1.0,
            cargo_c2_secretion: 1.0,
            cargo_drug_secretion: 0.3,
            secretion_target: 1.0,

            repulsion_strength: 10.0,
            adhesion_strength: 0.4,
            tumour_relative_adhesion: 1.0,
            tumour_relative_repulsion: 1.0,

            hypoxic_death_threshold: 5.0,
            hypoxic_death_window: 60.0,
            proliferation_threshold: 8.0,
            base_division_rate: 0.00072,

            count_all_cells: false,
            snapshot_interval: None,
        }
    }
}

fn integer_ratio(big: f64, small: f64) -> Option<usize> {
    let r = (big / small).round();
    ((r * small - big).abs() <= 1e-9 * big.max(1.0) && r >= 1.0).then_some(r as usize)
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Parameter(m));
        let non_negative = [
            ("worker_apoptosis_rate", self.worker_apoptosis_rate),
            ("worker_migration_speed", self.worker_migration_speed),
            ("worker_o2_uptake", self.worker_o2_uptake),
            ("cargo_o2_uptake", self.cargo_o2_uptake),
            ("cargo_apoptosis_rate", self.cargo_apoptosis_rate),
            ("cargo_relative_adhesion", self.cargo_relative_adhesion),
            ("cargo_relative_repulsion", self.cargo_relative_repulsion),
            ("damage_rate", self.damage_rate),
            ("repair_rate", self.repair_rate),
            ("drug_death_rate", self.drug_death_rate),
            ("elastic_coefficient", self.elastic_coefficient),
            ("max_elastic_displacement", self.max_elastic_displacement),
            ("oxygen_decay", self.oxygen_decay),
            ("chemical_decay", self.chemical_decay),
            ("oxygen_diffusion", self.oxygen_diffusion),
            ("chemical_diffusion", self.chemical_diffusion),
            ("tumour_o2_uptake", self.tumour_o2_uptake),
            ("tumour_c1_secretion", self.tumour_c1_secretion),
            ("cargo_c2_secretion", self.cargo_c2_secretion),
            ("cargo_drug_secretion", self.cargo_drug_secretion),
            ("secretion_target", self.secretion_target),
            ("oxygen_far_field", self.oxygen_far_field),
            ("base_division_rate", self.base_division_rate),
            ("tumour_radius", self.tumour_radius),
            ("growth_duration", self.growth_duration),
            ("treatment_duration", self.treatment_duration),
        ];
        if let Some((name, v)) = non_negative.iter().find(|(_, v)| !(*v >= 0.0 && v.is_finite())) {
            return bad(format!("{name} must be finite and non-negative, got {v}"));
        }
        if !(0.0 < self.min_attach_distance && self.min_attach_distance < self.max_attach_distance) {
            return bad("require 0 < min_attach_distance < max_attach_distance".into());
        }
        if !(0.0..=1.0).contains(&self.worker_fraction) {
            return bad(format!("worker_fraction must lie in [0, 1], got {}", self.worker_fraction));
        }
        for (name, v) in [
            ("domain_half_width", self.domain_half_width),
            ("dx", self.dx),
            ("cell_radius", self.cell_radius),
            ("packing_factor", self.packing_factor),
            ("dt_diffusion", self.dt_diffusion),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if integer_ratio(2.0 * self.domain_half_width, self.dx).is_none() {
            return bad("domain width must be an integer multiple of dx".into());
        }
        if self.tumour_radius > self.domain_half_width {
            return bad("tumour_radius exceeds the domain".into());
        }
        if self.injection_inner_gap < 0.0 || self.injection_outer_gap < self.injection_inner_gap {
            return bad("require 0 <= injection_inner_gap <= injection_outer_gap".into());
        }
        if integer_ratio(self.dt_mechanics, self.dt_diffusion).is_none()
            || integer_ratio(self.dt_biology, self.dt_mechanics).is_none()
        {
            return bad("timesteps must satisfy dt_diffusion <= dt_mechanics <= dt_biology with integer ratios".into());
        }
        for (name, d) in [("growth_duration", self.growth_duration), ("treatment_duration", self.treatment_duration)] {
            if d > 0.0 && integer_ratio(d, self.dt_biology).is_none() {
                return bad(format!("{name} must be a multiple of dt_biology"));
            }
        }
        if let Some(s) = self.snapshot_interval {
            if !(s > 0.0) {
                return bad("snapshot_interval must be positive".into());
            }
        }
        Ok(())
    }

    pub(crate) fn mechanics_substeps(&self) -> usize {
        integer_ratio(self.dt_biology, self.dt_mechanics).unwrap_or(1)
    }

    pub(crate) fn diffusion_substeps(&self) -> usize {
        integer_ratio(self.dt_mechanics, self.dt_diffusion).unwrap_or(1)
    }

    pub(crate) fn biology_steps(&self, duration: f64) -> usize {
        if duration <= 0.0 {
            0
        } else {
            integer_ratio(duration, self.dt_biology).unwrap_or(0)
        }
    }

    /// Every numeric setting as `(name, value)` for config echo files.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("max_attach_distance", self.max_attach_distance),
            ("min_attach_distance", self.min_attach_distance),
            ("worker_apoptosis_rate", self.worker_apoptosis_rate),
            ("worker_migration_speed", self.worker_migration_speed),
            ("worker_o2_uptake", self.worker_o2_uptake),
            ("cargo_o2_uptake", self.cargo_o2_uptake),
            ("cargo_apoptosis_rate", self.cargo_apoptosis_rate),
            ("cargo_relative_adhesion", self.cargo_relative_adhesion),
            ("cargo_relative_repulsion", self.cargo_relative_repulsion),
            ("damage_rate", self.damage_rate),
            ("repair_rate", self.repair_rate),
            ("drug_death_rate", self.drug_death_rate),
            ("max_relative_adhesion_distance", self.max_relative_adhesion_distance),
            ("elastic_coefficient", self.elastic_coefficient),
            ("max_elastic_displacement", self.max_elastic_displacement),
            ("motility_shutdown_threshold", self.motility_shutdown_threshold),
            ("attachment_receptor_threshold", self.attachment_receptor_threshold),
            ("domain_half_width", self.domain_half_width),
            ("dx", self.dx),
            ("dt_diffusion", self.dt_diffusion),
            ("dt_mechanics", self.dt_mechanics),
            ("dt_biology", self.dt_biology),
            ("growth_duration", self.growth_duration),
            ("treatment_duration", self.treatment_duration),
            ("tumour_radius", self.tumour_radius),
            ("injected_cells", self.injected_cells as f64),
            ("worker_fraction", self.worker_fraction),
            ("cell_radius", self.cell_radius),
            ("packing_factor", self.packing_factor),
            ("injection_inner_gap", self.injection_inner_gap),
            ("injection_outer_gap", self.injection_outer_gap),
            ("oxygen_far_field", self.oxygen_far_field),
            ("oxygen_diffusion", self.oxygen_diffusion),
            ("oxygen_decay", self.oxygen_decay),
            ("chemical_diffusion", self.chemical_diffusion),
            ("chemical_decay", self.chemical_decay),
            ("tumour_o2_uptake", self.tumour_o2_uptake),
            ("tumour_c1_secretion", self.tumour_c1_secretion),
            ("cargo_c2_secretion", self.cargo_c2_secretion),
            ("cargo_drug_secretion", self.cargo_drug_secretion),
            ("secretion_target", self.secretion_target),
            ("repulsion_strength", self.repulsion_strength),
            ("adhesion_strength", self.adhesion_strength),
            ("tumour_relative_adhesion", self.tumour_relative_adhesion),
            ("tumour_relative_repulsion", self.tumour_relative_repulsion),
            ("hypoxic_death_threshold", self.hypoxic_death_threshold),
            ("hypoxic_death_window", self.hypoxic_death_window),
            ("proliferation_threshold", self.proliferation_threshold),
            ("base_division_rate", self.base_division_rate),
            ("count_all_cells", if self.count_all_cells { 1.0 } else { 0.0 }),
        ]
    }

    /// Sets one numeric setting by its [`entries`](Self::entries) name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), SimError> {
        match name {
            "max_attach_distance" => self.max_attach_distance = value,
            "min_attach_distance" => self.min_attach_distance = value,
            "worker_apoptosis_rate" => self.worker_apoptosis_rate = value,
            "worker_migration_speed" => self.worker_migration_speed = value,
            "worker_o2_uptake" => self.worker_o2_uptake = value,
            "cargo_o2_uptake" => self.cargo_o2_uptake = value,
            "cargo_apoptosis_rate" => self.cargo_apoptosis_rate = value,
            "cargo_relative_adhesion" => self.cargo_relative_adhesion = value,
            "cargo_relative_repulsion" => self.cargo_relative_repulsion = value,
            "damage_rate" => self.damage_rate = value,
            "repair_rate" => self.repair_rate = value,
            "drug_death_rate" => self.drug_death_rate = value,
            "max_relative_adhesion_distance" => self.max_relative_adhesion_distance = value,
            "elastic_coefficient" => self.elastic_coefficient = value,
            "max_elastic_displacement" => self.max_elastic_displacement = value,
            "motility_shutdown_threshold" => self.motility_shutdown_threshold = value,
            "attachment_receptor_threshold" => self.attachment_receptor_threshold = value,
            "domain_half_width" => self.domain_half_width = value,
            "dx" => self.dx = value,
            "dt_diffusion" => self.dt_diffusion = value,
            "dt_mechanics" => self.dt_mechanics = value,
            "dt_biology" => self.dt_biology = value,
            "growth_duration" => self.growth_duration = value,
            "treatment_duration" => self.treatment_duration = value,
            "tumour_radius" => self.tumour_radius = value,
            "worker_fraction" => self.worker_fraction = value,
            "cell_radius" => self.cell_radius = value,
            "packing_factor" => self.packing_factor = value,
            "injection_inner_gap" => self.injection_inner_gap = value,
            "injection_outer_gap" => self.injection_outer_gap = value,
            "oxygen_far_field" => self.oxygen_far_field = value,
            "oxygen_diffusion" => self.oxygen_diffusion = value,
            "oxygen_decay" => self.oxygen_decay = value,
            "chemical_diffusion" => self.chemical_diffusion = value,
            "chemical_decay" => self.chemical_decay = value,
            "tumour_o2_uptake" => self.tumour_o2_uptake = value,
            "tumour_c1_secretion" => self.tumour_c1_secretion = value,
            "cargo_c2_secretion" => self.cargo_c2_secretion = value,
            "cargo_drug_secretion" => self.cargo_drug_secretion = value,
            "secretion_target" => self.secretion_target = value,
            "repulsion_strength" => self.repulsion_strength = value,
            "adhesion_strength" => self.adhesion_strength = value,
            "tumour_relative_adhesion" => self.tumour_relative_adhesion = value,
            "tumour_relative_repulsion" => self.tumour_relative_repulsion = value,
            "hypoxic_death_threshold" => self.hypoxic_death_threshold = value,
            "hypoxic_death_window" => self.hypoxic_death_window = value,
            "proliferation_threshold" => self.proliferation_threshold = value,
            "base_division_rate" => self.base_division_rate = value,
            "injected_cells" => {
                if !(value >= 0.0 && value.fract() == 0.0) {
                    return Err(SimError::Parameter(format!("injected_cells must be a non-negative integer, got {value}")));
                }
                self.injected_cells = value as usize;
            }
            "count_all_cells" => self.count_all_cells = value != 0.0,
            "snapshot_interval" => self.snapshot_interval = (value > 0.0).then_some(value),
            _ => return Err(SimError::Parameter(format!("unknown simulator setting `{name}`"))),
        }
        Ok(())
    }
}

/// The six evolved worker and cargo parameters, in physical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TherapyParams {
    pub attached_bias: f64,
    pub unattached_bias: f64,
    pub worker_adhesion: f64,
    pub worker_repulsion: f64,
    /// Minutes.
    pub persistence_time: f64,
    /// mmHg.
    pub cargo_release_o2_threshold: f64,
}

impl TherapyParams {
    pub fn from_physical(v: &[f64]) -> Result<Self, SimError> {
        let [a, b, c, d, e, f] = v else {
            return Err(SimError::Parameter(format!("expected 6 therapy values, got {}", v.len())));
        };
        let p = Self {
            attached_bias: *a,
            unattached_bias: *b,
            worker_adhesion: *c,
            worker_repulsion: *d,
            persistence_time: *e,
            cargo_release_o2_threshold: *f,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_genotype(g: &Genotype) -> Result<Self, SimError> {
        let v = ParameterSpace::therapy().denormalize(g).map_err(|e| SimError::Parameter(e.to_string()))?;
        Self::from_physical(&v)
    }

    pub fn to_physical(&self) -> [f64; 6] {
        [
            self.attached_bias,
            self.unattached_bias,
            self.worker_adhesion,
            self.worker_repulsion,
            self.persistence_time,
            self.cargo_release_o2_threshold,
        ]
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let space = ParameterSpace::therapy();
        for (spec, v) in space.specs().iter().zip(self.to_physical()) {
            if !(spec.lower..=spec.upper).contains(&v) {
                return Err(SimError::Parameter(format!(
                    "{} = {v} outside [{}, {}]",
                    spec.name, spec.lower, spec.upper
                )));
            }
        }
        Ok(())
    }
}

impl Default for TherapyParams {
    /// Centre of the search box.
    fn default() -> Self {
        Self::from_genotype(&Genotype::zeros(6)).expect("midpoint is in range")
    }
}
