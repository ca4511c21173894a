//! Cheap noisy test objective on the normalized genotype cube.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::evolution::{Objective, ObjectiveError};
use crate::param_space::Genotype;

/// Shifted sphere plus a Rastrigin ripple, with additive Normal noise.
///
/// `f(x) = Σ (xᵢ − cᵢ)² + A Σ (1 − cos 2π(xᵢ − cᵢ))`, minimum 0 at `x = c`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticObjective {
    pub shift: Vec<f64>,
    pub rastrigin_amplitude: f64,
    pub noise_sd: f64,
}

impl SyntheticObjective {
    pub const DEFAULT_SHIFT: [f64; 6] = [0.3, -0.2, 0.5, -0.4, 0.1, -0.3];

    /// Default 6-D instance with noise SD equal to `noise_fraction` of [`Self::range`].
    pub fn new(noise_fraction: f64) -> Self {
        let mut obj = Self { shift: Self::DEFAULT_SHIFT.to_vec(), rastrigin_amplitude: 0.1, noise_sd: 0.0 };
        obj.noise_sd = noise_fraction * obj.range();
        obj
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn noiseless(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.shift)
            .map(|(xi, ci)| {
                let d = xi - ci;
                d * d + self.rastrigin_amplitude * (1.0 - (2.0 * PI * d).cos())
            })
            .sum()
    }

    /// Upper bound of `max f − min f` over `[-1, 1]^N`.
    pub fn range(&self) -> f64 {
        self.shift.iter().map(|c| (1.0 + c.abs()).powi(2) + 2.0 * self.rastrigin_amplitude).sum()
    }
}

impl Objective for SyntheticObjective {
    fn evaluate(&self, genotype: &Genotype, replicate_seed: u64) -> Result<f64, ObjectiveError> {
        if genotype.len() != self.dim() {
            return Err(format!("expected {} genes, got {}", self.dim(), genotype.len()).into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed);
        let noise = Normal::new(0.0, self.noise_sd)?.sample(&mut rng);
        Ok(self.noiseless(genotype.values()) + noise)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimum_at_shift() {
        let obj = SyntheticObjective::new(0.0);
        assert_eq!(obj.noiseless(&SyntheticObjective::DEFAULT_SHIFT), 0.0);
        assert!(obj.noiseless(&[0.0; 6]) > 0.0);
        assert_eq!(obj.evaluate(&Genotype::new(obj.shift.clone()), 5).unwrap(), 0.0);
    }

    #[test]
    fn range_bounds_corners() {
        let obj = SyntheticObjective::new(0.05);
        for mask in 0..64u32 {
            let x: Vec<f64> = (0..6).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
            assert!(obj.noiseless(&x) <= obj.range());
        }
        assert!((obj.noise_sd - 0.05 * obj.range()).abs() < 1e-15);
    }

    #[test]
    fn noise_is_seeded() {
        let obj = SyntheticObjective::new(0.05);
        let g = Genotype::zeros(6);
        assert_eq!(obj.evaluate(&g, 1).unwrap(), obj.evaluate(&g, 1).unwrap());
        assert_ne!(obj.evaluate(&g, 1).unwrap(), obj.evaluate(&g, 2).unwrap());
        assert!(obj.evaluate(&Genotype::zeros(5), 1).is_err());
    }
}
