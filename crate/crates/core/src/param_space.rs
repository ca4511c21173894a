//! Mapping between normalized genotypes on `[-1, 1]^N` and physical therapy parameters.

use rand::Rng;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("dimension mismatch: space has {expected} parameters, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("parameter `{name}` = {value} outside [{lower}, {upper}]")]
    OutOfRange { name: String, value: f64, lower: f64, upper: f64 },
    #[error("invalid bounds for `{name}`: lower {lower} must be below upper {upper}")]
    Bounds { name: String, lower: f64, upper: f64 },
}

/// Physical bounds of one evolvable parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub units: String,
}

impl ParameterSpec {
    pub fn new(name: &str, lower: f64, upper: f64, units: &str) -> Result<Self, SpaceError> {
        if !(lower < upper) {
            return Err(SpaceError::Bounds { name: name.to_owned(), lower, upper });
        }
        Ok(Self { name: name.to_owned(), lower, upper, units: units.to_owned() })
    }

    fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Ordered list of parameter bounds. Column order of every archive follows this order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSpace {
    specs: Vec<ParameterSpec>,
}

/// Number of evolved therapy parameters.
pub const THERAPY_DIM: usize = 6;

impl ParameterSpace {
    pub fn new(specs: Vec<ParameterSpec>) -> Self {
        Self { specs }
    }

    /// The six worker/cargo parameters searched by the optimizer, in canonical order.
    pub fn therapy() -> Self {
        let s = |n, l, u, units| ParameterSpec::new(n, l, u, units).expect("static bounds");
        Self::new(vec![
            s("attached_worker_migration_bias", 0.0, 1.0, ""),
            s("unattached_worker_migration_bias", 0.0, 1.0, ""),
            s("worker_relative_adhesion", 0.0, 10.0, ""),
            s("worker_relative_repulsion", 0.0, 10.0, ""),
            s("worker_motility_persistence_time", 0.0, 10.0, "min"),
            s("cargo_release_o2_threshold", 0.0, 20.0, "mmHg"),
        ])
    }

    pub fn specs(&self) -> &[ParameterSpec] {
        &self.specs
    }

    pub fn dim(&self) -> usize {
        self.specs.len()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.specs.iter().map(|s| s.name.as_str())
    }

    fn check_len(&self, got: usize) -> Result<(), SpaceError> {
        if got != self.dim() {
            return Err(SpaceError::Dimension { expected: self.dim(), got });
        }
        Ok(())
    }

    pub fn denormalize(&self, g: &Genotype) -> Result<Vec<f64>, SpaceError> {
        self.check_len(g.len())?;
        Ok(self
            .specs
            .iter()
            .zip(g.values())
            .map(|(s, &x)| s.lower + (x + 1.0) * 0.5 * s.width())
            .collect())
    }

    pub fn normalize(&self, physical: &[f64]) -> Result<Genotype, SpaceError> {
        self.check_len(physical.len())?;
        let mut values = Vec::with_capacity(physical.len());
        for (s, &p) in self.specs.iter().zip(physical) {
            if !(p >= s.lower && p <= s.upper) {
                return Err(SpaceError::OutOfRange {
                    name: s.name.clone(),
                    value: p,
                    lower: s.lower,
                    upper: s.upper,
                });
            }
            values.push(((p - s.lower) / s.width() * 2.0 - 1.0).clamp(-1.0, 1.0));
        }
        Ok(Genotype(values))
    }

    pub fn random_genotype<R: Rng + ?Sized>(&self, rng: &mut R) -> Genotype {
        Genotype::random(self.dim(), rng)
    }
}

/// Normalized parameter vector; every component lies in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Genotype(Vec<f64>);

impl Genotype {
    /// Builds a genotype, clamping each component into `[-1, 1]`.
    pub fn new(values: Vec<f64>) -> Self {
        Self(values.into_iter().map(|x| x.clamp(-1.0, 1.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        Self((0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sets one allele, clamped into range.
    pub fn set(&mut self, i: usize, value: f64) {
        self.0[i] = value.clamp(-1.0, 1.0);
    }

    pub fn distance(&self, other: &Genotype) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn midpoint_lower_upper() {
        let space = ParameterSpace::therapy();
        assert_eq!(space.dim(), 6);
        let mid = space.denormalize(&Genotype::zeros(6)).unwrap();
        assert_eq!(mid, vec![0.5, 0.5, 5.0, 5.0, 5.0, 10.0]);
        let lo = space.denormalize(&Genotype::new(vec![-1.0; 6])).unwrap();
        assert_eq!(lo, vec![0.0; 6]);
        let hi = space.denormalize(&Genotype::new(vec![1.0; 6])).unwrap();
        assert_eq!(hi, vec![1.0, 1.0, 10.0, 10.0, 10.0, 20.0]);
    }

    #[test]
    fn normalize_inverts() {
        let space = ParameterSpace::therapy();
        let g = space.normalize(&[0.5, 0.5, 5.0, 5.0, 5.0, 10.0]).unwrap();
        assert_eq!(g.values(), &[0.0; 6]);
        let g = space.normalize(&[1.0, 1.0, 10.0, 10.0, 10.0, 20.0]).unwrap();
        assert_eq!(g.values(), &[1.0; 6]);
    }

    #[test]
    fn errors() {
        let space = ParameterSpace::therapy();
        assert!(matches!(
            space.denormalize(&Genotype::zeros(5)),
            Err(SpaceError::Dimension { expected: 6, got: 5 })
        ));
        let err = space.normalize(&[0.5, 0.5, 5.0, 5.0, 5.0, 21.0]).unwrap_err();
        assert!(matches!(err, SpaceError::OutOfRange { ref name, .. } if name == "cargo_release_o2_threshold"));
        assert!(ParameterSpec::new("x", 1.0, 1.0, "").is_err());
    }

    #[test]
    fn random_genotype_deterministic_and_bounded() {
        let space = ParameterSpace::therapy();
        let a = space.random_genotype(&mut ChaCha8Rng::seed_from_u64(7));
        let b = space.random_genotype(&mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let mut sums = [0.0; 6];
        for _ in 0..draws {
            let g = space.random_genotype(&mut rng);
            for (s, &x) in sums.iter_mut().zip(g.values()) {
                assert!((-1.0..=1.0).contains(&x));
                *s += x;
            }
        }
        for s in sums {
            assert!((s / draws as f64).abs() < 0.02);
        }
    }

    #[test]
    fn denormalize_monotone() {
        let space = ParameterSpace::therapy();
        for i in 0..6 {
            let mut prev = f64::NEG_INFINITY;
            for step in 0..=20 {
                let mut g = Genotype::zeros(6);
                g.set(i, -1.0 + step as f64 * 0.1);
                let p = space.denormalize(&g).unwrap()[i];
                assert!(p > prev);
                prev = p;
            }
        }
    }
}
