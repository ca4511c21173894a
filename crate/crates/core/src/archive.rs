//! Real-evaluated candidates in evaluation order; the surrogates' training set.

use crate::param_space::Genotype;

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveRecord {
    pub genotype: Genotype,
    /// Per-replicate objective values.
    pub samples: Vec<f64>,
    pub mean_fitness: f64,
    pub evaluation_index: usize,
}

impl ArchiveRecord {
    pub fn new(genotype: Genotype, samples: Vec<f64>, evaluation_index: usize) -> Self {
        let mean_fitness = mean(&samples);
        Self { genotype, samples, mean_fitness, evaluation_index }
    }
}

pub(crate) fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Archive {
    records: Vec<ArchiveRecord>,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: ArchiveRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[ArchiveRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Lowest mean fitness among all records (minimization).
    pub fn best_fitness(&self) -> Option<f64> {
        self.records.iter().map(|r| r.mean_fitness).min_by(f64::total_cmp)
    }

    /// Record with the lowest mean fitness; ties go to the earliest evaluation.
    pub fn best(&self) -> Option<&ArchiveRecord> {
        self.records.iter().reduce(|a, b| if b.mean_fitness < a.mean_fitness { b } else { a })
    }

    /// Training rows: one (genotype, mean fitness) pair per candidate.
    pub fn training_data(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        self.records
            .iter()
            .map(|r| (r.genotype.values().to_vec(), r.mean_fitness))
            .unzip()
    }
}

impl FromIterator<ArchiveRecord> for Archive {
    fn from_iter<I: IntoIterator<Item = ArchiveRecord>>(iter: I) -> Self {
        Self { records: iter.into_iter().collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_best() {
        let mut a = Archive::new();
        a.push(ArchiveRecord::new(Genotype::zeros(2), vec![3.0, 5.0], 0));
        a.push(ArchiveRecord::new(Genotype::zeros(2), vec![1.0, 3.0], 1));
        a.push(ArchiveRecord::new(Genotype::zeros(2), vec![2.0, 2.0], 2));
        assert_eq!(a.records()[0].mean_fitness, 4.0);
        assert_eq!(a.best_fitness(), Some(2.0));
        assert_eq!(a.best().unwrap().evaluation_index, 1);
        let (x, y) = a.training_data();
        assert_eq!(x.len(), 3);
        assert_eq!(y, vec![4.0, 2.0, 2.0]);
    }
}
