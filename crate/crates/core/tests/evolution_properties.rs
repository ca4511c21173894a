use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use saga_core::benchmark::SyntheticObjective;
use saga_core::evolution::{
    initial_population, mutate, run_ga, run_saga, tournament_select, uniform_crossover, CountingObjective,
    EvolutionConfig, Individual, RunOptions, TournamentMode,
};
use saga_core::param_space::{Genotype, ParameterSpace};
use saga_core::surrogate::ModelKind;

fn genotype(n: usize) -> impl Strategy<Value = Genotype> {
    prop::collection::vec(-1.0f64..=1.0, n).prop_map(Genotype::new)
}

proptest! {
    #[test]
    fn variation_stays_in_bounds(a in genotype(6), b in genotype(6), seed in any::<u64>(), rate in 0.0f64..=1.0, step in 0.01f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let child = uniform_crossover(&a, &b, &mut rng).unwrap();
        for (i, v) in child.values().iter().enumerate() {
            prop_assert!(*v == a.values()[i] || *v == b.values()[i]);
        }
        let m = mutate(&child, rate, step, &mut rng);
        prop_assert!(m.values().iter().all(|v| (-1.0..=1.0).contains(v)));
        for (x, y) in m.values().iter().zip(child.values()) {
            prop_assert!((x - y).abs() <= step + 1e-12);
        }
    }

    #[test]
    fn worst_tournament_never_picks_unique_best(f in prop::collection::vec(0.0f64..100.0, 3..20), seed in any::<u64>()) {
        let pop: Vec<Individual> = f.iter().map(|&v| Individual::new(Genotype::zeros(1), vec![v])).collect();
        let best = (0..pop.len()).min_by(|&i, &j| f[i].total_cmp(&f[j])).unwrap();
        let unique = f.iter().filter(|&&v| v == f[best]).count() == 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in 2..=3 {
            let victim = tournament_select(&pop, t, &mut rng, TournamentMode::Worst).unwrap();
            prop_assert!(!unique || victim != best);
        }
    }

    #[test]
    fn normalize_round_trips(g in genotype(6)) {
        let space = ParameterSpace::therapy();
        let back = space.normalize(&space.denormalize(&g).unwrap()).unwrap();
        for (a, b) in back.values().iter().zip(g.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

fn small_cfg() -> EvolutionConfig {
    EvolutionConfig { evaluation_budget: 45, replicates: 3, preselection_pool: 50, ..EvolutionConfig::with_dimension(6) }
}

#[test]
fn run_invariants_for_every_algorithm() {
    let cfg = small_cfg();
    for seed in 0..3 {
        for kind in [None, Some(ModelKind::Gp), Some(ModelKind::Mlp)] {
            let obj = CountingObjective::new(SyntheticObjective::new(0.05));
            let opts = RunOptions::new(seed);
            let r = match kind {
                None => run_ga(&cfg, &obj, &opts, None),
                Some(k) => run_saga(&cfg, &obj, k, &opts, None),
            }
            .unwrap();
            assert_eq!(obj.calls(), cfg.evaluation_budget * cfg.replicates);
            assert_eq!(r.archive.len(), cfg.evaluation_budget);
            assert!(r.best_trace.windows(2).all(|w| w[1].1 <= w[0].1));
            for rec in r.archive.records() {
                assert!(rec.genotype.values().iter().all(|v| (-1.0..=1.0).contains(v)));
            }
            let init = initial_population(&cfg, seed);
            for (rec, g) in r.archive.records().iter().zip(&init) {
                assert_eq!(&rec.genotype, g);
            }
            // elitism: the archive best is still in the population
            let pop_best = r.final_population.iter().map(|i| i.mean_fitness).fold(f64::INFINITY, f64::min);
            assert_eq!(pop_best, r.archive.best_fitness().unwrap());
        }
    }
}
