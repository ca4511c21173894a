use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use saga_core::benchmark::SyntheticObjective;
use saga_core::evolution::{run_ga, run_saga, Objective, RunOptions, RunResult};
use saga_core::param_space::ParameterSpace;
use saga_core::simulator::{run_simulation, SimConfig, SimulatorObjective, TherapyParams};
use saga_core::stats::{summarize, wilcoxon_rank_sum, SampleSummary};

use crate::artifacts::{self, ArchiveRow};
use crate::config::{ExperimentConfig, ObjectiveKind};

pub const ALPHA: f64 = 0.05;

/// Runs one optimization and writes its artifacts into `cfg.output_dir`.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<RunResult> {
    let objective: Box<dyn Objective> = match cfg.objective {
        ObjectiveKind::Simulator => Box::new(SimulatorObjective::new(cfg.simulator.clone())?),
        ObjectiveKind::Synthetic => Box::new(SyntheticObjective::new(cfg.noise_fraction)),
    };
    let mut opts = RunOptions::new(cfg.run_seed);
    opts.parallel_replicates = cfg.parallel_replicates;
    let result = match cfg.algorithm.model_kind() {
        None => run_ga(&cfg.evolution, objective.as_ref(), &opts, None)?,
        Some(kind) => run_saga(&cfg.evolution, objective.as_ref(), kind, &opts, None)?,
    };

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    artifacts::write_archive(&dir.join(artifacts::ARCHIVE_FILE), &result)?;
    artifacts::write_trace(&dir.join(artifacts::TRACE_FILE), &result.best_trace)?;
    fs::write(dir.join(artifacts::SUMMARY_FILE), artifacts::summary_text(&result)?)?;
    fs::write(dir.join(artifacts::CONFIG_FILE), cfg.echo())?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunBest {
    pub label: String,
    pub evaluation_index: usize,
    pub samples: Vec<f64>,
    pub summary: SampleSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub a: RunBest,
    pub b: RunBest,
    pub statistic: f64,
    pub p_value: f64,
}

impl CompareReport {
    pub fn significant(&self) -> bool {
        self.p_value <= ALPHA
    }
}

fn best_row(rows: &[ArchiveRow]) -> Option<&ArchiveRow> {
    rows.iter().reduce(|a, b| if b.mean_fitness < a.mean_fitness { b } else { a })
}

fn load_best(run: &Path) -> Result<RunBest> {
    let rows = artifacts::read_archive(&artifacts::archive_path(run))?;
    let Some(best) = best_row(&rows) else { bail!("{}: archive is empty", run.display()) };
    Ok(RunBest {
        label: artifacts::run_label(run),
        evaluation_index: best.evaluation_index,
        samples: best.samples.clone(),
        summary: summarize(&best.samples)?,
    })
}

/// Compares the replicate samples of each run's best candidate with a two-sided rank-sum test.
pub fn cmd_compare(run_a: &Path, run_b: &Path) -> Result<CompareReport> {
    let a = load_best(run_a)?;
    let b = load_best(run_b)?;
    let (statistic, p_value) = wilcoxon_rank_sum(&a.samples, &b.samples)?;
    Ok(CompareReport { a, b, statistic, p_value })
}

fn summary_line(s: &SampleSummary) -> String {
    let kurt = s.excess_kurtosis.map_or_else(|| "undefined".to_string(), |k| format!("{k:.2}"));
    format!(
        "mean = {:.2}, SD = {:.2}, samples = {}, min = {}, median = {}, kurtosis = {kurt}",
        s.mean, s.sd, s.n, s.min, s.median
    )
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (tag, r) in [("A", &self.a), ("B", &self.b)] {
            writeln!(f, "{tag} {} best #{}: {}", r.label, r.evaluation_index, summary_line(&r.summary))?;
        }
        writeln!(f, "rank-sum statistic = {}, p = {:.6}", self.statistic, self.p_value)?;
        let verdict = if self.significant() { "significant" } else { "not significant" };
        write!(f, "verdict at alpha {ALPHA}: {verdict}")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScatterReport {
    pub scatter_files: Vec<PathBuf>,
    pub trace_files: Vec<PathBuf>,
    pub rows_per_table: usize,
}

/// Writes one `(value, mean_fitness, algorithm)` table per evolved parameter plus one best-so-far
/// trace per run.
pub fn cmd_scatter(runs: &[PathBuf], out: &Path) -> Result<ScatterReport> {
    if runs.is_empty() {
        eprintln!("warning: no runs given, nothing to do");
        return Ok(ScatterReport::default());
    }
    let loaded: Vec<(String, Vec<ArchiveRow>)> = runs
        .iter()
        .map(|r| Ok((artifacts::run_label(r), artifacts::read_archive(&artifacts::archive_path(r))?)))
        .collect::<Result<_>>()?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let mut report = ScatterReport { rows_per_table: loaded.iter().map(|(_, rows)| rows.len()).sum(), ..Default::default() };
    for (p, name) in ParameterSpace::therapy().names().enumerate() {
        let path = out.join(format!("scatter_{name}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record([name, "mean_fitness", "algorithm"])?;
        for (label, rows) in &loaded {
            for row in rows {
                w.write_record([row.physical[p].to_string(), row.mean_fitness.to_string(), label.clone()])?;
            }
        }
        w.flush()?;
        report.scatter_files.push(path);
    }
    for (i, (label, rows)) in loaded.iter().enumerate() {
        let mut best = f64::INFINITY;
        let trace: Vec<(usize, f64)> = rows
            .iter()
            .map(|r| {
                best = best.min(r.mean_fitness);
                (r.evaluation_index, best)
            })
            .collect();
        let path = out.join(format!("trace_{i}_{label}.csv"));
        artifacts::write_trace(&path, &trace)?;
        report.trace_files.push(path);
    }
    Ok(report)
}

/// Runs one simulation and writes its cell counts, and snapshots when enabled.
pub fn cmd_simulate(cfg: &SimConfig, params: &TherapyParams, seed: u64, out: &Path) -> Result<usize> {
    let outcome = run_simulation(cfg, params, seed)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut w = csv::Writer::from_path(out.join("counts.csv"))?;
    w.write_record(["time", "tumour", "worker", "cargo"])?;
    for (t, c) in &outcome.counts {
        w.write_record([t.to_string(), c.tumour.to_string(), c.worker.to_string(), c.cargo.to_string()])?;
    }
    w.flush()?;
    if cfg.snapshot_interval.is_some() {
        let mut w = csv::Writer::from_path(out.join("snapshots.csv"))?;
        w.write_record(["time", "cell_id", "kind", "x", "y", "alive"])?;
        for s in &outcome.snapshots {
            w.write_record([
                s.time.to_string(),
                s.cell_id.to_string(),
                s.kind.name().to_string(),
                s.position[0].to_string(),
                s.position[1].to_string(),
                s.alive.to_string(),
            ])?;
        }
        w.flush()?;
    }
    Ok(outcome.tumour_cell_count)
}
