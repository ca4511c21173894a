//! Run artifacts: comma-separated archive and trace tables, key-value text documents.
//!
//! `archive.csv` columns: `evaluation_index`, the six therapy parameters in physical units
//! (canonical order), `sample_0` .. `sample_{k-1}`, `mean_fitness`.
//! `trace.csv` columns: `evaluation_index`, `best_mean_fitness`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use saga_core::evolution::RunResult;
use saga_core::param_space::ParameterSpace;

pub const ARCHIVE_FILE: &str = "archive.csv";
pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const CONFIG_FILE: &str = "config.txt";

/// One archive row as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveRow {
    pub evaluation_index: usize,
    pub physical: Vec<f64>,
    pub samples: Vec<f64>,
    pub mean_fitness: f64,
}

pub fn write_archive(path: &Path, result: &RunResult) -> Result<()> {
    let space = ParameterSpace::therapy();
    let k = result.config.replicates;
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["evaluation_index".to_string()];
    header.extend(space.names().map(str::to_string));
    header.extend((0..k).map(|i| format!("sample_{i}")));
    header.push("mean_fitness".into());
    w.write_record(&header)?;
    for rec in result.archive.records() {
        let physical = space.denormalize(&rec.genotype)?;
        let mut row = vec![rec.evaluation_index.to_string()];
        row.extend(physical.iter().map(f64::to_string));
        row.extend(rec.samples.iter().map(f64::to_string));
        row.push(rec.mean_fitness.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace(path: &Path, trace: &[(usize, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["evaluation_index", "best_mean_fitness"])?;
    for (i, f) in trace {
        w.write_record([i.to_string(), f.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn summary_text(result: &RunResult) -> Result<String> {
    let space = ParameterSpace::therapy();
    let mut s = String::new();
    writeln!(s, "algorithm = {}", result.algorithm)?;
    writeln!(s, "run_seed = {}", result.seeds.run_seed)?;
    writeln!(s, "seed.initial_population = {}", result.seeds.initial_population)?;
    writeln!(s, "seed.variation = {}", result.seeds.variation)?;
    writeln!(s, "evaluations = {}", result.archive.len())?;
    writeln!(s, "wall_time_seconds = {:.3}", result.wall_time)?;
    if let Some(best) = result.best() {
        writeln!(s, "best.evaluation_index = {}", best.evaluation_index)?;
        writeln!(s, "best.mean_fitness = {}", best.mean_fitness)?;
        for (name, v) in space.names().zip(space.denormalize(&best.genotype)?) {
            writeln!(s, "best.{name} = {v}")?;
        }
    }
    writeln!(s, "model_fits = {}", result.model_fits.len())?;
    for (i, fit) in result.model_fits.iter().enumerate() {
        writeln!(s, "fit.{i}.evaluation_index = {}", fit.evaluation_index)?;
        writeln!(s, "fit.{i}.training_size = {}", fit.training_size)?;
        writeln!(s, "fit.{i}.seed = {}", fit.seed)?;
        for (k, v) in &fit.summary {
            writeln!(s, "fit.{i}.{k} = {v}")?;
        }
    }
    writeln!(s, "warnings = {}", result.warnings.len())?;
    for (i, w) in result.warnings.iter().enumerate() {
        writeln!(s, "warning.{i} = {w}")?;
    }
    Ok(s)
}

pub fn read_archive(path: &Path) -> Result<Vec<ArchiveRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header = r.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h == name);
    let idx = col("evaluation_index").ok_or_else(|| anyhow!("{}: missing evaluation_index column", path.display()))?;
    let mean = col("mean_fitness").ok_or_else(|| anyhow!("{}: missing mean_fitness column", path.display()))?;
    let params: Vec<usize> = ParameterSpace::therapy()
        .names()
        .map(|n| col(n).ok_or_else(|| anyhow!("{}: missing column {n}", path.display())))
        .collect::<Result<_>>()?;
    let samples: Vec<usize> = (0..).map_while(|i| col(&format!("sample_{i}"))).collect();
    if samples.is_empty() {
        bail!("{}: no sample columns", path.display());
    }

    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| anyhow!("row {line}: short record"))?
                .parse::<f64>()
                .with_context(|| format!("{}: row {line}, column {}", path.display(), &header[i]))
        };
        rows.push(ArchiveRow {
            evaluation_index: rec.get(idx).unwrap_or_default().parse().with_context(|| format!("row {line}: evaluation_index"))?,
            physical: params.iter().map(|&i| num(i)).collect::<Result<_>>()?,
            samples: samples.iter().map(|&i| num(i)).collect::<Result<_>>()?,
            mean_fitness: num(mean)?,
        });
    }
    Ok(rows)
}

/// Reads `key = value` lines; later keys do not shadow earlier ones.
pub fn read_key_values(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect())
}

/// Accepts a run directory or a path to its archive file.
pub fn archive_path(run: &Path) -> PathBuf {
    if run.is_dir() {
        run.join(ARCHIVE_FILE)
    } else {
        run.to_path_buf()
    }
}

/// Algorithm label of a run, from its summary when present, else the directory name.
pub fn run_label(run: &Path) -> String {
    let dir = if run.is_dir() { run } else { run.parent().unwrap_or(run) };
    read_key_values(&dir.join(SUMMARY_FILE))
        .ok()
        .and_then(|kv| kv.into_iter().find(|(k, _)| k == "algorithm").map(|(_, v)| v))
        .unwrap_or_else(|| dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into()))
}
