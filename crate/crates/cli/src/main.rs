use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use saga_cli::{cmd_compare, cmd_run, cmd_scatter, cmd_simulate, ExperimentConfig, Overrides};
use saga_core::simulator::{SimConfig, TherapyParams};

#[derive(Parser)]
#[command(name = "saga", version, about = "Surrogate-assisted GA experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimization and write its artifacts.
    Run(RunArgs),
    /// Compare the best candidates of two runs.
    Compare { run_a: PathBuf, run_b: PathBuf },
    /// Export per-parameter scatter tables and best-so-far traces.
    Scatter {
        runs: Vec<PathBuf>,
        #[arg(long, default_value = "scatter")]
        output: PathBuf,
    },
    /// Run a single simulation with physical therapy parameters.
    Simulate {
        /// Six comma-separated values in canonical parameter order.
        #[arg(long, value_delimiter = ',', num_args = 6)]
        params: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Minutes between cell snapshots.
        #[arg(long)]
        snapshot_interval: Option<f64>,
        #[arg(long, default_value = "simulation")]
        output: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// ga, saga-gp or saga-mlp.
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<usize>,
    /// Replicates per candidate.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    /// Pre-selection pool size M.
    #[arg(long)]
    pool: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Maximum replicate evaluations in flight.
    #[arg(long)]
    parallel: Option<usize>,
    /// simulator or synthetic.
    #[arg(long)]
    objective: Option<String>,
    #[arg(long, env = "SAGA_OUTPUT_ROOT", hide_env_values = true)]
    output_root: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => {
            let overrides = Overrides {
                algorithm: a.algorithm,
                seed: a.seed,
                budget: a.budget,
                replicates: a.k,
                population: a.population,
                pool: a.pool,
                output: a.output,
                parallel: a.parallel,
                objective: a.objective,
                output_root: a.output_root,
            };
            let cfg = ExperimentConfig::load(a.config.as_deref(), &overrides)?;
            let result = cmd_run(&cfg)?;
            let best = result.best().map_or(f64::NAN, |b| b.mean_fitness);
            println!(
                "{} seed {}: {} evaluations, best mean fitness {best}, {:.1} s -> {}",
                cfg.algorithm,
                cfg.run_seed,
                result.archive.len(),
                result.wall_time,
                cfg.output_dir.display()
            );
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Compare { run_a, run_b } => println!("{}", cmd_compare(&run_a, &run_b)?),
        Command::Scatter { runs, output } => {
            let r = cmd_scatter(&runs, &output)?;
            if !runs.is_empty() {
                println!("{} scatter tables, {} traces in {}", r.scatter_files.len(), r.trace_files.len(), output.display());
            }
        }
        Command::Simulate { params, seed, snapshot_interval, output } => {
            let params = match params {
                Some(v) => TherapyParams::from_physical(&v)?,
                None => TherapyParams::default(),
            };
            let cfg = SimConfig { snapshot_interval, ..SimConfig::default() };
            let tumour = cmd_simulate(&cfg, &params, seed, &output)?;
            println!("tumour cells: {tumour} -> {}", output.display());
        }
    }
    Ok(())
}
