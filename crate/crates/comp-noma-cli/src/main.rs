//! Experiment CLI: load a scenario config, run a sweep with seeded
//! Monte-Carlo trials, and write the results as CSV.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::Parser;

use comp_noma_cli::experiment::{
    run_experiment, ExperimentKind, ExperimentSpec, SolverTag, SweepOverrides,
};
use comp_noma_cli::load_scenario_file;

#[derive(Debug, Parser)]
#[command(
    name = "comp-noma",
    about = "Resource-management experiments for a virtualized CoMP-NOMA downlink",
    long_about = "Runs seeded Monte-Carlo sweeps of the centralized (crm) and semi-centralized\n\
                  (scrm) resource-management solvers plus the fixed-association baselines\n\
                  (heuristic-nos, no-comp), and writes one CSV row per (sweep point, trial,\n\
                  solver). The overhead and region experiments emit the signaling/complexity\n\
                  schema instead: users,bs_count,mode,overhead_kb,ops,feasible."
)]
struct Cli {
    /// Scenario config file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Experiment: power | mvno | users | rmin | overhead | region | single.
    #[arg(long, default_value = "single")]
    experiment: String,
    /// Sweep overrides, e.g. "p_max_mbs_w=1|2|3,users=4|8".
    #[arg(long, default_value = "")]
    sweep: String,
    /// Monte-Carlo trials per sweep point.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Base seed; overrides the config file's seed when set.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated solver tags: crm, scrm, heuristic-nos, no-comp.
    #[arg(long, default_value = "scrm")]
    solver: String,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solver convergence threshold.
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Iteration budget (outer rounds for scrm, polyblock rounds for crm).
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Record wall-clock seconds in the CSV (breaks byte-reproducibility).
    #[arg(long, default_value_t = false)]
    timing: bool,
    /// Dump one solver-result file per row into this directory.
    #[arg(long)]
    dump_alloc: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<()> {
    let scenario = load_scenario_file(&cli.config)?;
    let kind = ExperimentKind::from_str(&cli.experiment)?;
    let sweep = SweepOverrides::parse(&cli.sweep)?;
    let solvers = cli
        .solver
        .split(',')
        .filter(|s| !s.is_empty())
        .map(SolverTag::from_str)
        .collect::<Result<Vec<_>>>()?;
    let base_seed = cli.seed.unwrap_or(scenario.seed);
    let spec = ExperimentSpec {
        scenario,
        kind,
        sweep,
        trials: cli.trials,
        base_seed,
        solvers,
        eps: cli.eps,
        max_iter: cli.max_iter,
        timing: cli.timing,
        dump_dir: cli.dump_alloc,
    };
    let dataset = run_experiment(&spec)?;
    match &cli.out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .with_context(|| format!("creating {}", parent.display()))?;
                }
            }
            std::fs::write(path, dataset.to_csv())
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => print!("{}", dataset.to_csv()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
