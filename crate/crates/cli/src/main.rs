use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use particlegp_core::harness::{self, presets, Comparison, OutputFormat, SuiteConfig};
use particlegp_core::Benchmark;

#[derive(Parser)]
#[command(name = "bench", version, about = "Equal-budget optimizer comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a config file and print one line per run.
    Run {
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
        /// Replace the config's seed list with this single seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a config file and print the median-distance table.
    Compare {
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// The ten-benchmark preset at 20000 gradient evaluations.
    Table3 {
        /// Number of seeds.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// ParticleGP (Adam base, 20 particles) against Adam on the logistic task.
    Logistic {
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print the registered objectives.
    ListObjectives,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// csv or json
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

fn execute(suite: &SuiteConfig, out: &OutputArgs) -> Result<Comparison> {
    let experiments = suite.experiments()?;
    let cmp = harness::compare(&experiments)?;
    let written = harness::write_outputs(&out.out_dir, suite, &cmp, out.format)
        .with_context(|| format!("writing outputs to {}", out.out_dir.display()))?;
    for p in written {
        eprintln!("wrote {}", p.display());
    }
    Ok(cmp)
}

fn load(path: &Path, seed: Option<u64>) -> Result<SuiteConfig> {
    let mut suite = SuiteConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(s) = seed {
        suite.seeds = vec![s];
    }
    Ok(suite)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

fn print_runs(cmp: &Comparison) {
    println!("{:<18} {:<14} {:>6} {:>12} {:>14} {:>9} {:>10}", "objective", "optimizer", "seed", "distance", "loss", "accuracy", "evals");
    for r in &cmp.table.rows {
        println!(
            "{:<18} {:<14} {:>6} {:>12} {:>14.6e} {:>9} {:>10}",
            r.objective,
            r.optimizer,
            r.seed,
            fmt_opt(r.final_distance),
            r.final_loss,
            fmt_opt(r.final_accuracy),
            r.charged_evals
        );
    }
}

/// Objectives down, optimizers across, median final distance (or accuracy
/// when there is no known optimum) in each cell.
fn print_matrix(suite: &SuiteConfig, cmp: &Comparison) {
    let labels: Vec<&str> = suite.optimizers.iter().map(|o| o.label.as_str()).collect();
    print!("{:<18}", "median");
    for l in &labels {
        print!(" {l:>12}");
    }
    println!();
    for obj in &suite.objectives {
        print!("{obj:<18}");
        for l in &labels {
            let cell = cmp.table.group(obj, l).map(|g| g.median_distance.or(g.median_accuracy));
            print!(" {:>12}", fmt_opt(cell.flatten()));
        }
        println!();
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, seed } => {
            let suite = load(&config, seed)?;
            let cmp = execute(&suite, &out)?;
            print_runs(&cmp);
        }
        Command::Compare { config, out, seed } => {
            let suite = load(&config, seed)?;
            let cmp = execute(&suite, &out)?;
            print_matrix(&suite, &cmp);
        }
        Command::Table3 { seeds, seed, out } => {
            let suite = presets::table3((seed..seed + seeds).collect());
            let cmp = execute(&suite, &out)?;
            print_matrix(&suite, &cmp);
        }
        Command::Logistic { seeds, seed, budget, out } => {
            let suite = presets::logistic((seed..seed + seeds).collect(), budget);
            let cmp = execute(&suite, &out)?;
            print_runs(&cmp);
        }
        Command::ListObjectives => {
            for b in Benchmark::ALL {
                let m = b.global_minima();
                println!("{:<18} dim 2  minimum {:?}  start {:?}", b.name(), m[0], b.default_init());
            }
            println!("{:<18} dim 50 (configurable)", harness::LOGISTIC);
        }
    }
    Ok(())
}
