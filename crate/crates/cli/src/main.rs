use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ctmp_core::harness::{emit_results, run_experiment, ExperimentConfig};
use ctmp_core::query::{query, PotentialStateIndex, QueryError, QueryRequest};
use ctmp_core::{load_library, preprocess, save_library, Config, Scenario};

/// Kept in sync with the format constants by a unit test.
const VERSION: &str = "0.1.0 (scenario format 1, library format 1, experiment format 1)";

#[derive(Parser)]
#[command(name = "ctmp", version = VERSION, about = "Constant-time motion planning with anytime refinement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the cover library for a scenario.
    Preprocess {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Plan from a potential state to a covered goal.
    Query {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        library: PathBuf,
        /// Start configuration, e.g. "3,4" or "3 4".
        #[arg(long)]
        start: Config,
        #[arg(long)]
        goal: Config,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        budget_ms: u64,
        /// Return the lookup-built path without refinement.
        #[arg(long)]
        no_refine: bool,
    },
    /// Run an experiment described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read_scenario(path: &Path) -> Result<Scenario> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Scenario::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn error_kind(e: &QueryError) -> &'static str {
    match e {
        QueryError::GoalUncovered(_) => "GoalUncovered",
        QueryError::StartNotPotential(_) => "StartNotPotential",
        QueryError::StaleLibrary(_) => "StaleLibrary",
        QueryError::Search(_) => "SearchError",
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Preprocess {
            scenario,
            out,
            seed,
        } => {
            let s = read_scenario(&scenario)?;
            let lib = preprocess(&s, seed)?;
            let mut sink = BufWriter::new(
                File::create(&out).with_context(|| format!("creating {}", out.display()))?,
            );
            save_library(&lib, &s, &mut sink)?;
            sink.flush()?;
            for (region, cover) in s.regions.iter().zip(&lib.regions) {
                let covered: usize = cover.entries.iter().map(|e| e.neighborhood.len()).sum();
                println!(
                    "region {}: {} neighborhoods, {} covered, {} excluded",
                    region.id,
                    cover.entries.len(),
                    covered,
                    cover.excluded.len()
                );
            }
            println!("library written to {}", out.display());
        }
        Command::Query {
            scenario,
            library,
            start,
            goal,
            budget_ms,
            no_refine,
        } => {
            let s = read_scenario(&scenario)?;
            let file =
                File::open(&library).with_context(|| format!("opening {}", library.display()))?;
            let lib = load_library(&mut BufReader::new(file), &s)?;
            let index = PotentialStateIndex::new(&lib);
            let mut req = QueryRequest::new(start, goal, Duration::from_millis(budget_ms));
            req.refine = !no_refine;
            let r = query(&s, &lib, &index, &req)
                .map_err(|e| anyhow::anyhow!("{}: {e}", error_kind(&e)))?;
            let mut out = std::io::stdout().lock();
            for c in r.path.configs() {
                writeln!(out, "{c}")?;
            }
            eprintln!(
                "initial_cost={} final_cost={} optimal={} lookup_ms={:.3} connect_ms={:.3} refine_ms={:.3} epsilons={:?}",
                r.initial_cost,
                r.final_cost,
                r.optimal,
                r.lookup_time.as_secs_f64() * 1e3,
                r.connect_time.as_secs_f64() * 1e3,
                r.refine_time.as_secs_f64() * 1e3,
                r.epsilon_history
            );
        }
        Command::Bench { config } => {
            let cfg = ExperimentConfig::load(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            let output = run_experiment(&cfg)?;
            let files = emit_results(&output, &cfg.output_dir, cfg.deterministic_output)?;
            println!(
                "{:<14} {:>6} {:>8} {:>7} {:>10} {:>18} {:>8}",
                "planner", "trials", "success%", "common", "mean_cost", "plan_ms", "subopt"
            );
            for st in &output.stats {
                println!(
                    "{:<14} {:>6} {:>8.1} {:>7} {:>10.2} {:>9.2} ± {:<7.2} {:>8.4}",
                    st.planner.name(),
                    st.trials,
                    st.success_rate,
                    st.common_solved,
                    st.mean_cost,
                    st.mean_plan_ms,
                    st.std_plan_ms,
                    st.mean_suboptimality
                );
            }
            for f in files {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn version_matches_format_constants() {
        let expected = format!(
            "{} (scenario format {}, library format {}, experiment format {})",
            env!("CARGO_PKG_VERSION"),
            ctmp_core::cspace::SCENARIO_FORMAT_VERSION,
            ctmp_core::LIBRARY_FORMAT_VERSION,
            ctmp_core::harness::EXPERIMENT_FORMAT_VERSION
        );
        assert_eq!(VERSION, expected);
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
