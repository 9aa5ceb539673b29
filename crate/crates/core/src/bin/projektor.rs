//! Batch experiment runner for projection trajectories, regularity scans,
//! Johnson-graph classification, and transport demos.
//!
//! Subcommands force the matching diagnostic of the config file on; `build`
//! only writes the gallery subspaces; `replay` re-runs a recorded report
//! and byte-compares its CSV outputs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use projektor::harness::{replay, run_build, run_experiment, DiagnosticFlags, ExperimentSpec};

#[derive(Parser)]
#[command(name = "projektor", version, about = "Projection-product laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the gallery configuration and write its subspaces.
    Build(RunArgs),
    /// Witness-gap and rate scan across truncation levels.
    Scan(RunArgs),
    /// Run the configured schedules and export trajectory CSVs.
    Trajectory(RunArgs),
    /// Classify 4-tuples and evaluate the divergence condition.
    Johnson(RunArgs),
    /// Build the chained transport plan and its demo trajectory.
    Transport(RunArgs),
    /// Re-run a recorded report and byte-compare the CSV outputs.
    Replay {
        /// Path to a report.json produced by a previous run.
        report: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment spec (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Truncation-level override, comma separated.
    #[arg(long, value_delimiter = ',')]
    truncations: Option<Vec<usize>>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentSpec, projektor::Error> {
        let text = std::fs::read_to_string(&self.config)?;
        let mut spec: ExperimentSpec = serde_json::from_str(&text)?;
        if let Some(out) = &self.out {
            spec.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        if let Some(truncations) = &self.truncations {
            spec.truncations = truncations.clone();
        }
        Ok(spec)
    }
}

fn run_with_flags(args: &RunArgs, force: impl Fn(&mut DiagnosticFlags)) -> i32 {
    let mut spec = match args.load() {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    force(&mut spec.diagnostics);
    match run_experiment(&spec) {
        Ok(outcome) => {
            println!("report: {}", outcome.report_path.display());
            for f in &outcome.report.failures {
                eprintln!("failure in {}: [{}] {}", f.stage, f.code, f.detail);
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Build(args) => match args.load().and_then(|spec| run_build(&spec)) {
            Ok(files) => {
                for f in files {
                    println!("wrote {}", f.display());
                }
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Command::Scan(args) => run_with_flags(&args, |d| {
            d.witness = true;
            d.rate = true;
        }),
        Command::Trajectory(args) => run_with_flags(&args, |d| d.trajectory = true),
        Command::Johnson(args) => run_with_flags(&args, |d| d.johnson = true),
        Command::Transport(args) => run_with_flags(&args, |d| d.transport = true),
        Command::Replay { report } => match replay(&report) {
            Ok(code) => {
                println!("replay identical");
                code
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
    };
    ExitCode::from(code.clamp(0, 255) as u8)
}
