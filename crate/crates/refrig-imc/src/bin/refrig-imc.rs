use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use refrig_imc::commands::{self, Outcome};
use refrig_imc::{CliResult, Overrides, Project};

/// IMC tuning and evaluation of decentralized PID control for a 2x2
/// refrigeration plant.
#[derive(Parser)]
#[command(name = "refrig-imc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Project configuration (JSON). Shipped defaults when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Simulation sample time in seconds.
    #[arg(long)]
    ts: Option<f64>,
    #[arg(long)]
    lambda11: Option<f64>,
    #[arg(long)]
    lambda22: Option<f64>,
    /// JSON file with the eight J weights.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
    /// Suppress the listing of written files.
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state gains, relative gain array and recommended pairing.
    Rga {
        #[command(flatten)]
        common: Common,
        /// Plant file; overrides the configuration.
        #[arg(long)]
        plant: Option<PathBuf>,
    },
    /// Second-order fits of the diagonal step responses.
    Reduce {
        #[command(flatten)]
        common: Common,
    },
    /// IMC-PID parameters for both loops.
    Tune {
        #[command(flatten)]
        common: Common,
    },
    /// Closed-loop runs of the candidate and baseline controllers.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Relative indices and J from two simulation CSV files.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long)]
        baseline: PathBuf,
    },
    /// J and ratio surfaces over a lambda grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Worker threads (default: REFRIG_IMC_THREADS or all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Every stage in order, plus a run manifest.
    Pipeline {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        threads: Option<usize>,
        /// Run the sweep stage even if the configuration leaves it off.
        #[arg(long)]
        sweep: bool,
    },
}

fn load(c: &Common) -> CliResult<Project> {
    let ov = Overrides {
        ts: c.ts,
        lambda11: c.lambda11,
        lambda22: c.lambda22,
        weights: c.weights.clone(),
        out: c.out.clone(),
        svg: c.svg,
    };
    Project::load(c.config.as_deref(), &ov)
}

fn run(cli: Cli) -> CliResult<(Outcome, bool)> {
    Ok(match cli.command {
        Command::Rga { common, plant } => {
            let mut p = load(&common)?;
            if let Some(path) = plant {
                p.plant = refrig_imc::formats::load_plant(&path)?;
                p.plant_source = refrig_imc::project::PlantSource::File(path);
            }
            (commands::cmd_rga(&p)?, common.quiet)
        }
        Command::Reduce { common } => (commands::cmd_reduce(&load(&common)?)?, common.quiet),
        Command::Tune { common } => (commands::cmd_tune(&load(&common)?)?, common.quiet),
        Command::Simulate { common } => (commands::cmd_simulate(&load(&common)?)?, common.quiet),
        Command::Report {
            common,
            candidate,
            baseline,
        } => (
            commands::cmd_report(&load(&common)?, &candidate, &baseline)?,
            common.quiet,
        ),
        Command::Sweep { common, threads } => {
            (commands::cmd_sweep(&load(&common)?, threads)?, common.quiet)
        }
        Command::Pipeline {
            common,
            threads,
            sweep,
        } => {
            let mut p = load(&common)?;
            p.sweep_enabled |= sweep;
            (commands::cmd_pipeline(&p, threads)?, common.quiet)
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((out, quiet)) => {
            print!("{}", out.text);
            if !quiet {
                for a in &out.artifacts {
                    println!("wrote {}", a.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
